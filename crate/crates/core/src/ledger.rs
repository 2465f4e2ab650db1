//! Results ledger: a versioned line-oriented text file, one entry per (b,k,n).
//!
//! ```text
//! triff-ledger v1
//! 3,3,4 lower=9 upper=9 status=exact method=search cert=certs/b3k3n4.code time=2026-01-01T00:00:00Z
//! ```
//!
//! `cert=-` marks a missing certificate. Certificate paths are relative to the
//! ledger's directory unless absolute. Entries are kept sorted by key.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::searcher::SizeStatus;

pub const LEDGER_HEADER: &str = "triff-ledger v1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LedgerError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// `entry` is the entry key as written, `key` the offending field.
    #[error("line {line}, entry {entry}, field '{key}': {msg}")]
    Field { line: usize, entry: String, key: String, msg: String },
    #[error("{0}")]
    Io(String),
    #[error("ledger is locked by another writer ({0} exists)")]
    Locked(PathBuf),
    #[error("invalid entry {key}: {msg}")]
    Invalid { key: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LedgerKey {
    pub b: usize,
    pub k: usize,
    pub n: usize,
}

impl fmt::Display for LedgerKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.b, self.k, self.n)
    }
}

impl FromStr for LedgerKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        let [b, k, n] = parts.as_slice() else {
            return Err(format!("key '{s}' is not of the form b,k,n"));
        };
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number '{t}' in key '{s}'"));
        Ok(LedgerKey { b: num(b)?, k: num(k)?, n: num(n)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Search,
    ExternalSolver,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Search => "search",
            Method::ExternalSolver => "external-solver",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Method::Oracle),
            "search" => Ok(Method::Search),
            "external-solver" => Ok(Method::ExternalSolver),
            _ => Err(format!("unknown method '{s}'")),
        }
    }
}

fn parse_status(s: &str) -> Result<SizeStatus, String> {
    match s {
        "exact" => Ok(SizeStatus::Exact),
        "bounded" => Ok(SizeStatus::Bounded),
        _ => Err(format!("unknown status '{s}'")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub key: LedgerKey,
    pub lower: usize,
    pub upper: usize,
    pub status: SizeStatus,
    pub certificate: Option<PathBuf>,
    pub method: Method,
    pub timestamp: String,
}

impl LedgerEntry {
    /// Structural invariants of a single entry.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lower > self.upper {
            out.push(format!("lower {} exceeds upper {}", self.lower, self.upper));
        }
        if self.status == SizeStatus::Exact && self.lower != self.upper {
            out.push(format!("status exact but lower {} != upper {}", self.lower, self.upper));
        }
        if self.lower > 0 && self.certificate.is_none() {
            out.push("lower > 0 without a certificate".into());
        }
        out
    }

    pub fn to_line(&self) -> String {
        let cert = self.certificate.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        format!(
            "{} lower={} upper={} status={} method={} cert={} time={}",
            self.key, self.lower, self.upper, self.status, self.method, cert, self.timestamp
        )
    }

    fn from_line(line: &str, line_no: usize) -> Result<Self, LedgerError> {
        let mut tokens = line.split_whitespace();
        let key_text = tokens.next().unwrap_or_default();
        let key: LedgerKey = key_text.parse().map_err(|msg| LedgerError::Field {
            line: line_no,
            entry: key_text.into(),
            key: "key".into(),
            msg,
        })?;
        let mut fields = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| LedgerError::Field {
                line: line_no,
                entry: key_text.into(),
                key: tok.into(),
                msg: "expected key=value".into(),
            })?;
            if fields.insert(k, v).is_some() {
                return Err(LedgerError::Field {
                    line: line_no,
                    entry: key_text.into(),
                    key: k.into(),
                    msg: "duplicate field".into(),
                });
            }
        }
        let get = |k: &str| {
            fields.get(k).copied().ok_or_else(|| LedgerError::Field {
                line: line_no,
                entry: key_text.into(),
                key: k.into(),
                msg: "missing field".into(),
            })
        };
        let field =
            |k: &str, msg: String| LedgerError::Field { line: line_no, entry: key_text.into(), key: k.into(), msg };
        let num = |k: &str| -> Result<usize, LedgerError> {
            let v = get(k)?;
            v.parse().map_err(|_| field(k, format!("'{v}' is not a non-negative integer")))
        };
        if let Some(extra) =
            fields.keys().find(|k| !matches!(**k, "lower" | "upper" | "status" | "method" | "cert" | "time"))
        {
            return Err(field(extra, "unknown field".into()));
        }
        let cert = get("cert")?;
        Ok(LedgerEntry {
            key,
            lower: num("lower")?,
            upper: num("upper")?,
            status: parse_status(get("status")?).map_err(|m| field("status", m))?,
            method: get("method")?.parse().map_err(|m| field("method", m))?,
            certificate: (cert != "-").then(|| PathBuf::from(cert)),
            timestamp: get("time")?.to_string(),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    entries: BTreeMap<LedgerKey, LedgerEntry>,
}

impl Ledger {
    pub fn entries(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.values()
    }

    pub fn get(&self, key: &LedgerKey) -> Option<&LedgerEntry> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts or replaces the entry for its key.
    pub fn upsert(&mut self, entry: LedgerEntry) -> Result<(), LedgerError> {
        let bad = |msg: &str| LedgerError::Invalid { key: entry.key.to_string(), msg: msg.into() };
        if let Some(p) = &entry.certificate {
            if p.as_os_str().is_empty() || p.display().to_string().contains(char::is_whitespace) {
                return Err(bad("certificate path must be non-empty and contain no whitespace"));
            }
        }
        if entry.timestamp.is_empty() || entry.timestamp.contains(char::is_whitespace) {
            return Err(bad("timestamp must be a single non-empty token"));
        }
        self.entries.insert(entry.key, entry);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, LedgerError> {
        let mut ledger = Ledger::default();
        let mut saw_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != LEDGER_HEADER {
                    return Err(LedgerError::Parse {
                        line: line_no,
                        msg: format!("expected header '{LEDGER_HEADER}'"),
                    });
                }
                saw_header = true;
                continue;
            }
            let entry = LedgerEntry::from_line(line, line_no)?;
            if ledger.entries.contains_key(&entry.key) {
                return Err(LedgerError::Field {
                    line: line_no,
                    entry: entry.key.to_string(),
                    key: "key".into(),
                    msg: "duplicate entry".into(),
                });
            }
            ledger.entries.insert(entry.key, entry);
        }
        Ok(ledger)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{LEDGER_HEADER}\n");
        for e in self.entries.values() {
            out.push_str(&e.to_line());
            out.push('\n');
        }
        out
    }

    /// Reads a ledger file; a missing or empty file is an empty ledger.
    pub fn load(path: &Path) -> Result<Self, LedgerError> {
        match fs::read_to_string(path) {
            Ok(text) => Ledger::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Ledger::default()),
            Err(e) => Err(LedgerError::Io(format!("{}: {e}", path.display()))),
        }
    }

    /// Writes atomically via a sibling temporary file.
    pub fn save(&self, path: &Path) -> Result<(), LedgerError> {
        let io = |e: std::io::Error| LedgerError::Io(format!("{}: {e}", path.display()));
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        std::io::Write::write_all(&mut tmp, self.to_text().as_bytes()).map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }
}

/// Resolves an entry's certificate path against the ledger file location.
pub fn resolve_certificate(ledger_path: &Path, cert: &Path) -> PathBuf {
    if cert.is_absolute() {
        cert.to_path_buf()
    } else {
        ledger_path.parent().unwrap_or(Path::new("")).join(cert)
    }
}

/// Advisory lock held as `<ledger>.lock`; released on drop.
#[derive(Debug)]
pub struct LedgerLock {
    path: PathBuf,
}

impl LedgerLock {
    /// Fails immediately if another writer holds the lock.
    pub fn acquire(ledger_path: &Path) -> Result<Self, LedgerError> {
        let mut name = ledger_path.as_os_str().to_owned();
        name.push(".lock");
        let path = PathBuf::from(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(LedgerLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(LedgerError::Locked(path)),
            Err(e) => Err(LedgerError::Io(format!("{}: {e}", path.display()))),
        }
    }
}

impl Drop for LedgerLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(b: usize, k: usize, n: usize, lower: usize) -> LedgerEntry {
        LedgerEntry {
            key: LedgerKey { b, k, n },
            lower,
            upper: lower,
            status: SizeStatus::Exact,
            certificate: Some(PathBuf::from(format!("certs/b{b}k{k}n{n}.code"))),
            method: Method::Search,
            timestamp: "2026-01-01T00:00:00Z".into(),
        }
    }

    #[test]
    fn empty_and_round_trip() {
        assert!(Ledger::parse("").unwrap().is_empty());
        assert!(Ledger::parse("triff-ledger v1\n").unwrap().is_empty());
        let mut l = Ledger::default();
        l.upsert(entry(3, 3, 4, 9)).unwrap();
        l.upsert(entry(3, 3, 1, 3)).unwrap();
        let mut bounded = entry(3, 3, 6, 13);
        bounded.upper = 729;
        bounded.status = SizeStatus::Bounded;
        bounded.certificate = None;
        bounded.method = Method::ExternalSolver;
        l.upsert(bounded).unwrap();
        let text = l.to_text();
        assert_eq!(text.lines().nth(1).unwrap().split(' ').next(), Some("3,3,1"));
        assert!(text.contains("cert=- "));
        let back = Ledger::parse(&text).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn errors_name_the_key() {
        let bad = "triff-ledger v1\n3,3,4 lower=nine upper=9 status=exact method=search cert=- time=t\n";
        match Ledger::parse(bad).unwrap_err() {
            LedgerError::Field { line, entry, key, .. } => {
                assert_eq!((line, entry.as_str(), key.as_str()), (2, "3,3,4", "lower"))
            }
            e => panic!("{e:?}"),
        }
        let missing = "triff-ledger v1\n3,3,4 lower=9 status=exact method=search cert=- time=t\n";
        assert!(matches!(Ledger::parse(missing), Err(LedgerError::Field { ref key, .. }) if key == "upper"));
        assert!(matches!(Ledger::parse("triff-ledger v2\n"), Err(LedgerError::Parse { line: 1, .. })));
        let dup = "triff-ledger v1\n3,3,1 lower=3 upper=3 status=exact method=oracle cert=a time=t\n3,3,1 lower=3 upper=3 status=exact method=oracle cert=a time=t\n";
        assert!(Ledger::parse(dup).is_err());
        let status = "triff-ledger v1\n3,3,1 lower=3 upper=3 status=maybe method=oracle cert=a time=t\n";
        assert!(matches!(Ledger::parse(status), Err(LedgerError::Field { ref key, .. }) if key == "status"));
    }

    #[test]
    fn entry_problems() {
        assert!(entry(3, 3, 1, 3).problems().is_empty());
        let mut e = entry(3, 3, 1, 3);
        e.upper = 2;
        assert_eq!(e.problems().len(), 2);
        e.upper = 4;
        assert_eq!(e.problems().len(), 1);
        e.certificate = None;
        assert_eq!(e.problems().len(), 2);
    }

    #[test]
    fn file_io_and_lock() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.txt");
        assert!(Ledger::load(&path).unwrap().is_empty());
        let mut l = Ledger::default();
        l.upsert(entry(3, 3, 2, 4)).unwrap();
        l.save(&path).unwrap();
        assert_eq!(Ledger::load(&path).unwrap(), l);
        let lock = LedgerLock::acquire(&path).unwrap();
        assert!(matches!(LedgerLock::acquire(&path), Err(LedgerError::Locked(_))));
        drop(lock);
        assert!(LedgerLock::acquire(&path).is_ok());
        assert_eq!(resolve_certificate(&path, Path::new("c.code")), dir.path().join("c.code"));
    }

    #[test]
    fn rejects_unsavable_entries() {
        let mut e = entry(3, 3, 1, 3);
        e.certificate = Some(PathBuf::from("a b"));
        assert!(Ledger::default().upsert(e).is_err());
    }
}
