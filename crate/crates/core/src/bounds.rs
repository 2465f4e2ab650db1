//! Asymptotic bound formulas with caller-supplied constants, and a
//! consistency check of the results ledger.
//!
//! The constants are configuration. The shipped defaults are illustrative
//! only and are not calibrated against any published value.

use std::fmt;
use std::path::Path;

use num_traits::Float;
use thiserror::Error;

use crate::hashcore::{first_violation, Code, CodeParams};
use crate::ledger::{resolve_certificate, Ledger, LedgerKey};
use crate::searcher::{brute_force_max, max_size, SearchConfig, SizeStatus, MAX_ORACLE_WORDS};

fn lit<F: Float>(x: f64) -> F {
    F::from(x).expect("literal representable in the scalar type")
}

/// `C * (3/2)^n`.
pub fn classic_upper<F: Float>(n: u32, c: F) -> F {
    c * lit::<F>(1.5).powi(n as i32)
}

/// `C * n^(-2/5) * (3/2)^n`.
pub fn improved_upper<F: Float>(n: u32, c: F) -> F {
    let nf: F = lit(n as f64);
    c * nf.powf(lit(-0.4)) * lit::<F>(1.5).powi(n as i32)
}

/// `C * (9/5)^(n/4)`.
pub fn km_lower<F: Float>(n: u32, c: F) -> F {
    c * lit::<F>(1.8).powf(lit::<F>(n as f64) / lit(4.0))
}

#[derive(Debug, Error, PartialEq)]
#[error("constant {name} must be strictly positive and finite, got {value}")]
pub struct BoundError {
    pub name: &'static str,
    pub value: f64,
}

/// The three constants used when evaluating the formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundProfile<F> {
    c_upper: F,
    c_improved: F,
    c_lower: F,
}

/// Values of the three formulas at one length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValues<F> {
    pub n: u32,
    pub classic_upper: F,
    pub improved_upper: F,
    pub km_lower: F,
}

impl<F: Float> BoundProfile<F> {
    pub fn new(c_upper: F, c_improved: F, c_lower: F) -> Result<Self, BoundError> {
        for (name, v) in [("C_upper", c_upper), ("C_improved", c_improved), ("C_lower", c_lower)] {
            if !(v > F::zero() && v.is_finite()) {
                return Err(BoundError { name, value: v.to_f64().unwrap_or(f64::NAN) });
            }
        }
        Ok(BoundProfile { c_upper, c_improved, c_lower })
    }

    /// Illustrative defaults: 2 for the classic bound, 1 for the other two.
    pub fn illustrative() -> Self {
        BoundProfile { c_upper: lit(2.0), c_improved: F::one(), c_lower: F::one() }
    }

    pub fn c_upper(&self) -> F {
        self.c_upper
    }

    pub fn c_improved(&self) -> F {
        self.c_improved
    }

    pub fn c_lower(&self) -> F {
        self.c_lower
    }

    pub fn evaluate(&self, n: u32) -> BoundValues<F> {
        BoundValues {
            n,
            classic_upper: classic_upper(n, self.c_upper),
            improved_upper: improved_upper(n, self.c_improved),
            km_lower: km_lower(n, self.c_lower),
        }
    }
}

impl<F: Float> Default for BoundProfile<F> {
    fn default() -> Self {
        Self::illustrative()
    }
}

impl<F: Float + fmt::Display> fmt::Display for BoundValues<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} classic_upper={:.6} (floor {}) improved_upper={:.6} (floor {}) km_lower={:.6} (ceil {})",
            self.n,
            self.classic_upper,
            self.classic_upper.floor(),
            self.improved_upper,
            self.improved_upper.floor(),
            self.km_lower,
            self.km_lower.ceil()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Inconsistent,
    Note,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerIssue {
    pub key: LedgerKey,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for LedgerIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Inconsistent => "INCONSISTENT",
            Severity::Note => "note",
        };
        write!(f, "{} {}: {}", tag, self.key, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LedgerReport {
    pub checked: usize,
    pub issues: Vec<LedgerIssue>,
}

impl LedgerReport {
    pub fn is_consistent(&self) -> bool {
        self.issues.iter().all(|i| i.severity != Severity::Inconsistent)
    }
}

/// Checks every entry: ordering of bounds, certificate validity and size,
/// and (when `recompute` is given) agreement with a fresh computation.
/// Problems are collected in the report, never raised.
pub fn ledger_check(ledger: &Ledger, ledger_path: &Path, recompute: Option<&SearchConfig>) -> LedgerReport {
    let mut report = LedgerReport::default();
    for entry in ledger.entries() {
        report.checked += 1;
        let key = entry.key;
        let mut flag = |severity, message: String| report.issues.push(LedgerIssue { key, severity, message });
        for p in entry.problems() {
            flag(Severity::Inconsistent, p);
        }
        let params = match CodeParams::new(key.b, key.k, key.n) {
            Ok(p) => p,
            Err(e) => {
                flag(Severity::Inconsistent, format!("invalid parameters: {e}"));
                continue;
            }
        };
        if (entry.upper as u128) > params.word_count() {
            flag(Severity::Inconsistent, format!("upper {} exceeds b^n = {}", entry.upper, params.word_count()));
        }
        if let Some(cert) = &entry.certificate {
            let path = resolve_certificate(ledger_path, cert);
            match std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|t| Code::parse(&t).map_err(|e| e.to_string()))
            {
                Err(e) => flag(Severity::Inconsistent, format!("certificate {}: {e}", path.display())),
                Ok(code) => {
                    if *code.params() != params {
                        flag(Severity::Inconsistent, format!("certificate has {}, entry is {params}", code.params()));
                    } else if let Some(t) = first_violation(&code) {
                        flag(Severity::Inconsistent, format!("certificate fails verification at rows {t:?}"));
                    } else if code.len() != entry.lower {
                        flag(
                            Severity::Inconsistent,
                            format!("certificate has {} words, lower is {}", code.len(), entry.lower),
                        );
                    }
                }
            }
        }
        if let Some(config) = recompute {
            let fresh = if params.word_count() <= MAX_ORACLE_WORDS {
                brute_force_max(&params).map(|(size, _)| (size, SizeStatus::Exact))
            } else {
                max_size(&params, config).map(|r| (r.lower, r.status))
            };
            match fresh {
                Err(e) => flag(Severity::Note, format!("not recomputed: {e}")),
                Ok((value, SizeStatus::Exact)) => {
                    if value < entry.lower || value > entry.upper {
                        flag(
                            Severity::Inconsistent,
                            format!("recomputed maximum {value} outside [{}, {}]", entry.lower, entry.upper),
                        );
                    }
                }
                Ok((lower, SizeStatus::Bounded)) => {
                    if lower > entry.upper {
                        flag(
                            Severity::Inconsistent,
                            format!("recomputed lower bound {lower} exceeds upper {}", entry.upper),
                        );
                    } else {
                        flag(Severity::Note, format!("recomputation hit its budget at lower bound {lower}"));
                    }
                }
            }
        }
    }
    report
}
