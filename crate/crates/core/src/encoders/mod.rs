//! Solver encodings of "is there a (b,k)-hash code with m words of length n".
//!
//! Two document kinds are produced: DIMACS CNF with a one-hot cell encoding and
//! SMT-LIB2 over integer cells. Both embed their variable map as comment lines
//! so a document can be decoded later without any side channel.

pub mod cnf;
pub mod dpll;
pub mod external;
pub mod smtlib;

use std::fmt;

use thiserror::Error;

use crate::hashcore::{first_violation, Code, CodeParams, HashError, Word};

pub use cnf::emit_dimacs;
pub use smtlib::emit_smtlib;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("need at least k = {k} rows, got m = {m}")]
    TooFewRows { m: usize, k: usize },
    #[error("malformed document (line {line}): {msg}")]
    Document { line: usize, msg: String },
    #[error("malformed model: {0}")]
    Model(String),
    #[error("no model present")]
    NoModel,
    #[error("cell (row {row}, col {col}) is not exactly one-hot")]
    NotOneHot { row: usize, col: usize },
    #[error("cell (row {row}, col {col}) has value {value} outside 0..{b}")]
    ValueOutOfRange { row: usize, col: usize, value: i64, b: usize },
    #[error("model assigns no value to {0}")]
    MissingCell(String),
    #[error("decoded code fails verification ({0}); this indicates an encoder bug")]
    Verification(String),
    #[error("code does not fit the document: {0}")]
    Shape(String),
    #[error("external solver: {0}")]
    Solver(String),
    #[error(transparent)]
    Hash(#[from] HashError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DocKind {
    Cnf,
    SmtLib2,
}

impl fmt::Display for DocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocKind::Cnf => "dimacs",
            DocKind::SmtLib2 => "smtlib2",
        })
    }
}

impl std::str::FromStr for DocKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dimacs" | "cnf" => Ok(DocKind::Cnf),
            "smtlib2" | "smt" | "smtlib" => Ok(DocKind::SmtLib2),
            _ => Err(format!("unknown format '{s}' (expected dimacs or smtlib2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AuxKind {
    /// Implies that rows `p` and `q` differ in column `col`.
    Pair { p: usize, q: usize, col: usize },
    /// Implies that the rows of a k-subset are pairwise distinct in column `col`.
    Subset { rows: Vec<usize>, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AuxVar {
    pub id: u32,
    pub kind: AuxKind,
}

/// Where each matrix cell lives in a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarMap {
    /// `primary[(i * n + j) * b + s]` is the DIMACS variable for "cell (i,j) holds s".
    Cnf { params: CodeParams, rows: usize, primary: Vec<u32>, aux: Vec<AuxVar> },
    /// `cells[i * n + j]` is the integer constant holding cell (i,j).
    Smt { params: CodeParams, rows: usize, cells: Vec<String> },
}

impl VarMap {
    pub fn params(&self) -> &CodeParams {
        match self {
            VarMap::Cnf { params, .. } | VarMap::Smt { params, .. } => params,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            VarMap::Cnf { rows, .. } | VarMap::Smt { rows, .. } => *rows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintDocument {
    pub kind: DocKind,
    pub text: String,
    pub varmap: VarMap,
}

impl ConstraintDocument {
    /// Re-reads an emitted document, recovering the variable map from its comments.
    pub fn parse(text: &str) -> Result<Self, EncodeError> {
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        if first.starts_with("c ") {
            cnf::parse_document(text)
        } else if first.starts_with(';') {
            smtlib::parse_document(text)
        } else {
            Err(EncodeError::Document { line: 1, msg: "not an emitted dimacs or smtlib2 document".into() })
        }
    }
}

/// Turns a solver's model output for `doc` into a verified code.
pub fn decode_assignment(doc: &ConstraintDocument, model: &str) -> Result<Code, EncodeError> {
    let matrix = match doc.kind {
        DocKind::Cnf => cnf::decode_matrix(&doc.varmap, model)?,
        DocKind::SmtLib2 => smtlib::decode_matrix(&doc.varmap, model)?,
    };
    let params = *doc.varmap.params();
    let words = matrix.into_iter().map(|row| Word::new(row, params.b())).collect::<Result<Vec<_>, _>>()?;
    let code = Code::new(params, words).map_err(|e| EncodeError::Verification(e.to_string()))?;
    if let Some(t) = first_violation(&code) {
        return Err(EncodeError::Verification(format!("rows {t:?} are not hashed")));
    }
    Ok(code)
}

/// The model text a solver would print for the assignment that puts `code`
/// into the matrix (rows in code order) and sets every auxiliary variable to
/// the value of its defining condition.
pub fn forced_assignment(doc: &ConstraintDocument, code: &Code) -> Result<String, EncodeError> {
    let params = doc.varmap.params();
    if code.params() != params {
        return Err(EncodeError::Shape(format!("code has {}, document has {params}", code.params())));
    }
    if code.len() != doc.varmap.rows() {
        return Err(EncodeError::Shape(format!(
            "code has {} words, document has {} rows",
            code.len(),
            doc.varmap.rows()
        )));
    }
    let rows: Vec<&[u8]> = code.words().iter().map(|w| w.symbols()).collect();
    Ok(match doc.kind {
        DocKind::Cnf => cnf::model_text(&cnf::forced_values(&doc.varmap, &rows)),
        DocKind::SmtLib2 => smtlib::model_text(&doc.varmap, &rows),
    })
}

pub(crate) fn check_rows(params: &CodeParams, m: usize) -> Result<(), EncodeError> {
    if m < params.k() {
        return Err(EncodeError::TooFewRows { m, k: params.k() });
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(11, 3), 165);
        assert_eq!(binomial(11, 2), 55);
        assert_eq!(binomial(3, 3), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(5, 0), 1);
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("dimacs".parse::<DocKind>(), Ok(DocKind::Cnf));
        assert_eq!("smtlib2".parse::<DocKind>(), Ok(DocKind::SmtLib2));
        assert!("xml".parse::<DocKind>().is_err());
    }

    #[test]
    fn unknown_document_rejected() {
        assert!(ConstraintDocument::parse("hello").is_err());
    }
}
