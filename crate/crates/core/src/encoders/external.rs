//! Running an external DIMACS solver named by `TRIFF_SAT_SOLVER`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use super::{ConstraintDocument, DocKind, EncodeError};

pub const SOLVER_ENV: &str = "TRIFF_SAT_SOLVER";

/// The configured solver executable, if any.
pub fn solver_from_env() -> Option<PathBuf> {
    std::env::var_os(SOLVER_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Outcome of an external run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat(String),
    Unsat,
    Unknown(String),
}

/// Writes the document to a temporary file, runs `solver <file>` and reads
/// the `s` line from its standard output. Solver exit codes are ignored since
/// the common convention (10/20) is not an error signal.
pub fn run_solver(solver: &Path, doc: &ConstraintDocument) -> Result<SolverAnswer, EncodeError> {
    if doc.kind != DocKind::Cnf {
        return Err(EncodeError::Solver("only dimacs documents can be sent to the external solver".into()));
    }
    let mut file = tempfile::Builder::new()
        .prefix("triff-")
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| EncodeError::Solver(format!("temporary file: {e}")))?;
    file.write_all(doc.text.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| EncodeError::Solver(format!("temporary file: {e}")))?;
    let output = Command::new(solver)
        .arg(file.path())
        .output()
        .map_err(|e| EncodeError::Solver(format!("cannot run {}: {e}", solver.display())))?;
    let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
    let status = stdout.lines().find_map(|l| l.trim().strip_prefix("s ").map(|s| s.trim().to_string()));
    Ok(match status.as_deref() {
        Some("SATISFIABLE") => SolverAnswer::Sat(stdout),
        Some("UNSATISFIABLE") => SolverAnswer::Unsat,
        _ => SolverAnswer::Unknown(stdout),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::{decode_assignment, emit_dimacs, emit_smtlib};
    use crate::hashcore::CodeParams;

    #[test]
    fn rejects_smtlib_documents() {
        let doc = emit_smtlib(&CodeParams::new(3, 3, 1).unwrap(), 3).unwrap();
        assert!(run_solver(Path::new("/bin/true"), &doc).is_err());
    }

    #[cfg(unix)]
    #[test]
    fn script_solver_round_trip() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("solver.sh");
        std::fs::write(
            &path,
            "#!/bin/sh\ntest -s \"$1\" || exit 1\necho 's SATISFIABLE'\necho 'v 1 -2 -3 -4 5 -6 -7 -8 9 10 11 12 13 0'\nexit 10\n",
        )
        .unwrap();
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
        let params = CodeParams::new(3, 3, 1).unwrap();
        let doc = emit_dimacs(&params, 3).unwrap();
        match run_solver(&path, &doc).unwrap() {
            SolverAnswer::Sat(out) => assert_eq!(decode_assignment(&doc, &out).unwrap().len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_solver_is_an_error() {
        let doc = emit_dimacs(&CodeParams::new(3, 3, 1).unwrap(), 3).unwrap();
        assert!(run_solver(Path::new("/nonexistent/solver"), &doc).is_err());
    }
}
