//! SMT-LIB2 document over integer cells `x_i_j`, plus a strict template
//! validator and a small native model finder for tiny instances.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;

use super::{check_rows, ConstraintDocument, DocKind, EncodeError, VarMap};
use crate::hashcore::CodeParams;
use crate::sexpr::{parse_all, Sexp};

/// Upper limit on `b^(m*n)` for [`find_model`].
pub const MODEL_SEARCH_GUARD: f64 = 1e8;

fn cell_name(i: usize, j: usize) -> String {
    format!("x_{i}_{j}")
}

pub fn emit_smtlib(params: &CodeParams, m: usize) -> Result<ConstraintDocument, EncodeError> {
    check_rows(params, m)?;
    let (b, k, n) = (params.b(), params.k(), params.n());
    let mut cells = Vec::with_capacity(m * n);
    let mut text = format!("; triff smtlib2 {params} m={m}\n");
    for i in 0..m {
        for j in 0..n {
            let name = cell_name(i, j);
            writeln!(text, "; map {name} row {i} col {j}").unwrap();
            cells.push(name);
        }
    }
    for name in &cells {
        writeln!(text, "(declare-const {name} Int)").unwrap();
    }
    for name in &cells {
        writeln!(text, "(assert (and (<= 0 {name}) (<= {name} {})))", b - 1).unwrap();
    }
    for rows in (0..m).combinations(k) {
        let per_col: Vec<String> =
            (0..n).map(|j| format!("(distinct {})", rows.iter().map(|&i| cell_name(i, j)).join(" "))).collect();
        if n == 1 {
            writeln!(text, "(assert {})", per_col[0]).unwrap();
        } else {
            writeln!(text, "(assert (or {}))", per_col.join(" ")).unwrap();
        }
    }
    text.push_str("(check-sat)\n(get-model)\n");
    Ok(ConstraintDocument { kind: DocKind::SmtLib2, text, varmap: VarMap::Smt { params: *params, rows: m, cells } })
}

/// Accepts only documents whose command sequence is exactly what
/// [`emit_smtlib`] produces for the parameters named in the header.
pub(crate) fn parse_document(text: &str) -> Result<ConstraintDocument, EncodeError> {
    let err = |line: usize, msg: String| EncodeError::Document { line, msg };
    let mut header = None;
    let mut map: BTreeMap<(usize, usize), String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.as_slice() {
            [";", "triff", "smtlib2", fields @ ..] => {
                header = Some(super::cnf::parse_fields(fields).map_err(|m| err(idx + 1, m))?);
            }
            [";", "map", name, "row", i, "col", j] => {
                let num = |t: &str| t.parse::<usize>().map_err(|_| err(idx + 1, format!("bad number '{t}'")));
                map.insert((num(i)?, num(j)?), name.to_string());
            }
            _ => {}
        }
    }
    let (params, m) = header.ok_or_else(|| err(0, "missing '; triff smtlib2' line".into()))?;
    let expected = emit_smtlib(&params, m).map_err(|e| err(0, e.to_string()))?;
    let VarMap::Smt { cells, .. } = &expected.varmap else { unreachable!() };
    for i in 0..m {
        for j in 0..params.n() {
            match map.get(&(i, j)) {
                Some(name) if *name == cells[i * params.n() + j] => {}
                Some(name) => return Err(err(0, format!("map line for row {i} col {j} names '{name}'"))),
                None => return Err(err(0, format!("no map line for row {i} col {j}"))),
            }
        }
    }
    if map.len() != cells.len() {
        return Err(err(0, format!("{} map lines for {} cells", map.len(), cells.len())));
    }
    let got = parse_all(text).map_err(|e| err(e.line, e.msg))?;
    let want = parse_all(&expected.text).expect("emitted text parses");
    for (pos, (line, cmd)) in got.iter().enumerate() {
        if let Some(h) = cmd.head() {
            if !matches!(h, "declare-const" | "assert" | "check-sat" | "get-model") {
                return Err(err(*line, format!("command '{h}' is not allowed")));
            }
        }
        match want.get(pos) {
            Some((_, w)) if w == cmd => {}
            Some((_, w)) => return Err(err(*line, format!("expected {w}, found {cmd}"))),
            None => return Err(err(*line, format!("unexpected trailing command {cmd}"))),
        }
    }
    if got.len() != want.len() {
        return Err(err(0, format!("document has {} commands, template has {}", got.len(), want.len())));
    }
    Ok(ConstraintDocument { kind: DocKind::SmtLib2, text: text.to_string(), varmap: expected.varmap })
}

/// Command counts of a document: (declare-const, assert, check-sat, get-model).
pub fn command_counts(text: &str) -> Result<[usize; 4], EncodeError> {
    let all = parse_all(text).map_err(|e| EncodeError::Document { line: e.line, msg: e.msg })?;
    let mut counts = [0; 4];
    for (_, cmd) in &all {
        match cmd.head() {
            Some("declare-const") => counts[0] += 1,
            Some("assert") => counts[1] += 1,
            Some("check-sat") => counts[2] += 1,
            Some("get-model") => counts[3] += 1,
            _ => {}
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone)]
enum Term {
    Var(usize),
    Const(i64),
}

#[derive(Debug, Clone)]
enum Expr {
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Distinct(Vec<Term>),
    Le(Term, Term),
}

impl Expr {
    fn max_var(&self) -> Option<usize> {
        let term = |t: &Term| match t {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        };
        match self {
            Expr::And(es) | Expr::Or(es) => es.iter().filter_map(Expr::max_var).max(),
            Expr::Distinct(ts) => ts.iter().filter_map(term).max(),
            Expr::Le(a, b) => term(a).max(term(b)),
        }
    }

    fn eval(&self, vals: &[i64]) -> bool {
        let t = |t: &Term| match t {
            Term::Var(v) => vals[*v],
            Term::Const(c) => *c,
        };
        match self {
            Expr::And(es) => es.iter().all(|e| e.eval(vals)),
            Expr::Or(es) => es.iter().any(|e| e.eval(vals)),
            Expr::Distinct(ts) => ts.iter().map(t).all_unique(),
            Expr::Le(a, b) => t(a) <= t(b),
        }
    }
}

fn compile(e: &Sexp, vars: &BTreeMap<&str, usize>) -> Result<Expr, EncodeError> {
    let bad = || EncodeError::Document { line: 0, msg: format!("unsupported expression {e}") };
    let term = |s: &Sexp| -> Result<Term, EncodeError> {
        let a = s.atom().ok_or_else(bad)?;
        if let Some(&v) = vars.get(a) {
            Ok(Term::Var(v))
        } else {
            a.parse().map(Term::Const).map_err(|_| bad())
        }
    };
    let items = e.list().ok_or_else(bad)?;
    let args = &items[1..];
    Ok(match e.head().ok_or_else(bad)? {
        "and" => Expr::And(args.iter().map(|a| compile(a, vars)).collect::<Result<_, _>>()?),
        "or" => Expr::Or(args.iter().map(|a| compile(a, vars)).collect::<Result<_, _>>()?),
        "distinct" => Expr::Distinct(args.iter().map(term).collect::<Result<_, _>>()?),
        "<=" if args.len() == 2 => Expr::Le(term(&args[0])?, term(&args[1])?),
        _ => return Err(bad()),
    })
}

/// Decides the document's satisfiability by backtracking over cell values,
/// checking each assertion as soon as its last cell is set. Returns the
/// first model in row-major lexicographic order.
pub fn find_model(doc: &ConstraintDocument) -> Result<Option<Vec<Vec<u8>>>, EncodeError> {
    let VarMap::Smt { params, rows, cells } = &doc.varmap else {
        return Err(EncodeError::Document { line: 0, msg: "not an smtlib2 document".into() });
    };
    let b = params.b();
    if (b as f64).powi(cells.len() as i32) > MODEL_SEARCH_GUARD {
        return Err(EncodeError::Solver(format!(
            "{b}^{} assignments exceed the bundled evaluator's limit",
            cells.len()
        )));
    }
    let vars: BTreeMap<&str, usize> = cells.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut checks: Vec<Vec<Expr>> = vec![Vec::new(); cells.len()];
    for (_, cmd) in parse_all(&doc.text).map_err(|e| EncodeError::Document { line: e.line, msg: e.msg })? {
        if cmd.head() == Some("assert") {
            let body = cmd
                .list()
                .and_then(|l| l.get(1))
                .ok_or(EncodeError::Document { line: 0, msg: "empty assert".into() })?;
            let expr = compile(body, &vars)?;
            let last = expr.max_var().unwrap_or(0);
            checks[last].push(expr);
        }
    }
    let mut vals = vec![0i64; cells.len()];
    fn go(pos: usize, b: usize, vals: &mut [i64], checks: &[Vec<Expr>]) -> bool {
        if pos == vals.len() {
            return true;
        }
        for v in 0..b as i64 {
            vals[pos] = v;
            if checks[pos].iter().all(|e| e.eval(vals)) && go(pos + 1, b, vals, checks) {
                return true;
            }
        }
        false
    }
    if !go(0, b, &mut vals, &checks) {
        return Ok(None);
    }
    let n = params.n();
    Ok(Some((0..*rows).map(|i| (0..n).map(|j| vals[i * n + j] as u8).collect()).collect()))
}

/// Extracts `(define-fun name () Int value)` bindings from get-model output.
pub fn parse_model(model: &str) -> Result<BTreeMap<String, i64>, EncodeError> {
    let all = parse_all(model).map_err(|e| EncodeError::Model(format!("line {}: {}", e.line, e.msg)))?;
    let mut status = None;
    let mut values = BTreeMap::new();
    fn collect(e: &Sexp, out: &mut BTreeMap<String, i64>) -> Result<(), EncodeError> {
        let Some(items) = e.list() else { return Ok(()) };
        if e.head() == Some("define-fun") {
            let bad = || EncodeError::Model(format!("unsupported binding {e}"));
            let [_, name, _, _, value] = items else { return Err(bad()) };
            let value = match value {
                Sexp::Atom(a) => a.parse::<i64>().map_err(|_| bad())?,
                Sexp::List(l) => match l.as_slice() {
                    [Sexp::Atom(minus), Sexp::Atom(a)] if minus == "-" => -a.parse::<i64>().map_err(|_| bad())?,
                    _ => return Err(bad()),
                },
            };
            out.insert(name.atom().ok_or_else(bad)?.to_string(), value);
            return Ok(());
        }
        items.iter().try_for_each(|i| collect(i, out))
    }
    for (_, e) in &all {
        match e {
            Sexp::Atom(a) if status.is_none() => status = Some(a.clone()),
            _ => collect(e, &mut values)?,
        }
    }
    match status.as_deref() {
        Some("unsat") => Err(EncodeError::NoModel),
        Some("sat") | None if !values.is_empty() => Ok(values),
        Some(s) if s != "sat" => Err(EncodeError::Model(format!("solver status '{s}'"))),
        _ => Err(EncodeError::NoModel),
    }
}

pub(crate) fn decode_matrix(varmap: &VarMap, model: &str) -> Result<Vec<Vec<u8>>, EncodeError> {
    let VarMap::Smt { params, rows, cells } = varmap else {
        return Err(EncodeError::Model("variable map is not an smtlib2 map".into()));
    };
    let values = parse_model(model)?;
    let (b, n) = (params.b(), params.n());
    (0..*rows)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let name = &cells[i * n + j];
                    let v = *values.get(name).ok_or_else(|| EncodeError::MissingCell(name.clone()))?;
                    if !(0..b as i64).contains(&v) {
                        return Err(EncodeError::ValueOutOfRange { row: i, col: j, value: v, b });
                    }
                    Ok(v as u8)
                })
                .collect()
        })
        .collect()
}

pub(crate) fn model_text(varmap: &VarMap, rows: &[&[u8]]) -> String {
    let VarMap::Smt { params, cells, .. } = varmap else {
        unreachable!("model_text on a non-smtlib2 map");
    };
    let n = params.n();
    let mut out = String::from("sat\n(\n");
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            writeln!(out, "  (define-fun {} () Int {v})", cells[i * n + j]).unwrap();
        }
    }
    out.push_str(")\n");
    out
}
