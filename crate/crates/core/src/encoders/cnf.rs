//! DIMACS CNF with one-hot cells and single-polarity Tseitin auxiliaries.
//!
//! Variables, in this order:
//! * `v[i][j][s]`: row i, column j holds symbol s (row-major, then symbol);
//! * `e[p][q][j]`: rows p < q differ in column j (pairs in lexicographic order);
//! * `a[t][j]`: the rows of the t-th k-subset are pairwise distinct in column j.
//!
//! Clauses: per cell one at-least-one clause and the pairwise at-most-one
//! clauses; `(-e | -v[p][j][s] | -v[q][j][s])` for every symbol;
//! `(-a | e[p][q][j])` for every pair inside the subset; and per k-subset the
//! disjunction of its `a[t][j]` over all columns. Only the implications towards
//! the positive occurrences are emitted.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;

use super::{binomial, check_rows, AuxKind, AuxVar, ConstraintDocument, DocKind, EncodeError, VarMap};
use crate::hashcore::CodeParams;

/// A parsed DIMACS formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

/// Variable and clause totals of the encoding, by formula.
pub fn expected_counts(params: &CodeParams, m: usize) -> (usize, usize) {
    let (b, k, n) = (params.b(), params.k(), params.n());
    let pairs = binomial(m, 2);
    let subsets = binomial(m, k);
    let vars = m * n * b + pairs * n + subsets * n;
    let clauses = m * n * (1 + binomial(b, 2)) + pairs * n * b + subsets * n * binomial(k, 2) + subsets;
    (vars, clauses)
}

pub fn emit_dimacs(params: &CodeParams, m: usize) -> Result<ConstraintDocument, EncodeError> {
    check_rows(params, m)?;
    let (b, k, n) = (params.b(), params.k(), params.n());
    let prim = |i: usize, j: usize, s: usize| ((i * n + j) * b + s + 1) as u32;
    let pairs: Vec<(usize, usize)> = (0..m).tuple_combinations().collect();
    let mut pair_index = vec![usize::MAX; m * m];
    for (idx, &(p, q)) in pairs.iter().enumerate() {
        pair_index[p * m + q] = idx;
    }
    let e_base = m * n * b;
    let edge = |p: usize, q: usize, j: usize| (e_base + pair_index[p * m + q] * n + j + 1) as u32;
    let subsets: Vec<Vec<usize>> = (0..m).combinations(k).collect();
    let a_base = e_base + pairs.len() * n;
    let sub = |t: usize, j: usize| (a_base + t * n + j + 1) as u32;

    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for i in 0..m {
        for j in 0..n {
            clauses.push((0..b).map(|s| prim(i, j, s) as i32).collect());
            for (s, t) in (0..b).tuple_combinations() {
                clauses.push(vec![-(prim(i, j, s) as i32), -(prim(i, j, t) as i32)]);
            }
        }
    }
    for &(p, q) in &pairs {
        for j in 0..n {
            for s in 0..b {
                clauses.push(vec![-(edge(p, q, j) as i32), -(prim(p, j, s) as i32), -(prim(q, j, s) as i32)]);
            }
        }
    }
    for (t, rows) in subsets.iter().enumerate() {
        for j in 0..n {
            for (&p, &q) in rows.iter().tuple_combinations() {
                clauses.push(vec![-(sub(t, j) as i32), edge(p, q, j) as i32]);
            }
        }
    }
    for t in 0..subsets.len() {
        clauses.push((0..n).map(|j| sub(t, j) as i32).collect());
    }

    let mut primary = Vec::with_capacity(m * n * b);
    let mut text = format!("c triff dimacs {params} m={m}\n");
    for i in 0..m {
        for j in 0..n {
            for s in 0..b {
                let id = prim(i, j, s);
                primary.push(id);
                writeln!(text, "c map v {id} row {i} col {j} sym {s}").unwrap();
            }
        }
    }
    let mut aux = Vec::with_capacity(pairs.len() * n + subsets.len() * n);
    for &(p, q) in &pairs {
        for j in 0..n {
            let id = edge(p, q, j);
            writeln!(text, "c aux e {id} pair {p} {q} col {j}").unwrap();
            aux.push(AuxVar { id, kind: AuxKind::Pair { p, q, col: j } });
        }
    }
    for (t, rows) in subsets.iter().enumerate() {
        for j in 0..n {
            let id = sub(t, j);
            writeln!(text, "c aux a {id} subset {} col {j}", rows.iter().join(" ")).unwrap();
            aux.push(AuxVar { id, kind: AuxKind::Subset { rows: rows.clone(), col: j } });
        }
    }
    let num_vars = a_base + subsets.len() * n;
    writeln!(text, "p cnf {num_vars} {}", clauses.len()).unwrap();
    for c in &clauses {
        for lit in c {
            write!(text, "{lit} ").unwrap();
        }
        text.push_str("0\n");
    }
    Ok(ConstraintDocument { kind: DocKind::Cnf, text, varmap: VarMap::Cnf { params: *params, rows: m, primary, aux } })
}

/// Parses DIMACS text, insisting that the header matches the body.
pub fn parse_dimacs(text: &str) -> Result<Cnf, EncodeError> {
    let err = |line: usize, msg: String| EncodeError::Document { line, msg };
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(err(line_no, "second header line".into()));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| err(line_no, format!("bad variable count '{v}'")))?;
                    let c = c.parse().map_err(|_| err(line_no, format!("bad clause count '{c}'")))?;
                    header = Some((v, c));
                }
                _ => return Err(err(line_no, "expected 'p cnf <vars> <clauses>'".into())),
            }
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| err(line_no, "clause before header".into()))?;
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| err(line_no, format!("bad literal '{tok}'")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > num_vars {
                    return Err(err(line_no, format!("literal {lit} exceeds declared {num_vars} variables")));
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, declared) = header.ok_or_else(|| err(0, "missing 'p cnf' header".into()))?;
    if !current.is_empty() {
        return Err(err(0, "last clause is not 0-terminated".into()));
    }
    if clauses.len() != declared {
        return Err(err(0, format!("header declares {declared} clauses, body has {}", clauses.len())));
    }
    Ok(Cnf { num_vars, clauses })
}

pub(crate) fn parse_document(text: &str) -> Result<ConstraintDocument, EncodeError> {
    let err = |line: usize, msg: String| EncodeError::Document { line, msg };
    let mut params = None;
    let mut rows = 0;
    let mut cells: BTreeMap<(usize, usize, usize), u32> = BTreeMap::new();
    let mut aux = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| err(line_no, format!("bad number '{t}'")));
        match toks.as_slice() {
            ["c", "triff", "dimacs", fields @ ..] => {
                let (p, m) = parse_fields(fields).map_err(|msg| err(line_no, msg))?;
                params = Some(p);
                rows = m;
            }
            ["c", "map", "v", id, "row", i, "col", j, "sym", s] => {
                cells.insert((num(i)?, num(j)?, num(s)?), num(id)? as u32);
            }
            ["c", "aux", "e", id, "pair", p, q, "col", j] => {
                aux.push(AuxVar { id: num(id)? as u32, kind: AuxKind::Pair { p: num(p)?, q: num(q)?, col: num(j)? } });
            }
            ["c", "aux", "a", id, "subset", rest @ ..] if rest.len() >= 2 && rest[rest.len() - 2] == "col" => {
                let members = rest[..rest.len() - 2].iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?;
                let col = num(rest[rest.len() - 1])?;
                aux.push(AuxVar { id: num(id)? as u32, kind: AuxKind::Subset { rows: members, col } });
            }
            _ => {}
        }
    }
    let params = params.ok_or_else(|| err(0, "missing 'c triff dimacs' line".into()))?;
    let (b, n) = (params.b(), params.n());
    let mut primary = Vec::with_capacity(rows * n * b);
    for i in 0..rows {
        for j in 0..n {
            for s in 0..b {
                let id =
                    cells.get(&(i, j, s)).ok_or_else(|| err(0, format!("no map line for row {i} col {j} sym {s}")))?;
                primary.push(*id);
            }
        }
    }
    let cnf = parse_dimacs(text)?;
    let mut seen = vec![false; cnf.num_vars as usize + 1];
    for id in primary.iter().copied().chain(aux.iter().map(|a| a.id)) {
        let slot = seen.get_mut(id as usize).ok_or_else(|| err(0, format!("mapped variable {id} beyond header")))?;
        if *slot {
            return Err(err(0, format!("variable {id} mapped twice")));
        }
        *slot = true;
    }
    if let Some(lit) = cnf.clauses.iter().flatten().find(|l| !seen[l.unsigned_abs() as usize]) {
        return Err(err(0, format!("variable {} is not in the directory", lit.unsigned_abs())));
    }
    Ok(ConstraintDocument {
        kind: DocKind::Cnf,
        text: text.to_string(),
        varmap: VarMap::Cnf { params, rows, primary, aux },
    })
}

/// Parses `b=.. k=.. n=.. m=..`.
pub(crate) fn parse_fields(fields: &[&str]) -> Result<(CodeParams, usize), String> {
    let mut get = BTreeMap::new();
    for f in fields {
        let (key, value) = f.split_once('=').ok_or_else(|| format!("expected key=value, got '{f}'"))?;
        let value: usize = value.parse().map_err(|_| format!("bad number in '{f}'"))?;
        get.insert(key, value);
    }
    let field = |k: &str| get.get(k).copied().ok_or_else(|| format!("missing field {k}"));
    let params = CodeParams::new(field("b")?, field("k")?, field("n")?).map_err(|e| e.to_string())?;
    Ok((params, field("m")?))
}

/// Reads `s`/`v` lines. Variables absent from the v-lines are false.
pub fn parse_model(model: &str) -> Result<BTreeMap<u32, bool>, EncodeError> {
    let mut values = BTreeMap::new();
    let mut status = None;
    for raw in model.lines() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("v ").or_else(|| (line == "v").then_some("")) {
            for tok in rest.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| EncodeError::Model(format!("bad literal '{tok}'")))?;
                if lit != 0 {
                    values.insert(lit.unsigned_abs() as u32, lit > 0);
                }
            }
        }
    }
    match status.as_deref() {
        Some("UNSATISFIABLE") => Err(EncodeError::NoModel),
        Some("SATISFIABLE") | None if !values.is_empty() => Ok(values),
        Some(other) if other != "SATISFIABLE" => Err(EncodeError::Model(format!("solver status '{other}'"))),
        _ => Err(EncodeError::NoModel),
    }
}

pub(crate) fn decode_matrix(varmap: &VarMap, model: &str) -> Result<Vec<Vec<u8>>, EncodeError> {
    let VarMap::Cnf { params, rows, primary, .. } = varmap else {
        return Err(EncodeError::Model("variable map is not a CNF map".into()));
    };
    let values = parse_model(model)?;
    let (b, n) = (params.b(), params.n());
    let mut matrix = vec![vec![0u8; n]; *rows];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let on: Vec<usize> =
                (0..b).filter(|&s| values.get(&primary[(i * n + j) * b + s]).copied().unwrap_or(false)).collect();
            match on.as_slice() {
                [s] => *cell = *s as u8,
                _ => return Err(EncodeError::NotOneHot { row: i, col: j }),
            }
        }
    }
    Ok(matrix)
}

/// Values of every variable for the given matrix, auxiliaries by definition.
/// Index 0 is unused.
pub(crate) fn forced_values(varmap: &VarMap, rows: &[&[u8]]) -> Vec<bool> {
    let VarMap::Cnf { params, primary, aux, .. } = varmap else {
        unreachable!("forced_values on a non-CNF map");
    };
    let (b, n) = (params.b(), params.n());
    let max = primary.iter().chain(aux.iter().map(|a| &a.id)).copied().max().unwrap_or(0);
    let mut values = vec![false; max as usize + 1];
    for (i, row) in rows.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            values[primary[(i * n + j) * b + s as usize] as usize] = true;
        }
    }
    for a in aux {
        values[a.id as usize] = match &a.kind {
            AuxKind::Pair { p, q, col } => rows[*p][*col] != rows[*q][*col],
            AuxKind::Subset { rows: members, col } => members.iter().map(|&r| rows[r][*col]).all_unique(),
        };
    }
    values
}

/// Renders a full assignment in the usual solver output form.
pub fn model_text(values: &[bool]) -> String {
    let mut out = String::from("s SATISFIABLE\nv");
    for (id, &v) in values.iter().enumerate().skip(1) {
        write!(out, " {}", if v { id as i64 } else { -(id as i64) }).unwrap();
    }
    out.push_str(" 0\n");
    out
}
