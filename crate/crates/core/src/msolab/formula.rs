//! MSO formulas in s-expression syntax.
//!
//! ```text
//! f ::= true | false
//!     | (succ a x y) | (in x X) | (= x y) | (letter a x)
//!     | (not f) | (and f ...) | (or f ...) | (implies f g) | (iff f g)
//!     | (exists1 x f) | (forall1 x f) | (existsS X f) | (forallS X f)
//! ```
//!
//! Names not bound by a quantifier refer to the structure's constants and
//! sets, or to an explicit assignment at evaluation time.

use std::collections::BTreeSet;
use std::fmt;

use super::MsoError;
use crate::sexpr::{parse_one, Sexp};

/// Successor indices above this are rejected while parsing.
pub const MAX_SUCC_INDEX: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Succ { a: usize, x: String, y: String },
    In { x: String, set: String },
    Eq(String, String),
    Letter { a: u64, x: String },
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists1(String, Box<Formula>),
    Forall1(String, Box<Formula>),
    ExistsS(String, Box<Formula>),
    ForallS(String, Box<Formula>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Point,
    Set,
}

fn malformed(e: &Sexp, msg: &str) -> MsoError {
    MsoError::Syntax { line: 0, offset: 0, msg: format!("{msg} in {e}") }
}

pub fn parse_formula(text: &str) -> Result<Formula, MsoError> {
    let sexp = parse_one(text).map_err(|e| MsoError::Syntax { line: e.line, offset: e.offset, msg: e.msg })?;
    let mut scope = Vec::new();
    convert(&sexp, &mut scope)
}

fn name(e: &Sexp, parent: &Sexp, kind: Kind, scope: &[(String, Kind)]) -> Result<String, MsoError> {
    let n = e.atom().ok_or_else(|| malformed(parent, "expected a name"))?;
    if n.parse::<i64>().is_ok() {
        return Err(malformed(parent, &format!("'{n}' is not a name")));
    }
    if let Some((_, k)) = scope.iter().rev().find(|(s, _)| s == n) {
        if *k != kind {
            let what = if kind == Kind::Point { "a point" } else { "a set" };
            return Err(malformed(parent, &format!("'{n}' is bound with the other kind but used as {what}")));
        }
    }
    Ok(n.to_string())
}

fn convert(e: &Sexp, scope: &mut Vec<(String, Kind)>) -> Result<Formula, MsoError> {
    if let Some(a) = e.atom() {
        return match a {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            _ => Err(malformed(e, "expected a formula")),
        };
    }
    let items = e.list().unwrap();
    let head = items.first().and_then(Sexp::atom).ok_or_else(|| malformed(e, "expected an operator"))?;
    let args = &items[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(malformed(e, &format!("'{head}' takes {n} arguments")))
        }
    };
    let sub = |scope: &mut Vec<(String, Kind)>, i: usize| convert(&args[i], scope).map(Box::new);
    Ok(match head {
        "succ" => {
            arity(3)?;
            let a: usize =
                args[0].atom().and_then(|a| a.parse().ok()).ok_or_else(|| malformed(e, "bad successor index"))?;
            if a > MAX_SUCC_INDEX {
                return Err(MsoError::UnknownSuccessor { a, branching: MAX_SUCC_INDEX + 1 });
            }
            Formula::Succ { a, x: name(&args[1], e, Kind::Point, scope)?, y: name(&args[2], e, Kind::Point, scope)? }
        }
        "in" => {
            arity(2)?;
            Formula::In { x: name(&args[0], e, Kind::Point, scope)?, set: name(&args[1], e, Kind::Set, scope)? }
        }
        "=" => {
            arity(2)?;
            Formula::Eq(name(&args[0], e, Kind::Point, scope)?, name(&args[1], e, Kind::Point, scope)?)
        }
        "letter" => {
            arity(2)?;
            let a: u64 = args[0].atom().and_then(|a| a.parse().ok()).ok_or_else(|| malformed(e, "bad letter"))?;
            Formula::Letter { a, x: name(&args[1], e, Kind::Point, scope)? }
        }
        "not" => {
            arity(1)?;
            Formula::Not(sub(scope, 0)?)
        }
        "and" | "or" => {
            let parts = args.iter().map(|a| convert(a, scope)).collect::<Result<Vec<_>, _>>()?;
            if head == "and" {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            }
        }
        "implies" | "iff" => {
            arity(2)?;
            let (l, r) = (sub(scope, 0)?, sub(scope, 1)?);
            if head == "implies" {
                Formula::Implies(l, r)
            } else {
                Formula::Iff(l, r)
            }
        }
        "exists1" | "forall1" | "existsS" | "forallS" => {
            arity(2)?;
            let kind = if head.ends_with('1') { Kind::Point } else { Kind::Set };
            let var = args[0]
                .atom()
                .filter(|v| v.parse::<i64>().is_err())
                .ok_or_else(|| malformed(e, "expected a variable"))?;
            scope.push((var.to_string(), kind));
            let body = sub(scope, 1);
            scope.pop();
            let (var, body) = (var.to_string(), body?);
            match head {
                "exists1" => Formula::Exists1(var, body),
                "forall1" => Formula::Forall1(var, body),
                "existsS" => Formula::ExistsS(var, body),
                _ => Formula::ForallS(var, body),
            }
        }
        _ => return Err(malformed(e, &format!("unknown operator '{head}'"))),
    })
}

/// Maximum nesting depth of quantifiers of either kind.
pub fn quantifier_rank(f: &Formula) -> usize {
    use Formula::*;
    match f {
        True | False | Succ { .. } | In { .. } | Eq(..) | Letter { .. } => 0,
        Not(g) => quantifier_rank(g),
        And(gs) | Or(gs) => gs.iter().map(quantifier_rank).max().unwrap_or(0),
        Implies(a, b) | Iff(a, b) => quantifier_rank(a).max(quantifier_rank(b)),
        Exists1(_, g) | Forall1(_, g) | ExistsS(_, g) | ForallS(_, g) => 1 + quantifier_rank(g),
    }
}

impl Formula {
    pub fn contains_set_quantifier(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Succ { .. } | In { .. } | Eq(..) | Letter { .. } => false,
            Not(g) | Exists1(_, g) | Forall1(_, g) => g.contains_set_quantifier(),
            And(gs) | Or(gs) => gs.iter().any(Formula::contains_set_quantifier),
            Implies(a, b) | Iff(a, b) => a.contains_set_quantifier() || b.contains_set_quantifier(),
            ExistsS(..) | ForallS(..) => true,
        }
    }

    /// Free names used as points and as sets.
    pub fn free_names(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut points = BTreeSet::new();
        let mut sets = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut points, &mut sets);
        (points, sets)
    }

    fn collect_free<'a>(
        &'a self,
        bound: &mut Vec<&'a str>,
        points: &mut BTreeSet<String>,
        sets: &mut BTreeSet<String>,
    ) {
        use Formula::*;
        let mut point = |n: &String, bound: &Vec<&str>| {
            if !bound.contains(&n.as_str()) {
                points.insert(n.clone());
            }
        };
        match self {
            True | False => {}
            Succ { x, y, .. } | Eq(x, y) => {
                point(x, bound);
                point(y, bound);
            }
            Letter { x, .. } => point(x, bound),
            In { x, set } => {
                point(x, bound);
                if !bound.contains(&set.as_str()) {
                    sets.insert(set.clone());
                }
            }
            Not(g) => g.collect_free(bound, points, sets),
            And(gs) | Or(gs) => gs.iter().for_each(|g| g.collect_free(bound, points, sets)),
            Implies(a, b) | Iff(a, b) => {
                a.collect_free(bound, points, sets);
                b.collect_free(bound, points, sets);
            }
            Exists1(v, g) | Forall1(v, g) | ExistsS(v, g) | ForallS(v, g) => {
                bound.push(v);
                g.collect_free(bound, points, sets);
                bound.pop();
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let list = |f: &mut fmt::Formatter<'_>, head: &str, gs: &[Formula]| {
            write!(f, "({head}")?;
            for g in gs {
                write!(f, " {g}")?;
            }
            write!(f, ")")
        };
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Succ { a, x, y } => write!(f, "(succ {a} {x} {y})"),
            In { x, set } => write!(f, "(in {x} {set})"),
            Eq(x, y) => write!(f, "(= {x} {y})"),
            Letter { a, x } => write!(f, "(letter {a} {x})"),
            Not(g) => write!(f, "(not {g})"),
            And(gs) => list(f, "and", gs),
            Or(gs) => list(f, "or", gs),
            Implies(a, b) => write!(f, "(implies {a} {b})"),
            Iff(a, b) => write!(f, "(iff {a} {b})"),
            Exists1(v, g) => write!(f, "(exists1 {v} {g})"),
            Forall1(v, g) => write!(f, "(forall1 {v} {g})"),
            ExistsS(v, g) => write!(f, "(existsS {v} {g})"),
            ForallS(v, g) => write!(f, "(forallS {v} {g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(quantifier_rank(&parse_formula("(exists1 x (letter 2 x))").unwrap()), 1);
        assert_eq!(quantifier_rank(&parse_formula("(existsS X (forall1 x (in x X)))").unwrap()), 2);
        assert_eq!(quantifier_rank(&parse_formula("(= root root)").unwrap()), 0);
        let f = "(and (exists1 x (letter 0 x)) (existsS X (exists1 y (in y X))))";
        assert_eq!(quantifier_rank(&parse_formula(f).unwrap()), 2);
        assert_eq!(quantifier_rank(&parse_formula("(and)").unwrap()), 0);
    }

    #[test]
    fn syntax_errors() {
        let text = "(exists1 x";
        match parse_formula(text).unwrap_err() {
            MsoError::Syntax { offset, msg, .. } => {
                assert_eq!(offset, text.len());
                assert!(msg.contains("end of input"));
            }
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse_formula("(succ 12 x y)"), Err(MsoError::UnknownSuccessor { a: 12, .. })));
        for bad in ["(frobnicate x)", "(not)", "(in x)", "(exists1 (x) true)", "x", "(letter a x)", "(= 1 x)"] {
            assert!(parse_formula(bad).is_err(), "{bad}");
        }
        assert!(parse_formula("(exists1 x (in y x))").is_err());
        assert!(parse_formula("(existsS X (= X y))").is_err());
        assert!(parse_formula("(existsS X (exists1 X (= X X)))").is_ok());
    }

    #[test]
    fn display_round_trip() {
        for text in [
            "(forallS X (implies (in root X) (exists1 y (and (succ 0 root y) (not (in y X))))))",
            "(iff true (or false (letter 3 c) (= c root)))",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn free_names() {
        let f = parse_formula("(and (in c V) (exists1 x (in x W)) (forallS V (in x V)))").unwrap();
        let (p, s) = f.free_names();
        assert_eq!(p.into_iter().collect::<Vec<_>>(), vec!["c", "x"]);
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec!["V", "W"]);
        assert!(f.contains_set_quantifier());
    }
}
