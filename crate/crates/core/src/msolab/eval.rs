use std::collections::BTreeMap;

use super::formula::Formula;
use super::structure::LabStructure;
use super::MsoError;

/// Domain size limit for formulas with set quantifiers.
pub const DEFAULT_EVAL_GUARD: usize = 14;

/// Values for free names that are not constants or sets of the structure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub points: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, u64>,
}

#[derive(Clone, Copy)]
enum Val {
    Point(usize),
    Set(u64),
}

struct Env<'a> {
    s: &'a LabStructure,
    a: &'a Assignment,
    stack: Vec<(&'a str, Val)>,
}

impl<'a> Env<'a> {
    fn point(&self, name: &str) -> usize {
        for (n, v) in self.stack.iter().rev() {
            if *n == name {
                if let Val::Point(x) = v {
                    return *x;
                }
            }
        }
        self.a
            .points
            .get(name)
            .or_else(|| self.s.constants().get(name))
            .copied()
            .expect("names checked before evaluation")
    }

    fn set(&self, name: &str) -> u64 {
        for (n, v) in self.stack.iter().rev() {
            if *n == name {
                if let Val::Set(m) = v {
                    return *m;
                }
            }
        }
        self.a.sets.get(name).or_else(|| self.s.sets().get(name)).copied().expect("names checked before evaluation")
    }

    fn eval(&mut self, f: &'a Formula) -> bool {
        use Formula::*;
        match f {
            True => true,
            False => false,
            Succ { a, x, y } => self.s.succ(*a, self.point(x)) == Some(self.point(y)),
            In { x, set } => self.set(set) >> self.point(x) & 1 == 1,
            Eq(x, y) => self.point(x) == self.point(y),
            Letter { a, x } => self.s.letter(self.point(x)) == Some(*a),
            Not(g) => !self.eval(g),
            And(gs) => gs.iter().all(|g| self.eval(g)),
            Or(gs) => gs.iter().any(|g| self.eval(g)),
            Implies(a, b) => !self.eval(a) || self.eval(b),
            Iff(a, b) => self.eval(a) == self.eval(b),
            Exists1(v, g) => (0..self.s.size()).any(|x| self.with(v, Val::Point(x), g)),
            Forall1(v, g) => (0..self.s.size()).all(|x| self.with(v, Val::Point(x), g)),
            ExistsS(v, g) => (0..=self.s.full_mask()).any(|m| self.with(v, Val::Set(m), g)),
            ForallS(v, g) => (0..=self.s.full_mask()).all(|m| self.with(v, Val::Set(m), g)),
        }
    }

    fn with(&mut self, v: &'a str, val: Val, g: &'a Formula) -> bool {
        self.stack.push((v, val));
        let r = self.eval(g);
        self.stack.pop();
        r
    }
}

fn check_succ(f: &Formula, branching: usize) -> Result<(), MsoError> {
    use Formula::*;
    match f {
        Succ { a, .. } if *a >= branching => Err(MsoError::UnknownSuccessor { a: *a, branching }),
        True | False | Succ { .. } | In { .. } | Eq(..) | Letter { .. } => Ok(()),
        Not(g) | Exists1(_, g) | Forall1(_, g) | ExistsS(_, g) | ForallS(_, g) => check_succ(g, branching),
        And(gs) | Or(gs) => gs.iter().try_for_each(|g| check_succ(g, branching)),
        Implies(a, b) | Iff(a, b) => check_succ(a, branching).and_then(|_| check_succ(b, branching)),
    }
}

pub fn evaluate(s: &LabStructure, f: &Formula, a: &Assignment) -> Result<bool, MsoError> {
    evaluate_with_guard(s, f, a, DEFAULT_EVAL_GUARD)
}

/// Direct evaluation. Set quantifiers enumerate all subsets, so formulas
/// containing them are refused on domains larger than `guard`.
pub fn evaluate_with_guard(s: &LabStructure, f: &Formula, a: &Assignment, guard: usize) -> Result<bool, MsoError> {
    if f.contains_set_quantifier() && s.size() > guard {
        return Err(MsoError::Guard { what: "domain size", size: s.size() as u128, limit: guard as u128 });
    }
    check_succ(f, s.branching())?;
    let (points, sets) = f.free_names();
    for p in &points {
        match a.points.get(p).or_else(|| s.constants().get(p)) {
            None => return Err(MsoError::Unbound(p.clone())),
            Some(&x) if x >= s.size() => return Err(MsoError::Structure(format!("{p} = {x} outside the domain"))),
            _ => {}
        }
    }
    for set in &sets {
        match a.sets.get(set).or_else(|| s.sets().get(set)) {
            None => return Err(MsoError::Unbound(set.clone())),
            Some(&m) if m & !s.full_mask() != 0 => {
                return Err(MsoError::Structure(format!("{set} is not a subset of the domain")))
            }
            _ => {}
        }
    }
    Ok(Env { s, a, stack: Vec::new() }.eval(f))
}
