//! Seeded random sentences and structures for testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::formula::Formula;
use super::structure::{LabStructure, Shape, ROOT};
use super::MsoError;

/// The names and symbols a sentence may mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub branching: usize,
    /// Number of distinct letters, or `None` for structures without letters.
    pub alphabet: Option<u64>,
    pub constants: Vec<String>,
    pub sets: Vec<String>,
}

impl Vocabulary {
    /// Vocabulary shared by the given structures (assumed compatible); the
    /// alphabet covers every letter occurring in any of them.
    pub fn of(structures: &[&LabStructure]) -> Self {
        let first = structures.first().expect("at least one structure");
        let alphabet = first
            .letters()
            .map(|_| structures.iter().filter_map(|s| s.letters()).flatten().copied().max().map_or(1, |m| m + 1));
        Vocabulary {
            branching: first.branching(),
            alphabet,
            constants: first.constants().keys().cloned().collect(),
            sets: first.sets().keys().cloned().collect(),
        }
    }
}

const MAX_DEPTH: usize = 4;

struct Gen<'a> {
    rng: ChaCha8Rng,
    v: &'a Vocabulary,
    points: Vec<String>,
    sets: Vec<String>,
    fresh: usize,
}

impl Gen<'_> {
    fn pick_point(&mut self) -> Option<String> {
        let latest = self.points.last().cloned();
        if latest.is_some() && self.rng.gen_bool(0.5) {
            return latest;
        }
        let all: Vec<&String> = self.points.iter().chain(&self.v.constants).collect();
        all.choose(&mut self.rng).map(|s| (*s).clone())
    }

    fn pick_set(&mut self) -> Option<String> {
        let latest = self.sets.last().cloned();
        if latest.is_some() && self.rng.gen_bool(0.5) {
            return latest;
        }
        let all: Vec<&String> = self.sets.iter().chain(&self.v.sets).collect();
        all.choose(&mut self.rng).map(|s| (*s).clone())
    }

    fn atom(&mut self) -> Formula {
        for _ in 0..8 {
            match self.rng.gen_range(0..5) {
                0 => {
                    if let (Some(x), Some(y)) = (self.pick_point(), self.pick_point()) {
                        return Formula::Eq(x, y);
                    }
                }
                1 => {
                    if let (Some(x), Some(y)) = (self.pick_point(), self.pick_point()) {
                        return Formula::Succ { a: self.rng.gen_range(0..self.v.branching), x, y };
                    }
                }
                2 => {
                    if let (Some(n), Some(x)) = (self.v.alphabet, self.pick_point()) {
                        return Formula::Letter { a: self.rng.gen_range(0..n.max(1)), x };
                    }
                }
                _ => {
                    if let (Some(x), Some(set)) = (self.pick_point(), self.pick_set()) {
                        return Formula::In { x, set };
                    }
                }
            }
        }
        if self.rng.gen_bool(0.5) {
            Formula::True
        } else {
            Formula::False
        }
    }

    fn formula(&mut self, rank: usize, depth: usize) -> Formula {
        if depth == 0 {
            return self.atom();
        }
        let quantify = if rank > 0 { 4 } else { 0 };
        let roll = self.rng.gen_range(0..7 + quantify);
        match roll {
            0..=1 => self.atom(),
            2 => Formula::Not(Box::new(self.formula(rank, depth - 1))),
            3 | 4 => {
                let n = self.rng.gen_range(2..=3);
                let parts = (0..n).map(|_| self.formula(rank, depth - 1)).collect();
                if roll == 3 {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            5 | 6 => {
                let (a, b) = (self.formula(rank, depth - 1), self.formula(rank, depth - 1));
                if roll == 5 {
                    Formula::Implies(Box::new(a), Box::new(b))
                } else {
                    Formula::Iff(Box::new(a), Box::new(b))
                }
            }
            _ => {
                let set = self.rng.gen_bool(0.4);
                self.fresh += 1;
                let var = if set { format!("X{}", self.fresh) } else { format!("x{}", self.fresh) };
                if set {
                    self.sets.push(var.clone());
                } else {
                    self.points.push(var.clone());
                }
                let body = Box::new(self.formula(rank - 1, depth - 1));
                if set {
                    self.sets.pop();
                } else {
                    self.points.pop();
                }
                match (set, self.rng.gen_bool(0.5)) {
                    (false, true) => Formula::Exists1(var, body),
                    (false, false) => Formula::Forall1(var, body),
                    (true, true) => Formula::ExistsS(var, body),
                    (true, false) => Formula::ForallS(var, body),
                }
            }
        }
    }
}

/// `count` pseudo-random sentences of quantifier rank at most `rho` over the
/// vocabulary, determined by `seed`.
pub fn sample_sentences(vocab: &Vocabulary, rho: usize, count: usize, seed: u64) -> Vec<Formula> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), v: vocab, points: Vec::new(), sets: Vec::new(), fresh: 0 };
    (0..count)
        .map(|_| {
            g.fresh = 0;
            g.formula(rho, MAX_DEPTH)
        })
        .collect()
}

fn random_sets<R: Rng>(rng: &mut R, mut s: LabStructure, set_names: &[&str]) -> Result<LabStructure, MsoError> {
    for name in set_names {
        let mask = (0..s.size()).filter(|_| rng.gen_bool(0.5)).fold(0u64, |m, x| m | 1 << x);
        s = s.with_set(name, mask)?;
    }
    Ok(s)
}

/// A word of the given length with uniform letters below `alphabet` (if any)
/// and uniformly random named sets.
pub fn random_word<R: Rng>(
    rng: &mut R,
    length: usize,
    alphabet: Option<u64>,
    set_names: &[&str],
) -> Result<LabStructure, MsoError> {
    let mut s = LabStructure::word(length)?;
    if let Some(n) = alphabet {
        s = s.with_letters((0..length).map(|_| rng.gen_range(0..n)).collect())?;
    }
    random_sets(rng, s, set_names)
}

/// A full truncated tree with uniform letters (if any) and random named sets.
pub fn random_tree<R: Rng>(
    rng: &mut R,
    branching: usize,
    depth: usize,
    alphabet: Option<u64>,
    set_names: &[&str],
) -> Result<LabStructure, MsoError> {
    let mut s = LabStructure::tree(branching, depth)?;
    if let Some(n) = alphabet {
        let size = s.size();
        s = s.with_letters((0..size).map(|_| rng.gen_range(0..n)).collect())?;
    }
    random_sets(rng, s, set_names)
}

/// Copy of a full tree in which every deepest node takes the letter and set
/// memberships of a uniformly chosen sibling (possibly itself). Restrictions
/// to each branch keep the same set of leaf data only by chance, so callers
/// filter on the premise they need.
pub fn resample_leaves<R: Rng>(rng: &mut R, s: &LabStructure) -> Result<LabStructure, MsoError> {
    let Shape::Tree { branching, depth, branch: None } = s.shape() else {
        return Err(MsoError::NotATree);
    };
    let mut t = LabStructure::tree(branching, depth)?;
    let source: Vec<usize> = (0..s.size())
        .map(|x| {
            let label = s.label(x);
            if x == 0 || label.chars().count() != depth {
                return x;
            }
            let parent = &label[..label.len() - 1];
            let pick = rng.gen_range(0..branching);
            s.element(&format!("{parent}{pick}")).expect("sibling exists in a full tree")
        })
        .collect();
    if let Some(letters) = s.letters() {
        t = t.with_letters(source.iter().map(|&y| letters[y]).collect())?;
    }
    for (name, &x) in s.constants().iter().filter(|(n, _)| n.as_str() != ROOT) {
        t = t.with_constant(name, x)?;
    }
    for (name, &mask) in s.sets() {
        let moved = source.iter().enumerate().fold(0u64, |m, (x, &y)| m | (mask >> y & 1) << x);
        t = t.with_set(name, moved)?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msolab::eval::{evaluate, Assignment};
    use crate::msolab::formula::{parse_formula, quantifier_rank};

    fn vocab() -> Vocabulary {
        let s = LabStructure::word_with_letters(&[0, 1, 2]).unwrap().with_set("V", 0b101).unwrap();
        Vocabulary::of(&[&s])
    }

    #[test]
    fn basic_contract() {
        let v = vocab();
        assert_eq!(v.alphabet, Some(3));
        assert!(sample_sentences(&v, 2, 0, 1).is_empty());
        let a = sample_sentences(&v, 2, 100, 7);
        assert_eq!(a, sample_sentences(&v, 2, 100, 7));
        assert_ne!(a, sample_sentences(&v, 2, 100, 8));
        assert!(a.iter().all(|f| quantifier_rank(f) <= 2));
        assert!(a.iter().any(|f| quantifier_rank(f) == 2));
    }

    #[test]
    fn sentences_are_closed_and_reparse() {
        let v = vocab();
        let s = LabStructure::word_with_letters(&[2, 2, 0]).unwrap().with_set("V", 0b011).unwrap();
        for f in sample_sentences(&v, 2, 200, 3) {
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
            evaluate(&s, &f, &Assignment::default()).unwrap();
        }
        let bare = Vocabulary { branching: 1, alphabet: None, constants: vec![], sets: vec![] };
        let empty = LabStructure::word(0).unwrap();
        for f in sample_sentences(&bare, 1, 50, 3) {
            evaluate(&empty, &f, &Assignment::default()).unwrap();
        }
    }

    #[test]
    fn random_structures() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_word(&mut rng, 4, Some(3), &["V"]).unwrap();
        assert_eq!(w.size(), 4);
        assert!(w.letters().unwrap().iter().all(|&l| l < 3));
        let t = random_tree(&mut rng, 3, 2, None, &["V", "W"]).unwrap();
        assert_eq!(t.size(), 13);
        assert_eq!(t.sets().len(), 2);
    }

    #[test]
    fn resampled_leaves_come_from_siblings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for depth in 0..=2 {
            let t = random_tree(&mut rng, 3, depth, Some(4), &["V"]).unwrap();
            let r = resample_leaves(&mut rng, &t).unwrap();
            assert_eq!(r.size(), t.size());
            for x in 0..t.size() {
                let label = t.label(x);
                if x == 0 || label.chars().count() != depth {
                    assert_eq!(r.letter(x), t.letter(x));
                    assert_eq!(r.sets()["V"] >> x & 1, t.sets()["V"] >> x & 1);
                } else {
                    let parent = &label[..label.len() - 1];
                    let data = |s: &LabStructure, y: usize| (s.letter(y), s.sets()["V"] >> y & 1);
                    assert!((0..3).any(|a| data(&t, t.element(&format!("{parent}{a}")).unwrap()) == data(&r, x)));
                }
            }
        }
        let w = LabStructure::word(3).unwrap();
        assert_eq!(resample_leaves(&mut rng, &w), Err(MsoError::NotATree));
    }
}
