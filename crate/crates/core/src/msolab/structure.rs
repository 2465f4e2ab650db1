use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{MsoError, MAX_DOMAIN};
use crate::hashcore::Word;

/// Name of the built-in constant at the root (tree) or first position (word).
pub const ROOT: &str = "root";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Word {
        length: usize,
    },
    /// `branch` is set on restrictions to a single subtree.
    Tree {
        branching: usize,
        depth: usize,
        branch: Option<usize>,
    },
}

/// A finite structure: domain `0..size`, successor functions, optional
/// letters, named constants (including [`ROOT`] whenever the domain is
/// non-empty) and named sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabStructure {
    shape: Shape,
    labels: Vec<String>,
    succ: Vec<Vec<Option<usize>>>,
    letters: Option<Vec<u64>>,
    constants: BTreeMap<String, usize>,
    sets: BTreeMap<String, u64>,
}

fn structure_err(msg: impl Into<String>) -> MsoError {
    MsoError::Structure(msg.into())
}

impl LabStructure {
    /// Positions `0..length` with `succ_0(i, i+1)`.
    pub fn word(length: usize) -> Result<Self, MsoError> {
        if length > MAX_DOMAIN {
            return Err(structure_err(format!("word length {length} exceeds {MAX_DOMAIN}")));
        }
        let succ = vec![(0..length).map(|i| (i + 1 < length).then_some(i + 1)).collect()];
        let mut constants = BTreeMap::new();
        if length > 0 {
            constants.insert(ROOT.to_string(), 0);
        }
        Ok(LabStructure {
            shape: Shape::Word { length },
            labels: (0..length).map(|i| i.to_string()).collect(),
            succ,
            letters: None,
            constants,
            sets: BTreeMap::new(),
        })
    }

    /// A word whose letters are given.
    pub fn word_with_letters(letters: &[u64]) -> Result<Self, MsoError> {
        Self::word(letters.len())?.with_letters(letters.to_vec())
    }

    /// All strings over `0..branching` of length at most `depth`, in
    /// breadth-first order, with `succ_a(x, xa)`.
    pub fn tree(branching: usize, depth: usize) -> Result<Self, MsoError> {
        if !(2..=10).contains(&branching) {
            return Err(structure_err(format!("branching {branching} outside 2..=10")));
        }
        let mut labels = vec![String::new()];
        let mut level = vec![String::new()];
        for _ in 0..depth {
            level = level.iter().flat_map(|p| (0..branching).map(move |a| format!("{p}{a}"))).collect();
            labels.extend(level.iter().cloned());
            if labels.len() > MAX_DOMAIN {
                return Err(structure_err(format!("tree of depth {depth} has more than {MAX_DOMAIN} nodes")));
            }
        }
        let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let succ = (0..branching)
            .map(|a| labels.iter().map(|l| index.get(format!("{l}{a}").as_str()).copied()).collect())
            .collect();
        let constants = BTreeMap::from([(ROOT.to_string(), 0)]);
        Ok(LabStructure {
            shape: Shape::Tree { branching, depth, branch: None },
            labels,
            succ,
            letters: None,
            constants,
            sets: BTreeMap::new(),
        })
    }

    pub fn with_letters(mut self, letters: Vec<u64>) -> Result<Self, MsoError> {
        if letters.len() != self.size() {
            return Err(structure_err(format!("{} letters for {} elements", letters.len(), self.size())));
        }
        self.letters = Some(letters);
        Ok(self)
    }

    pub fn with_constant(mut self, name: &str, element: usize) -> Result<Self, MsoError> {
        check_name(name)?;
        if name == ROOT {
            return Err(structure_err(format!("'{ROOT}' is built in")));
        }
        if element >= self.size() {
            return Err(structure_err(format!("constant {name} = {element} outside the domain")));
        }
        if self.sets.contains_key(name) || self.constants.insert(name.to_string(), element).is_some() {
            return Err(structure_err(format!("name {name} declared twice")));
        }
        Ok(self)
    }

    pub fn with_set(mut self, name: &str, mask: u64) -> Result<Self, MsoError> {
        check_name(name)?;
        if mask & !self.full_mask() != 0 {
            return Err(structure_err(format!("set {name} is not a subset of the domain")));
        }
        if self.constants.contains_key(name) || self.sets.insert(name.to_string(), mask).is_some() {
            return Err(structure_err(format!("name {name} declared twice")));
        }
        Ok(self)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    /// Number of successor relations (1 for words).
    pub fn branching(&self) -> usize {
        self.succ.len()
    }

    pub fn full_mask(&self) -> u64 {
        mask_of(self.size())
    }

    pub fn succ(&self, a: usize, x: usize) -> Option<usize> {
        self.succ[a][x]
    }

    pub fn letter(&self, x: usize) -> Option<u64> {
        self.letters.as_ref().map(|l| l[x])
    }

    pub fn letters(&self) -> Option<&[u64]> {
        self.letters.as_deref()
    }

    pub fn constants(&self) -> &BTreeMap<String, usize> {
        &self.constants
    }

    pub fn sets(&self) -> &BTreeMap<String, u64> {
        &self.sets
    }

    /// Display name of an element: the position for words, the node string
    /// (`ε` for the root) for trees.
    pub fn label(&self, x: usize) -> String {
        match (&self.shape, self.labels[x].as_str()) {
            (Shape::Tree { .. }, "") => "ε".to_string(),
            (_, l) => l.to_string(),
        }
    }

    /// Inverse of [`label`](Self::label); trees also accept `""` for the root.
    pub fn element(&self, label: &str) -> Option<usize> {
        let key = match (&self.shape, label) {
            (Shape::Tree { .. }, "ε") => "",
            _ => label,
        };
        self.labels.iter().position(|l| l == key)
    }

    pub fn set_label(&self, mask: u64) -> String {
        let items: Vec<String> = (0..self.size()).filter(|&x| mask >> x & 1 == 1).map(|x| self.label(x)).collect();
        format!("{{{}}}", items.join(","))
    }

    /// The subtree through child `j` of the root, together with the root.
    /// Constants outside it are dropped and sets are intersected with it.
    pub fn restrict(&self, j: usize) -> Result<Self, MsoError> {
        let Shape::Tree { branching, depth, .. } = self.shape else {
            return Err(MsoError::NotATree);
        };
        if j >= branching {
            return Err(MsoError::BranchOutOfRange { j, b: branching });
        }
        let prefix = char::from(b'0' + j as u8);
        let keep: Vec<usize> =
            (0..self.size()).filter(|&x| self.labels[x].is_empty() || self.labels[x].starts_with(prefix)).collect();
        let mut new_index = vec![None; self.size()];
        for (i, &x) in keep.iter().enumerate() {
            new_index[x] = Some(i);
        }
        let remap =
            |mask: u64| keep.iter().enumerate().filter(|(_, &x)| mask >> x & 1 == 1).fold(0u64, |m, (i, _)| m | 1 << i);
        Ok(LabStructure {
            shape: Shape::Tree { branching, depth, branch: Some(j) },
            labels: keep.iter().map(|&x| self.labels[x].clone()).collect(),
            succ: self
                .succ
                .iter()
                .map(|row| keep.iter().map(|&x| row[x].and_then(|y| new_index[y])).collect())
                .collect(),
            letters: self.letters.as_ref().map(|l| keep.iter().map(|&x| l[x]).collect()),
            constants: self.constants.iter().filter_map(|(name, &x)| new_index[x].map(|i| (name.clone(), i))).collect(),
            sets: self.sets.iter().map(|(name, &m)| (name.clone(), remap(m))).collect(),
        })
    }

    /// The word whose i-th letter encodes the column `(w_1[i], ..., w_k[i])`
    /// in base `b` (see [`product_letter`]).
    pub fn product_word(words: &[Word]) -> Result<Self, MsoError> {
        let first = words.first().ok_or_else(|| structure_err("product of zero words"))?;
        let (n, b) = (first.len(), first.alphabet());
        if words.iter().any(|w| w.len() != n || w.alphabet() != b) {
            return Err(structure_err("product of words with different lengths or alphabets"));
        }
        let letters: Vec<u64> =
            (0..n).map(|i| product_letter(&words.iter().map(|w| w.symbols()[i]).collect::<Vec<_>>(), b)).collect();
        Self::word_with_letters(&letters)
    }

    /// Reads the TOML structure file format.
    pub fn from_toml(text: &str) -> Result<Self, MsoError> {
        let file_err = |m: String| MsoError::File(m);
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| file_err(e.to_string()))?;
        for key in table.keys() {
            if !matches!(key.as_str(), "shape" | "b" | "length" | "depth" | "letters" | "constants" | "sets") {
                return Err(file_err(format!("unknown field '{key}'")));
            }
        }
        let int = |key: &str| -> Result<Option<usize>, MsoError> {
            match table.get(key) {
                None => Ok(None),
                Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
                Some(v) => Err(file_err(format!("field '{key}' must be a non-negative integer, got {v}"))),
            }
        };
        let shape = table
            .get("shape")
            .and_then(|v| v.as_str())
            .ok_or_else(|| file_err("missing string field 'shape'".into()))?;
        let b = int("b")?;
        let mut s = match shape {
            "word" => {
                let length = int("length")?.ok_or_else(|| file_err("word needs 'length'".into()))?;
                LabStructure::word(length)?
            }
            "tree" => {
                let b = b.ok_or_else(|| file_err("tree needs 'b'".into()))?;
                let depth = int("depth")?.ok_or_else(|| file_err("tree needs 'depth'".into()))?;
                LabStructure::tree(b, depth)?
            }
            other => return Err(file_err(format!("unknown shape '{other}' (expected word or tree)"))),
        };
        let elem = |s: &LabStructure, v: &toml::Value, ctx: &str| -> Result<usize, MsoError> {
            let found = match (s.shape, v) {
                (Shape::Word { .. }, toml::Value::Integer(i)) if *i >= 0 => Some(*i as usize).filter(|&i| i < s.size()),
                (_, toml::Value::String(l)) => s.element(l),
                _ => None,
            };
            found.ok_or_else(|| file_err(format!("{ctx}: {v} is not an element of the domain")))
        };
        if let Some(letters) = table.get("letters") {
            let mut values = vec![0u64; s.size()];
            match letters {
                toml::Value::String(digits) => {
                    if digits.chars().count() != s.size() {
                        return Err(file_err(format!("{} letters for {} elements", digits.chars().count(), s.size())));
                    }
                    for (slot, c) in values.iter_mut().zip(digits.chars()) {
                        *slot = c.to_digit(10).ok_or_else(|| file_err(format!("letter '{c}' is not a digit")))? as u64;
                    }
                }
                toml::Value::Array(items) => {
                    if items.len() != s.size() {
                        return Err(file_err(format!("{} letters for {} elements", items.len(), s.size())));
                    }
                    for (slot, v) in values.iter_mut().zip(items) {
                        *slot = v
                            .as_integer()
                            .filter(|i| *i >= 0)
                            .ok_or_else(|| file_err(format!("letter {v} is not a non-negative integer")))?
                            as u64;
                    }
                }
                toml::Value::Table(map) => {
                    let mut seen = 0u64;
                    for (node, v) in map {
                        let x = elem(&s, &toml::Value::String(node.clone()), "letters")?;
                        seen |= 1 << x;
                        values[x] = v
                            .as_integer()
                            .filter(|i| *i >= 0)
                            .ok_or_else(|| file_err(format!("letter {v} is not a non-negative integer")))?
                            as u64;
                    }
                    if seen != s.full_mask() {
                        return Err(file_err("letters table must give every element a letter".into()));
                    }
                }
                v => return Err(file_err(format!("letters must be a string, array or table, got {v}"))),
            }
            if let Some(b) = b.filter(|_| shape == "word") {
                if let Some(bad) = values.iter().find(|&&l| l >= b as u64) {
                    return Err(file_err(format!("letter {bad} is not below b = {b}")));
                }
            }
            s = s.with_letters(values)?;
        }
        if let Some(c) = table.get("constants") {
            let c = c.as_table().ok_or_else(|| file_err("constants must be a table".into()))?;
            for (name, v) in c {
                let x = elem(&s, v, &format!("constant {name}"))?;
                s = s.with_constant(name, x)?;
            }
        }
        if let Some(sets) = table.get("sets") {
            let sets = sets.as_table().ok_or_else(|| file_err("sets must be a table".into()))?;
            for (name, v) in sets {
                let items = v.as_array().ok_or_else(|| file_err(format!("set {name} must be an array")))?;
                let mut mask = 0u64;
                for item in items {
                    mask |= 1 << elem(&s, item, &format!("set {name}"))?;
                }
                s = s.with_set(name, mask)?;
            }
        }
        Ok(s)
    }

    /// Writes the TOML structure file format. Restricted trees cannot be
    /// written since their domain is not a full truncated tree.
    pub fn to_toml(&self) -> Result<String, MsoError> {
        let mut out = String::new();
        let elem = |x: usize| match self.shape {
            Shape::Word { .. } => x.to_string(),
            Shape::Tree { .. } => format!("\"{}\"", self.labels[x]),
        };
        match self.shape {
            Shape::Word { length } => writeln!(out, "shape = \"word\"\nlength = {length}").unwrap(),
            Shape::Tree { branching, depth, branch: None } => {
                writeln!(out, "shape = \"tree\"\nb = {branching}\ndepth = {depth}").unwrap()
            }
            Shape::Tree { .. } => return Err(structure_err("restricted trees have no file form")),
        }
        if let Some(letters) = &self.letters {
            let items: Vec<String> = letters.iter().map(|l| l.to_string()).collect();
            writeln!(out, "letters = [{}]", items.join(", ")).unwrap();
        }
        let user: Vec<_> = self.constants.iter().filter(|(n, _)| *n != ROOT).collect();
        if !user.is_empty() {
            out.push_str("\n[constants]\n");
            for (name, &x) in user {
                writeln!(out, "{name} = {}", elem(x)).unwrap();
            }
        }
        if !self.sets.is_empty() {
            out.push_str("\n[sets]\n");
            for (name, &m) in &self.sets {
                let items: Vec<String> = (0..self.size()).filter(|&x| m >> x & 1 == 1).map(elem).collect();
                writeln!(out, "{name} = [{}]", items.join(", ")).unwrap();
            }
        }
        Ok(out)
    }
}

/// Relational content of a structure with its domain renumbered in
/// breadth-first order from the root (successor index order), elements
/// unreachable from the root following in stored order. Labels and shape
/// are not part of it, so isomorphic structures share a key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalKey {
    succ: Vec<Vec<Option<usize>>>,
    letters: Option<Vec<u64>>,
    constants: BTreeMap<String, usize>,
    sets: BTreeMap<String, u64>,
}

impl LabStructure {
    pub fn canonical_key(&self) -> CanonicalKey {
        let n = self.size();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        if let Some(&root) = self.constants.get(ROOT) {
            seen[root] = true;
            order.push(root);
            let mut head = 0;
            while head < order.len() {
                let x = order[head];
                head += 1;
                for row in &self.succ {
                    if let Some(y) = row[x] {
                        if !seen[y] {
                            seen[y] = true;
                            order.push(y);
                        }
                    }
                }
            }
        }
        order.extend((0..n).filter(|&x| !seen[x]));
        let mut pos = vec![0; n];
        for (i, &x) in order.iter().enumerate() {
            pos[x] = i;
        }
        let remap = |m: u64| (0..n).filter(|&x| m >> x & 1 == 1).fold(0u64, |acc, x| acc | 1 << pos[x]);
        CanonicalKey {
            succ: self.succ.iter().map(|row| order.iter().map(|&x| row[x].map(|y| pos[y])).collect()).collect(),
            letters: self.letters.as_ref().map(|l| order.iter().map(|&x| l[x]).collect()),
            constants: self.constants.iter().map(|(k, &x)| (k.clone(), pos[x])).collect(),
            sets: self.sets.iter().map(|(k, &m)| (k.clone(), remap(m))).collect(),
        }
    }
}

pub(crate) fn mask_of(size: usize) -> u64 {
    if size >= 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

fn check_name(name: &str) -> Result<(), MsoError> {
    let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(structure_err(format!("'{name}' is not a valid name")))
    }
}

/// Base-`b` value of a column of symbols, most significant first.
pub fn product_letter(column: &[u8], b: usize) -> u64 {
    column.iter().fold(0u64, |acc, &s| acc * b as u64 + s as u64)
}
