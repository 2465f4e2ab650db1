//! Codewords, codes and the k-hashing predicate.
//!
//! A k-tuple of words over `{0, .., b-1}^n` is *k-hashed* when some coordinate
//! carries k pairwise distinct symbols. A code is a (b,k)-hash code when every
//! k distinct codewords are k-hashed.
//!
//! Besides the predicate itself this module hosts the 2-bit embedding of
//! ternary words into binary words and the ternary relation `R` it induces,
//! together with the witness word families used to probe that relation.

use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use smallvec::SmallVec;
use thiserror::Error;

/// Largest alphabet supported; code files spell symbols as single decimal digits.
pub const MAX_ALPHABET: usize = 10;

const CHUNK_BITS: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HashError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("expected {expected} words, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("word has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("symbol {symbol} at coordinate {coord} is outside the alphabet 0..{b}")]
    SymbolOutOfRange { symbol: u8, coord: usize, b: usize },
    #[error("duplicate codeword {0}")]
    Duplicate(String),
    #[error("binary word has odd length {0}")]
    OddLength(usize),
    #[error("forbidden block 11 at position {0}")]
    ForbiddenBlock(usize),
    #[error("binary words have different lengths")]
    LengthMismatch,
    #[error("witness family needs 0 <= n < ell (got n = {n}, ell = {ell})")]
    WitnessRange { n: usize, ell: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The triple (b, k, n): alphabet size, hash arity and word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeParams {
    b: usize,
    k: usize,
    n: usize,
}

impl CodeParams {
    pub fn new(b: usize, k: usize, n: usize) -> Result<Self, HashError> {
        if !(2..=MAX_ALPHABET).contains(&b) {
            return Err(HashError::Params(format!("alphabet size b = {b} must lie in 2..={MAX_ALPHABET}")));
        }
        if k < 2 || k > b {
            return Err(HashError::Params(format!("need 2 <= k <= b, got k = {k}, b = {b}")));
        }
        if n == 0 {
            return Err(HashError::Params("word length n must be at least 1".into()));
        }
        Ok(CodeParams { b, k, n })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of words in `{0..b-1}^n`, saturating at `u128::MAX`.
    pub fn word_count(&self) -> u128 {
        (self.b as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX)
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b={} k={} n={}", self.b, self.k, self.n)
    }
}

/// Coordinates on which two words differ. Bit `i` of chunk `i / 128` is coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiffMask {
    chunks: SmallVec<[u128; 1]>,
}

impl DiffMask {
    pub fn full(n: usize) -> Self {
        let mut chunks: SmallVec<[u128; 1]> = SmallVec::new();
        for c in 0..chunk_count(n) {
            chunks.push(valid_bits(n, c));
        }
        DiffMask { chunks }
    }

    pub fn is_zero(&self) -> bool {
        self.chunks.iter().all(|&c| c == 0)
    }

    pub fn count(&self) -> usize {
        self.chunks.iter().map(|c| c.count_ones() as usize).sum()
    }

    pub fn contains(&self, coord: usize) -> bool {
        self.chunks.get(coord / CHUNK_BITS).is_some_and(|c| c >> (coord % CHUNK_BITS) & 1 == 1)
    }

    pub fn intersect_with(&mut self, other: &DiffMask) {
        for (a, b) in self.chunks.iter_mut().zip(&other.chunks) {
            *a &= *b;
        }
    }

    /// Set coordinates in increasing order.
    pub fn coords(&self) -> impl Iterator<Item = usize> + '_ {
        self.chunks.iter().enumerate().flat_map(|(ci, &c)| {
            let mut bits = c;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(ci * CHUNK_BITS + t)
            })
        })
    }
}

fn chunk_count(n: usize) -> usize {
    n.div_ceil(CHUNK_BITS).max(1)
}

fn valid_bits(n: usize, chunk: usize) -> u128 {
    let lo = chunk * CHUNK_BITS;
    if n >= lo + CHUNK_BITS {
        u128::MAX
    } else if n <= lo {
        0
    } else {
        (1u128 << (n - lo)) - 1
    }
}

/// A codeword. Keeps the symbols and, per symbol value, a bitplane of the
/// coordinates holding that value so that difference masks are a few ANDs.
#[derive(Clone)]
pub struct Word {
    symbols: Vec<u8>,
    alphabet: usize,
    // planes[s * chunks + c]
    planes: Vec<u128>,
}

impl Word {
    pub fn new(symbols: Vec<u8>, b: usize) -> Result<Self, HashError> {
        if !(2..=MAX_ALPHABET).contains(&b) {
            return Err(HashError::Params(format!("alphabet size {b} out of range")));
        }
        if let Some((coord, &symbol)) = symbols.iter().find_position(|&&s| s as usize >= b) {
            return Err(HashError::SymbolOutOfRange { symbol, coord, b });
        }
        let chunks = chunk_count(symbols.len());
        let mut planes = vec![0u128; b * chunks];
        for (i, &s) in symbols.iter().enumerate() {
            planes[s as usize * chunks + i / CHUNK_BITS] |= 1u128 << (i % CHUNK_BITS);
        }
        Ok(Word { symbols, alphabet: b, planes })
    }

    /// Parses a digit string such as `"0120"`.
    pub fn parse(text: &str, b: usize) -> Result<Self, HashError> {
        let mut symbols = Vec::with_capacity(text.len());
        for (coord, ch) in text.chars().enumerate() {
            let d = ch.to_digit(10).ok_or_else(|| HashError::Parse {
                line: 0,
                msg: format!("'{ch}' at coordinate {coord} is not a digit"),
            })?;
            symbols.push(d as u8);
        }
        Word::new(symbols, b)
    }

    pub fn zeros(n: usize, b: usize) -> Result<Self, HashError> {
        Word::new(vec![0; n], b)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Number of nonzero coordinates.
    pub fn support(&self) -> usize {
        self.symbols.iter().filter(|&&s| s != 0).count()
    }

    /// Coordinates where `self` and `other` differ. Both words must have the same length.
    pub fn diff_mask(&self, other: &Word) -> DiffMask {
        assert_eq!(self.len(), other.len(), "diff_mask on words of different length");
        let n = self.len();
        let chunks = chunk_count(n);
        let common = self.alphabet.min(other.alphabet);
        let mut out: SmallVec<[u128; 1]> = SmallVec::with_capacity(chunks);
        for c in 0..chunks {
            let mut eq = 0u128;
            for s in 0..common {
                eq |= self.planes[s * chunks + c] & other.planes[s * chunks + c];
            }
            out.push(!eq & valid_bits(n, c));
        }
        DiffMask { chunks: out }
    }

    fn check(&self, params: &CodeParams) -> Result<(), HashError> {
        if self.len() != params.n {
            return Err(HashError::WrongLength { expected: params.n, got: self.len() });
        }
        if let Some((coord, &symbol)) = self.symbols.iter().find_position(|&&s| s as usize >= params.b) {
            return Err(HashError::SymbolOutOfRange { symbol, coord, b: params.b });
        }
        Ok(())
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Word {}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.symbols.cmp(&other.symbols)
    }
}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.symbols.hash(state);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

/// Intersection of all pairwise difference masks; nonzero iff the words are hashed.
/// An empty or singleton slice yields the all-ones mask.
pub fn hash_mask<W: Borrow<Word>>(words: &[W], n: usize) -> DiffMask {
    let mut acc = DiffMask::full(n);
    for (x, y) in words.iter().tuple_combinations() {
        acc.intersect_with(&x.borrow().diff_mask(y.borrow()));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// True iff some coordinate holds k pairwise distinct symbols.
pub fn is_hashed<W: Borrow<Word>>(words: &[W], params: &CodeParams) -> Result<bool, HashError> {
    if words.len() != params.k {
        return Err(HashError::WrongCount { expected: params.k, got: words.len() });
    }
    for w in words {
        w.borrow().check(params)?;
    }
    Ok(!hash_mask(words, params.n).is_zero())
}

/// A duplicate-free set of codewords, stored in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Code {
    params: CodeParams,
    words: Vec<Word>,
}

impl Code {
    /// Builds a code; words are sorted, duplicates are an error.
    pub fn new(params: CodeParams, mut words: Vec<Word>) -> Result<Self, HashError> {
        for w in &words {
            w.check(&params)?;
        }
        words.sort();
        if let Some((a, _)) = words.iter().tuple_windows().find(|(a, b)| a == b) {
            return Err(HashError::Duplicate(a.to_string()));
        }
        // normalise the per-word alphabet so that equal codes compare equal
        let words = words
            .into_iter()
            .map(|w| if w.alphabet == params.b { Ok(w) } else { Word::new(w.symbols, params.b) })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Code { params, words })
    }

    pub fn from_strs(params: CodeParams, words: &[&str]) -> Result<Self, HashError> {
        let words = words.iter().map(|w| Word::parse(w, params.b)).collect::<Result<Vec<_>, _>>()?;
        Code::new(params, words)
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Parses the code file format: a `b=<b> k=<k> n=<n>` header, then one
    /// codeword per line. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, HashError> {
        let mut params: Option<CodeParams> = None;
        let mut words = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match params {
                None => params = Some(parse_header(line, line_no)?),
                Some(p) => {
                    let w =
                        Word::parse(line, p.b).map_err(|e| HashError::Parse { line: line_no, msg: e.to_string() })?;
                    if w.len() != p.n {
                        return Err(HashError::Parse {
                            line: line_no,
                            msg: format!("codeword {line} has length {}, expected {}", w.len(), p.n),
                        });
                    }
                    words.push(w);
                }
            }
        }
        let params = params.ok_or(HashError::Parse { line: 0, msg: "missing header b=.. k=.. n=..".into() })?;
        Code::new(params, words)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.params);
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.words.iter().join(","))
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<CodeParams, HashError> {
    let err = |msg: String| HashError::Parse { line: line_no, msg };
    let (mut b, mut k, mut n) = (None, None, None);
    for field in line.split_whitespace() {
        let (key, value) =
            field.split_once('=').ok_or_else(|| err(format!("expected key=value in header, found '{field}'")))?;
        let value: usize = value.parse().map_err(|_| err(format!("bad number in '{field}'")))?;
        match key {
            "b" => b = Some(value),
            "k" => k = Some(value),
            "n" => n = Some(value),
            _ => return Err(err(format!("unknown header key '{key}'"))),
        }
    }
    match (b, k, n) {
        (Some(b), Some(k), Some(n)) => CodeParams::new(b, k, n).map_err(|e| err(e.to_string())),
        _ => Err(err("header must define b, k and n".into())),
    }
}

/// Smallest (lexicographic) index tuple of k codewords that is not hashed.
pub fn first_violation(code: &Code) -> Option<Vec<usize>> {
    let k = code.params.k;
    let n = code.params.n;
    if code.words.len() < k {
        return None;
    }
    // pair masks once, then tuples in lexicographic order
    let m = code.words.len();
    let mut pair = vec![DiffMask::full(n); m * m];
    for i in 0..m {
        for j in i + 1..m {
            let d = code.words[i].diff_mask(&code.words[j]);
            pair[i * m + j] = d.clone();
            pair[j * m + i] = d;
        }
    }
    (0..m).combinations(k).find(|t| {
        let mut acc = DiffMask::full(n);
        for (&i, &j) in t.iter().tuple_combinations() {
            acc.intersect_with(&pair[i * m + j]);
        }
        acc.is_zero()
    })
}

/// A word over `{0,1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn new(bits: Vec<u8>) -> Result<Self, HashError> {
        if let Some((coord, &symbol)) = bits.iter().find_position(|&&b| b > 1) {
            return Err(HashError::SymbolOutOfRange { symbol, coord, b: 2 });
        }
        Ok(BinaryWord(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn block(&self, t: usize) -> (u8, u8) {
        (self.0[2 * t], self.0[2 * t + 1])
    }

    fn push_block(&mut self, block: [u8; 2], times: usize) {
        for _ in 0..times {
            self.0.extend_from_slice(&block);
        }
    }
}

impl FromStr for BinaryWord {
    type Err = HashError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for (coord, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(HashError::Parse {
                        line: 0,
                        msg: format!("'{ch}' at position {} is not a bit", coord + 1),
                    })
                }
            }
        }
        Ok(BinaryWord(bits))
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// 0 -> 00, 1 -> 01, 2 -> 10.
pub fn ternary_to_binary(word: &[u8]) -> Result<BinaryWord, HashError> {
    let mut out = Vec::with_capacity(2 * word.len());
    for (coord, &s) in word.iter().enumerate() {
        match s {
            0 => out.extend_from_slice(&[0, 0]),
            1 => out.extend_from_slice(&[0, 1]),
            2 => out.extend_from_slice(&[1, 0]),
            _ => return Err(HashError::SymbolOutOfRange { symbol: s, coord, b: 3 }),
        }
    }
    Ok(BinaryWord(out))
}

/// Inverse of [`ternary_to_binary`]; rejects odd lengths and `11` blocks.
pub fn binary_to_ternary(word: &BinaryWord) -> Result<Vec<u8>, HashError> {
    if !word.len().is_multiple_of(2) {
        return Err(HashError::OddLength(word.len()));
    }
    (0..word.len() / 2)
        .map(|t| match word.block(t) {
            (0, 0) => Ok(0),
            (0, 1) => Ok(1),
            (1, 0) => Ok(2),
            _ => Err(HashError::ForbiddenBlock(2 * t + 1)),
        })
        .collect()
}

/// The relation `R(X, Y, Z)`: all three words lie in `{00,01,10}*` and some
/// block starting at an odd 1-based position carries the three blocks
/// `00`, `01`, `10` in some order.
pub fn relation_r(x: &BinaryWord, y: &BinaryWord, z: &BinaryWord) -> Result<bool, HashError> {
    if x.len() != y.len() || x.len() != z.len() {
        return Err(HashError::LengthMismatch);
    }
    if !x.len().is_multiple_of(2) {
        return Err(HashError::OddLength(x.len()));
    }
    let blocks = x.len() / 2;
    let words = [x, y, z];
    let in_t_prime = words.iter().all(|w| (0..blocks).all(|t| w.block(t) != (1, 1)));
    if !in_t_prime {
        return Ok(false);
    }
    Ok((0..blocks).any(|t| {
        let (a, b, c) = (x.block(t), y.block(t), z.block(t));
        a != b && a != c && b != c
    }))
}

/// The words `X = (00)^n (01) (00)^(ell-n-1)`, `Y = (10)^n (00) (00)^(ell-n-1)`,
/// `Z = (10)^n (10) (00)^(ell-n-1)`, each of length `2 ell`.
pub fn witness_family(n: usize, ell: usize) -> Result<(BinaryWord, BinaryWord, BinaryWord), HashError> {
    if n >= ell {
        return Err(HashError::WitnessRange { n, ell });
    }
    let tail = ell - n - 1;
    let mut x = BinaryWord::default();
    x.push_block([0, 0], n);
    x.push_block([0, 1], 1);
    x.push_block([0, 0], tail);
    let mut y = BinaryWord::default();
    y.push_block([1, 0], n);
    y.push_block([0, 0], 1);
    y.push_block([0, 0], tail);
    let mut z = BinaryWord::default();
    z.push_block([1, 0], n);
    z.push_block([1, 0], 1);
    z.push_block([0, 0], tail);
    Ok((x, y, z))
}

/// Zips k equal-length words into one word over the product alphabet.
pub fn product_word<W: Borrow<Word>>(words: &[W]) -> Result<Vec<Vec<u8>>, HashError> {
    let Some(first) = words.first() else {
        return Ok(Vec::new());
    };
    let len = first.borrow().len();
    if let Some(w) = words.iter().map(Borrow::borrow).find(|w: &&Word| w.len() != len) {
        return Err(HashError::WrongLength { expected: len, got: w.len() });
    }
    Ok((0..len).map(|i| words.iter().map(|w| w.borrow().symbols[i]).collect()).collect())
}
