//! Exact search for (b,k)-hash codes.
//!
//! Words of `{0..b-1}^n` are indexed by their base-b value, so index order is
//! lexicographic order. A partial code is always kept strictly increasing; the
//! search extends it with candidates drawn from a bitset that is narrowed every
//! time a word is added (a candidate survives only if every new k-subset it
//! would complete is still hashed).
//!
//! Symmetry levels:
//!
//! * `None`: plain subset enumeration.
//! * `FixFirstRow`: the smallest codeword is `0^n`.
//! * `FixFirstRowRowLex`: additionally the second codeword is a nondecreasing
//!   word, and every later codeword has at least its support.
//! * `Full`: the second codeword is `0^(n-d) 1^d`.
//!
//! Each level only discards codes that have an equivalent image (under row
//! permutation, coordinate permutation and per-coordinate relabelling) which is
//! still enumerated.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use itertools::Itertools;
use thiserror::Error;

use crate::hashcore::{first_violation, Code, CodeParams, HashError, Word};

/// Searches refuse alphabets with more words than this.
pub const MAX_SEARCH_WORDS: u128 = 1 << 20;
/// Oracle guard for [`brute_force_max`].
pub const MAX_ORACLE_WORDS: u128 = 12;

const CHECK_INTERVAL: u64 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("b^n = {0} words exceeds the search limit")]
    TooLarge(u128),
    #[error("b^n = {0} words exceeds the brute-force oracle guard of {MAX_ORACLE_WORDS}")]
    OracleGuard(u128),
    #[error("word length {0} exceeds 64 coordinates")]
    TooLong(usize),
    #[error("target size must be at least 1")]
    EmptyTarget,
    #[error("budget limits must be positive")]
    BadBudget,
    #[error(transparent)]
    Hash(#[from] HashError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymmetryLevel {
    None,
    FixFirstRow,
    FixFirstRowRowLex,
    Full,
}

impl SymmetryLevel {
    pub const ALL: [SymmetryLevel; 4] =
        [SymmetryLevel::None, SymmetryLevel::FixFirstRow, SymmetryLevel::FixFirstRowRowLex, SymmetryLevel::Full];
}

impl std::str::FromStr for SymmetryLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(SymmetryLevel::None),
            "fix-first-row" => Ok(SymmetryLevel::FixFirstRow),
            "fix-first-row+row-lex" | "row-lex" => Ok(SymmetryLevel::FixFirstRowRowLex),
            "full" => Ok(SymmetryLevel::Full),
            _ => Err(format!("unknown symmetry level '{s}'")),
        }
    }
}

impl std::fmt::Display for SymmetryLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SymmetryLevel::None => "none",
            SymmetryLevel::FixFirstRow => "fix-first-row",
            SymmetryLevel::FixFirstRowRowLex => "fix-first-row+row-lex",
            SymmetryLevel::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_secs: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: u64::MAX, max_secs: f64::INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub budget: Budget,
    pub symmetry: SymmetryLevel,
    pub deterministic: bool,
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: Budget::default(),
            symmetry: SymmetryLevel::Full,
            deterministic: true,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<(), SearchError> {
        if self.budget.max_nodes == 0 || self.budget.max_secs.is_nan() || self.budget.max_secs <= 0.0 {
            return Err(SearchError::BadBudget);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_secs: f64,
    pub peak_depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchVerdict {
    Found { code: Code, stats: SearchStats },
    ExhaustedNoSolution(SearchStats),
    BudgetExceeded(SearchStats),
}

impl SearchVerdict {
    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchVerdict::Found { stats, .. } => stats,
            SearchVerdict::ExhaustedNoSolution(stats) | SearchVerdict::BudgetExceeded(stats) => stats,
        }
    }

    pub fn certificate(&self) -> Option<&Code> {
        match self {
            SearchVerdict::Found { code, .. } => Some(code),
            _ => None,
        }
    }
}

/// Word table: symbols and one-hot bitplanes for every word of `{0..b-1}^n`.
struct Table {
    b: usize,
    k: usize,
    len: usize,
    full: u64,
    planes: Vec<u64>,
    support: Vec<u32>,
    nondecreasing: Vec<bool>,
    unary: Vec<bool>,
}

impl Table {
    fn new(params: &CodeParams) -> Result<Self, SearchError> {
        let (b, n) = (params.b(), params.n());
        if n > 64 {
            return Err(SearchError::TooLong(n));
        }
        let count = params.word_count();
        if count > MAX_SEARCH_WORDS {
            return Err(SearchError::TooLarge(count));
        }
        let len = count as usize;
        let mut planes = vec![0u64; len * b];
        let mut support = vec![0u32; len];
        let mut nondecreasing = vec![true; len];
        let mut unary = vec![true; len];
        for w in 0..len {
            let syms = index_to_symbols(w, b, n);
            for (i, &s) in syms.iter().enumerate() {
                planes[w * b + s as usize] |= 1u64 << i;
            }
            support[w] = syms.iter().filter(|&&s| s != 0).count() as u32;
            nondecreasing[w] = syms.windows(2).all(|p| p[0] <= p[1]);
            unary[w] = nondecreasing[w] && syms.iter().all(|&s| s <= 1);
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(Table { b, k: params.k(), len, full, planes, support, nondecreasing, unary })
    }

    #[inline]
    fn diff(&self, x: usize, y: usize) -> u64 {
        let (px, py) = (&self.planes[x * self.b..x * self.b + self.b], &self.planes[y * self.b..y * self.b + self.b]);
        let mut eq = 0u64;
        for s in 0..self.b {
            eq |= px[s] & py[s];
        }
        !eq & self.full
    }

    fn blocks(&self) -> usize {
        self.len.div_ceil(64)
    }
}

fn index_to_symbols(mut index: usize, b: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % b) as u8;
        index /= b;
    }
    out
}

fn symbols_to_index(symbols: &[u8], b: usize) -> usize {
    symbols.iter().fold(0, |acc, &s| acc * b + s as usize)
}

fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn popcount_from(bits: &[u64], start: usize) -> usize {
    let block = start / 64;
    if block >= bits.len() {
        return 0;
    }
    let head = (bits[block] >> (start % 64)).count_ones() as usize;
    head + popcount(&bits[block + 1..])
}

fn iter_bits(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(bi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(bi * 64 + t)
        })
    })
}

/// Shared between workers: node accounting, cancellation and the clock.
struct Control {
    start: Instant,
    budget: Budget,
    nodes: AtomicU64,
    out_of_budget: AtomicBool,
}

impl Control {
    fn over(&self) -> bool {
        self.out_of_budget.load(Ordering::Relaxed)
    }

    fn charge(&self, nodes: u64) -> bool {
        let total = self.nodes.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if total > self.budget.max_nodes || self.start.elapsed().as_secs_f64() > self.budget.max_secs {
            self.out_of_budget.store(true, Ordering::Relaxed);
        }
        self.over()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Found(Vec<usize>),
    Exhausted,
    Aborted,
}

struct Searcher<'a> {
    table: &'a Table,
    target: usize,
    symmetry: SymmetryLevel,
    // (k-2)-subsets of positions 0..t, per t
    subsets: Vec<Vec<Vec<usize>>>,
}

impl<'a> Searcher<'a> {
    fn new(table: &'a Table, target: usize, symmetry: SymmetryLevel) -> Self {
        let width = table.k - 2;
        let subsets = (0..=target).map(|t| (0..t).combinations(width).collect()).collect();
        Searcher { table, target, symmetry, subsets }
    }

    fn root(&self) -> Vec<u64> {
        let mut cand = vec![0u64; self.table.blocks()];
        for w in 0..self.table.len {
            cand[w / 64] |= 1u64 << (w % 64);
        }
        cand
    }

    /// Whether `word` may be placed at position `depth` (beyond candidacy).
    fn allowed(&self, depth: usize, word: usize) -> bool {
        match (depth, self.symmetry) {
            (_, SymmetryLevel::None) => true,
            (0, _) => word == 0,
            (1, SymmetryLevel::FixFirstRowRowLex) => self.table.nondecreasing[word],
            (1, SymmetryLevel::Full) => self.table.unary[word],
            _ => true,
        }
    }

    /// Candidates after appending `c` to `code` (which must not contain it yet).
    fn child(&self, code: &[usize], cand: &[u64], c: usize, out: &mut Vec<u64>) {
        let t = self.table;
        out.clear();
        out.resize(cand.len(), 0);
        let subsets = &self.subsets[code.len()];
        let smasks: Vec<u64> = subsets
            .iter()
            .map(|s| {
                let mut acc = t.full;
                for (i, &a) in s.iter().enumerate() {
                    acc &= t.diff(code[a], c);
                    for &b in &s[i + 1..] {
                        acc &= t.diff(code[a], code[b]);
                    }
                }
                acc
            })
            .collect();
        let floor = if code.len() == 1 && self.symmetry >= SymmetryLevel::FixFirstRowRowLex { t.support[c] } else { 0 };
        let mut dx = vec![0u64; code.len()];
        let start = c + 1;
        let first_block = start / 64;
        for bi in first_block..cand.len() {
            let mut bits = cand[bi];
            if bi == first_block {
                bits &= u64::MAX.checked_shl((start % 64) as u32).unwrap_or(0);
            }
            while bits != 0 {
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let x = bi * 64 + tz;
                if t.support[x] < floor {
                    continue;
                }
                let dcx = t.diff(c, x);
                for (slot, &y) in dx.iter_mut().zip(code) {
                    *slot = t.diff(y, x);
                }
                let ok = subsets.iter().zip(&smasks).all(|(s, &sm)| {
                    let mut acc = sm & dcx;
                    for &a in s {
                        acc &= dx[a];
                    }
                    acc != 0
                });
                if ok {
                    out[bi] |= 1u64 << tz;
                }
            }
        }
    }

    /// Enumerates all extensions of `code` up to `depth` words, in order.
    fn prefixes(
        &self,
        depth: usize,
        code: &mut Vec<usize>,
        cand: &[u64],
        nodes: &mut u64,
        out: &mut Vec<(Vec<usize>, Vec<u64>)>,
    ) {
        if code.len() == depth {
            out.push((code.clone(), cand.to_vec()));
            return;
        }
        if code.len() + popcount(cand) < self.target {
            return;
        }
        let mut next = Vec::new();
        for c in iter_bits(cand) {
            if code.len() + popcount_from(cand, c) < self.target {
                break;
            }
            if !self.allowed(code.len(), c) {
                continue;
            }
            *nodes += 1;
            self.child(code, cand, c, &mut next);
            code.push(c);
            self.prefixes(depth, code, &next, nodes, out);
            code.pop();
        }
    }

    fn dfs(
        &self,
        code: &mut Vec<usize>,
        cand: &[u64],
        work: &mut Work,
        ctl: &Control,
        cancel: &dyn Fn() -> bool,
    ) -> Outcome {
        if code.len() == self.target {
            return Outcome::Found(code.clone());
        }
        if code.len() + popcount(cand) < self.target {
            return Outcome::Exhausted;
        }
        let mut next = Vec::with_capacity(cand.len());
        for c in iter_bits(cand) {
            if code.len() + popcount_from(cand, c) < self.target {
                break;
            }
            if !self.allowed(code.len(), c) {
                continue;
            }
            work.nodes += 1;
            work.pending += 1;
            if work.pending >= CHECK_INTERVAL {
                let pending = std::mem::take(&mut work.pending);
                if ctl.charge(pending) || cancel() {
                    return Outcome::Aborted;
                }
            }
            self.child(code, cand, c, &mut next);
            code.push(c);
            work.peak = work.peak.max(code.len());
            let r = self.dfs(code, &next, work, ctl, cancel);
            code.pop();
            if r != Outcome::Exhausted {
                return r;
            }
        }
        Outcome::Exhausted
    }
}

#[derive(Default)]
struct Work {
    nodes: u64,
    pending: u64,
    peak: usize,
}

fn to_code(params: &CodeParams, indices: &[usize]) -> Code {
    let words = indices
        .iter()
        .map(|&i| Word::new(index_to_symbols(i, params.b(), params.n()), params.b()).expect("table word"))
        .collect();
    Code::new(*params, words).expect("search produced distinct words")
}

/// Decides whether a (b,k)-hash code with exactly `m` words exists.
pub fn search_exact(params: &CodeParams, m: usize, config: &SearchConfig) -> Result<SearchVerdict, SearchError> {
    if m == 0 {
        return Err(SearchError::EmptyTarget);
    }
    config.validate()?;
    let table = Table::new(params)?;
    let start = Instant::now();
    let ctl = Control { start, budget: config.budget, nodes: AtomicU64::new(0), out_of_budget: AtomicBool::new(false) };

    if (m as u128) > params.word_count() {
        let stats = SearchStats { nodes: 0, elapsed_secs: start.elapsed().as_secs_f64(), peak_depth: 0 };
        return Ok(SearchVerdict::ExhaustedNoSolution(stats));
    }

    let searcher = Searcher::new(&table, m, config.symmetry);
    let split = if config.symmetry >= SymmetryLevel::FixFirstRowRowLex { 3 } else { 2 };
    let split = split.min(m);
    let mut prefix_nodes = 0u64;
    let mut tasks = Vec::new();
    searcher.prefixes(split, &mut Vec::new(), &searcher.root(), &mut prefix_nodes, &mut tasks);
    ctl.charge(prefix_nodes);

    let finish =
        |nodes: u64, peak: usize| SearchStats { nodes, elapsed_secs: start.elapsed().as_secs_f64(), peak_depth: peak };

    if split == m {
        let stats = finish(prefix_nodes, if tasks.is_empty() { 0 } else { m });
        return Ok(match tasks.first() {
            Some((code, _)) => found(params, code, stats),
            None => SearchVerdict::ExhaustedNoSolution(stats),
        });
    }

    let results: Vec<Mutex<Option<(Outcome, u64, usize)>>> = (0..tasks.len()).map(|_| Mutex::new(None)).collect();
    let next_task = AtomicUsize::new(0);
    let best_found = AtomicUsize::new(usize::MAX);
    let threads = config.threads.max(1).min(tasks.len().max(1));
    let deterministic = config.deterministic;

    let worker = || loop {
        let idx = next_task.fetch_add(1, Ordering::Relaxed);
        if idx >= tasks.len() {
            break;
        }
        let cancelled = || {
            let best = best_found.load(Ordering::Relaxed);
            ctl.over() || if deterministic { best < idx } else { best != usize::MAX }
        };
        if cancelled() {
            *results[idx].lock().unwrap() = Some((Outcome::Aborted, 0, 0));
            continue;
        }
        let (prefix, cand) = &tasks[idx];
        let mut code = prefix.clone();
        let mut work = Work { peak: code.len(), ..Work::default() };
        let outcome = searcher.dfs(&mut code, cand, &mut work, &ctl, &cancelled);
        ctl.charge(std::mem::take(&mut work.pending));
        if matches!(outcome, Outcome::Found(_)) {
            best_found.fetch_min(idx, Ordering::Relaxed);
        }
        *results[idx].lock().unwrap() = Some((outcome, work.nodes, work.peak));
    };

    if threads <= 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(worker);
            }
        });
    }

    let results: Vec<(Outcome, u64, usize)> =
        results.into_iter().map(|r| r.into_inner().unwrap().unwrap_or((Outcome::Aborted, 0, 0))).collect();

    let winner = results.iter().position(|(o, _, _)| matches!(o, Outcome::Found(_)));
    // in deterministic mode only the tasks up to the winner count, and those
    // ran to completion regardless of scheduling
    let counted = match winner {
        Some(w) if deterministic => &results[..=w],
        _ => &results[..],
    };
    let nodes = prefix_nodes + counted.iter().map(|r| r.1).sum::<u64>();
    let peak = counted.iter().map(|r| r.2).max().unwrap_or(0).max(split);
    let stats = finish(nodes, peak);
    Ok(match winner {
        Some(w) => {
            let Outcome::Found(code) = &results[w].0 else { unreachable!() };
            found(params, code, stats)
        }
        None if results.iter().any(|r| r.0 == Outcome::Aborted) => SearchVerdict::BudgetExceeded(stats),
        None => SearchVerdict::ExhaustedNoSolution(stats),
    })
}

fn found(params: &CodeParams, indices: &[usize], stats: SearchStats) -> SearchVerdict {
    let code = to_code(params, indices);
    assert_eq!(first_violation(&code), None, "search produced an invalid certificate");
    SearchVerdict::Found { code, stats }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeStatus {
    Exact,
    Bounded,
}

impl std::fmt::Display for SizeStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SizeStatus::Exact => "exact",
            SizeStatus::Bounded => "bounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxSize {
    pub lower: usize,
    pub certificate: Code,
    pub upper: usize,
    pub status: SizeStatus,
    pub nodes: u64,
}

/// Largest (b,k)-hash code, found by asking [`search_exact`] for m = 1, 2, ...
///
/// The budget applies to each individual call. When a call runs out of budget
/// the result is `Bounded` with the trivial upper bound `b^n`.
pub fn max_size(params: &CodeParams, config: &SearchConfig) -> Result<MaxSize, SearchError> {
    let total = params.word_count();
    if total > MAX_SEARCH_WORDS {
        return Err(SearchError::TooLarge(total));
    }
    let mut certificate = Code::new(*params, Vec::new())?;
    let mut nodes = 0;
    let mut m = 1;
    loop {
        let verdict = search_exact(params, m, config)?;
        nodes += verdict.stats().nodes;
        match verdict {
            SearchVerdict::Found { code, .. } => {
                certificate = code;
                m += 1;
            }
            SearchVerdict::ExhaustedNoSolution(_) => {
                return Ok(MaxSize { lower: m - 1, certificate, upper: m - 1, status: SizeStatus::Exact, nodes });
            }
            SearchVerdict::BudgetExceeded(_) => {
                return Ok(MaxSize {
                    lower: m - 1,
                    certificate,
                    upper: total as usize,
                    status: SizeStatus::Bounded,
                    nodes,
                });
            }
        }
    }
}

/// Exact maximum by enumerating subsets of all `b^n` words, largest first.
/// Uses a direct per-coordinate check and none of the search machinery.
pub fn brute_force_max(params: &CodeParams) -> Result<(usize, Code), SearchError> {
    let total = params.word_count();
    if total > MAX_ORACLE_WORDS {
        return Err(SearchError::OracleGuard(total));
    }
    let (b, k, n) = (params.b(), params.k(), params.n());
    let all: Vec<Vec<u8>> = (0..total as usize).map(|i| index_to_symbols(i, b, n)).collect();
    let hashed = |tuple: &[&Vec<u8>]| (0..n).any(|i| tuple.iter().map(|w| w[i]).all_unique());
    for size in (0..=all.len()).rev() {
        let hit = (0..all.len()).combinations(size).find(|subset| {
            subset.iter().combinations(k).all(|t| hashed(&t.iter().map(|&&i| &all[i]).collect::<Vec<_>>()))
        });
        if let Some(subset) = hit {
            let words = subset.iter().map(|&i| Word::new(all[i].clone(), b)).collect::<Result<Vec<_>, _>>()?;
            return Ok((size, Code::new(*params, words)?));
        }
    }
    unreachable!("the empty code is always a hash code")
}

/// A coordinate permutation followed by per-coordinate alphabet bijections:
/// output coordinate `j` carries `relabel[j][w[perm[j]]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSymmetry {
    pub perm: Vec<usize>,
    pub relabel: Vec<Vec<u8>>,
}

impl CodeSymmetry {
    pub fn identity(b: usize, n: usize) -> Self {
        CodeSymmetry { perm: (0..n).collect(), relabel: vec![(0..b as u8).collect(); n] }
    }

    pub fn random<R: rand::Rng>(b: usize, n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let relabel = (0..n)
            .map(|_| {
                let mut r: Vec<u8> = (0..b as u8).collect();
                r.shuffle(rng);
                r
            })
            .collect();
        CodeSymmetry { perm, relabel }
    }

    pub fn apply_word(&self, word: &[u8]) -> Vec<u8> {
        self.perm.iter().zip(&self.relabel).map(|(&src, r)| r[word[src] as usize]).collect()
    }

    pub fn apply(&self, code: &Code) -> Code {
        let b = code.params().b();
        let words = code
            .words()
            .iter()
            .map(|w| Word::new(self.apply_word(w.symbols()), b).expect("bijection keeps symbols in range"))
            .collect();
        Code::new(*code.params(), words).expect("symmetries preserve distinctness")
    }
}

/// Canonical representative of `code` under row permutations, coordinate
/// permutations and per-coordinate alphabet bijections: the image whose sorted
/// word list is lexicographically smallest.
///
/// The smallest image always starts with `0^n` followed by `0^(n-d) 1^d`, d the
/// minimum distance, so only group elements sending some pair at distance d to
/// those two words are tried; the remaining stabiliser is enumerated in full.
pub fn canonicalize(code: &Code) -> Code {
    let params = *code.params();
    let (b, n) = (params.b(), params.n());
    let rows: Vec<&[u8]> = code.words().iter().map(|w| w.symbols()).collect();
    if rows.len() <= 1 {
        let words = rows.iter().map(|_| Word::zeros(n, b).expect("valid")).collect();
        return Code::new(params, words).expect("valid");
    }
    let dist = |x: &[u8], y: &[u8]| x.iter().zip(y).filter(|(a, b)| a != b).count();
    let d = rows.iter().tuple_combinations().map(|(x, y)| dist(x, y)).min().expect("two rows");

    let mut best: Option<Vec<Vec<u8>>> = None;
    for (i0, r0) in rows.iter().enumerate() {
        for (i1, r1) in rows.iter().enumerate() {
            if i0 == i1 || dist(r0, r1) != d {
                continue;
            }
            // columns where r1 agrees with r0 first, then the rest; each column
            // gets a base bijection taking r0 to 0 and r1 to 1
            let (same, differ): (Vec<usize>, Vec<usize>) = (0..n).partition(|&j| r0[j] == r1[j]);
            let base: Vec<Vec<u8>> = (0..n)
                .map(|j| {
                    let mut fixed = vec![r0[j]];
                    if r1[j] != r0[j] {
                        fixed.push(r1[j]);
                    }
                    bijection_fixing(b, &fixed)
                })
                .collect();
            let free_same: Vec<Vec<Vec<u8>>> = same.iter().map(|_| permutations_fixing(b, 1)).collect();
            let free_diff: Vec<Vec<Vec<u8>>> = differ.iter().map(|_| permutations_fixing(b, 2)).collect();
            for ps in same.iter().copied().permutations(same.len()) {
                for pd in differ.iter().copied().permutations(differ.len()) {
                    let order: Vec<usize> = ps.iter().chain(&pd).copied().collect();
                    let choices = free_same.iter().chain(&free_diff).map(|v| 0..v.len()).multi_cartesian_product();
                    for choice in choices {
                        let maps: Vec<&Vec<u8>> =
                            free_same.iter().chain(&free_diff).zip(&choice).map(|(opts, &c)| &opts[c]).collect();
                        let mut image: Vec<Vec<u8>> = rows
                            .iter()
                            .map(|row| {
                                order
                                    .iter()
                                    .zip(&maps)
                                    .map(|(&src, map)| map[base[src][row[src] as usize] as usize])
                                    .collect()
                            })
                            .collect();
                        image.sort_unstable();
                        if best.as_ref().is_none_or(|b| image < *b) {
                            best = Some(image);
                        }
                    }
                }
            }
        }
    }
    let words = best
        .expect("at least one pair at minimum distance")
        .into_iter()
        .map(|w| Word::new(w, b).expect("valid"))
        .collect();
    Code::new(params, words).expect("images of distinct words are distinct")
}

/// A bijection of `0..b` sending `fixed[i]` to `i` and the rest in increasing order.
fn bijection_fixing(b: usize, fixed: &[u8]) -> Vec<u8> {
    let mut map = vec![0u8; b];
    let mut next = fixed.len() as u8;
    for s in 0..b as u8 {
        match fixed.iter().position(|&f| f == s) {
            Some(i) => map[s as usize] = i as u8,
            None => {
                map[s as usize] = next;
                next += 1;
            }
        }
    }
    map
}

/// All permutations of `0..b` fixing `0..keep` pointwise.
fn permutations_fixing(b: usize, keep: usize) -> Vec<Vec<u8>> {
    let keep = keep.min(b);
    (keep as u8..b as u8).permutations(b - keep).map(|tail| (0..keep as u8).chain(tail).collect()).collect()
}

/// Index of a word in the search table (base-b value).
pub fn word_index(word: &Word, b: usize) -> usize {
    symbols_to_index(word.symbols(), b)
}
