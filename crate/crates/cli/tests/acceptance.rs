//! Acceptance suite: one PASS/FAIL line per primary criterion.
//!
//! Runs without the libtest harness so the lines are always shown. Exits
//! non-zero if any criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triff_cli::{run, EXIT_NO, EXIT_OK};
use triff_core::encoders::cnf::{model_text, parse_dimacs};
use triff_core::encoders::external::{run_solver, solver_from_env, SolverAnswer};
use triff_core::encoders::smtlib::find_model;
use triff_core::encoders::{decode_assignment, dpll, emit_dimacs, emit_smtlib, ConstraintDocument};
use triff_core::hashcore::{
    first_violation, is_hashed, relation_r, ternary_to_binary, witness_family, BinaryWord, Code, CodeParams, Word,
};
use triff_core::msolab::{
    ef_game_search, evaluate, random_tree, random_word, resample_leaves, sample_sentences, Assignment, LabStructure,
    Player, TypeEngine, Vocabulary,
};
use triff_core::searcher::{search_exact, SearchConfig, SearchVerdict};

/// Budget for the native m = 11, n = 5 exhaustion attempt.
const NATIVE_N5_BUDGET_SECS: f64 = 600.0;
const SIZE10_LIMIT: Duration = Duration::from_secs(600);
const MAXSIZE_N2_LIMIT: Duration = Duration::from_secs(1);
const MAXSIZE_N4_LIMIT: Duration = Duration::from_secs(600);
const WITNESS_LIMIT: Duration = Duration::from_secs(1);
const EF_LIMIT: Duration = Duration::from_secs(300);
const EF_WORD_PAIRS: usize = 200;
const EF_TREE_PAIRS: usize = 50;
const EF_SENTENCES: usize = 200;
const EMBEDDING_RANDOM_TRIPLES: usize = 500;
const COMPOSITION_PAIRS: usize = 100;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn triff(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("triff").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// R on the binary embedding, decoded block by block.
fn r_oracle(x: &BinaryWord, y: &BinaryWord, z: &BinaryWord) -> bool {
    let (x, y, z) = (x.bits(), y.bits(), z.bits());
    let block = |w: &[u8], t: usize| match (w[2 * t], w[2 * t + 1]) {
        (0, 0) => Some(0),
        (0, 1) => Some(1),
        (1, 0) => Some(2),
        _ => None,
    };
    let blocks = x.len() / 2;
    let mut symbols = Vec::new();
    for t in 0..blocks {
        match (block(x, t), block(y, t), block(z, t)) {
            (Some(a), Some(b), Some(c)) => symbols.push((a, b, c)),
            _ => return false,
        }
    }
    symbols.iter().any(|&(a, b, c)| a != b && b != c && a != c)
}

fn hashed_oracle(words: &[Vec<u8>]) -> bool {
    (0..words[0].len()).any(|i| {
        let col: Vec<u8> = words.iter().map(|w| w[i]).collect();
        col[0] != col[1] && col[1] != col[2] && col[0] != col[2]
    })
}

fn n5_nonexistence() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("n5m10.code");
    let start = Instant::now();
    let (code, _, err) = triff(&[
        "search",
        "--b",
        "3",
        "--k",
        "3",
        "--n",
        "5",
        "--size",
        "10",
        "--symmetry",
        "full",
        "--out",
        path(&cert),
    ]);
    let t10 = start.elapsed();
    check(code == EXIT_OK, || format!("search --size 10 exited {code}: {err}"))?;
    check(t10 <= SIZE10_LIMIT, || format!("size 10 took {t10:?}"))?;
    let (vcode, vout, _) = triff(&["verify", path(&cert)]);
    check(vcode == EXIT_OK && vout.trim() == "k-hash: yes", || format!("certificate fails verify ({vcode})"))?;
    let words = Code::parse(&fs::read_to_string(&cert).unwrap()).unwrap();
    check(words.len() == 10, || format!("certificate has {} words", words.len()))?;

    let start = Instant::now();
    let budget = NATIVE_N5_BUDGET_SECS.to_string();
    let (native, _, _) =
        triff(&["search", "--b", "3", "--k", "3", "--n", "5", "--size", "11", "--budget-secs", &budget]);
    let t11 = start.elapsed();
    let native_unsat = native == EXIT_NO;

    let doc_path = dir.path().join("n5m11.cnf");
    let (ecode, _, eerr) = triff(&[
        "encode",
        "--format",
        "dimacs",
        "--b",
        "3",
        "--k",
        "3",
        "--n",
        "5",
        "--size",
        "11",
        "--out",
        path(&doc_path),
    ]);
    check(ecode == EXIT_OK, || format!("encode exited {ecode}: {eerr}"))?;
    let external = match solver_from_env() {
        None => "external solver not configured (TRIFF_SAT_SOLVER unset)".to_string(),
        Some(solver) => {
            let doc = ConstraintDocument::parse(&fs::read_to_string(&doc_path).unwrap()).unwrap();
            match run_solver(&solver, &doc) {
                Ok(SolverAnswer::Unsat) => "external solver: UNSAT".to_string(),
                other => return Err(format!("external solver answered {other:?}")),
            }
        }
    };
    check(native_unsat || external.ends_with("UNSAT"), || {
        format!("m=11 neither exhausted natively (exit {native}) nor refuted externally ({external})")
    })?;
    Ok(format!(
        "10-word certificate in {t10:.2?}; native m=11 {} in {t11:.2?}; {external}",
        if native_unsat { "exhausted" } else { "not exhausted" }
    ))
}

fn maxsize_line(args: &[&str]) -> Result<(usize, usize, String), String> {
    let (code, out, err) = triff(args);
    let line = out.lines().find(|l| l.starts_with("# maxsize")).ok_or(format!("no summary line ({code}): {err}"))?;
    let field = |key: &str| -> usize {
        line.split_whitespace().find_map(|f| f.strip_prefix(key)).and_then(|v| v.parse().ok()).unwrap_or(usize::MAX)
    };
    let status = line.split_whitespace().find_map(|f| f.strip_prefix("status=")).unwrap_or("").to_string();
    Ok((field("lower="), field("upper="), status))
}

/// Largest subset of all 9 words of length 2 with every triple trifferent.
fn subset_oracle_n2() -> usize {
    let all: Vec<Vec<u8>> = (0..9u8).map(|i| vec![i / 3, i % 3]).collect();
    (0u32..1 << 9)
        .filter(|mask| {
            let picked: Vec<&Vec<u8>> = (0..9).filter(|i| mask >> i & 1 == 1).map(|i| &all[i]).collect();
            (0..picked.len()).all(|a| {
                (a + 1..picked.len()).all(|b| {
                    (b + 1..picked.len())
                        .all(|c| hashed_oracle(&[picked[a].clone(), picked[b].clone(), picked[c].clone()]))
                })
            })
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

fn exact_small_values() -> Verdict {
    let (l1, u1, s1) = maxsize_line(&["maxsize", "--b", "3", "--k", "3", "--n", "1"])?;
    check((l1, u1, s1.as_str()) == (3, 3, "exact"), || format!("n=1 gave {l1}..{u1} {s1}"))?;

    let start = Instant::now();
    let (l2, u2, s2) = maxsize_line(&["maxsize", "--b", "3", "--k", "3", "--n", "2"])?;
    let t2 = start.elapsed();
    let oracle = subset_oracle_n2();
    let (lo, _, _) = maxsize_line(&["maxsize", "--b", "3", "--k", "3", "--n", "2", "--oracle"])?;
    check((l2, u2, s2.as_str()) == (oracle, oracle, "exact"), || format!("n=2 gave {l2}..{u2} {s2}, oracle {oracle}"))?;
    check(lo == oracle, || format!("brute_force_max gave {lo}, subset oracle {oracle}"))?;
    check(t2 <= MAXSIZE_N2_LIMIT, || format!("n=2 took {t2:?}"))?;

    let start = Instant::now();
    let (l4, u4, s4) = maxsize_line(&["maxsize", "--b", "3", "--k", "3", "--n", "4"])?;
    let t4 = start.elapsed();
    check((l4, u4, s4.as_str()) == (9, 9, "exact"), || format!("n=4 gave {l4}..{u4} {s4}"))?;
    check(t4 <= MAXSIZE_N4_LIMIT, || format!("n=4 took {t4:?}"))?;
    Ok(format!("T(1)=3, T(2)={oracle} (oracle agrees, {t2:.2?}), T(4)=9 exact in {t4:.2?}"))
}

fn witness_suite() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    for ell in 1..=20 {
        for n in 0..ell {
            let (x, y, z) = witness_family(n, ell).map_err(|e| e.to_string())?;
            check(relation_r(&x, &y, &z).unwrap() && r_oracle(&x, &y, &z), || format!("R fails at n={n} ell={ell}"))?;
            checked += 1;
            for n2 in n + 1..ell {
                let (x2, _, _) = witness_family(n2, ell).unwrap();
                let lib = relation_r(&x2, &y, &z).unwrap();
                check(!lib && !r_oracle(&x2, &y, &z), || format!("R holds at n={n} n'={n2} ell={ell}"))?;
                checked += 1;
            }
        }
    }
    let t = start.elapsed();
    check(t <= WITNESS_LIMIT, || format!("took {t:?}"))?;
    Ok(format!("{checked} checks in {t:.2?}"))
}

fn embedding_equivalence() -> Verdict {
    let mut triples: Vec<[Vec<u8>; 3]> = Vec::new();
    for len in 1..=2usize {
        let words: Vec<Vec<u8>> = (0..3usize.pow(len as u32))
            .map(|i| (0..len).map(|j| (i / 3usize.pow(j as u32) % 3) as u8).collect())
            .collect();
        for a in &words {
            for b in &words {
                for c in &words {
                    triples.push([a.clone(), b.clone(), c.clone()]);
                }
            }
        }
    }
    let exhaustive = triples.len();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..EMBEDDING_RANDOM_TRIPLES {
        let len = rng.gen_range(3..=4);
        triples.push(std::array::from_fn(|_| (0..len).map(|_| rng.gen_range(0..3u8)).collect()));
    }
    let mut disagreements = 0;
    for t in &triples {
        let params = CodeParams::new(3, 3, t[0].len()).unwrap();
        let words: Vec<Word> = t.iter().map(|w| Word::new(w.clone(), 3).unwrap()).collect();
        let hashed = is_hashed(&words, &params).unwrap();
        let [x, y, z] = [&t[0], &t[1], &t[2]].map(|w| ternary_to_binary(w).unwrap());
        let r = relation_r(&x, &y, &z).unwrap();
        if hashed != r || hashed != hashed_oracle(t) {
            disagreements += 1;
        }
    }
    check(disagreements == 0, || format!("{disagreements} disagreements"))?;
    Ok(format!("{exhaustive} exhaustive + {EMBEDDING_RANDOM_TRIPLES} random triples, 0 disagreements"))
}

fn agree_on_sentences(a: &LabStructure, b: &LabStructure, rho: usize, seed: u64) -> Result<(), String> {
    let vocab = Vocabulary::of(&[a, b]);
    let none = Assignment::default();
    for f in sample_sentences(&vocab, rho, EF_SENTENCES, seed) {
        let (x, y) = (evaluate(a, &f, &none).unwrap(), evaluate(b, &f, &none).unwrap());
        check(x == y, || format!("equivalent pair disagrees on {f}"))?;
    }
    Ok(())
}

fn ef_engine() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut engine = TypeEngine::default();
    let mut equivalent_pairs = [0usize; 2];
    let mut compare = |a: &LabStructure, b: &LabStructure, rho: usize, seed: u64, kind: usize| -> Result<(), String> {
        let types = engine.equivalent(a, b, rho).map_err(|e| e.to_string())?;
        let (winner, trace) = ef_game_search(a, b, rho).map_err(|e| e.to_string())?;
        check((winner == Player::Bob) == types, || {
            format!("types say {types}, game says {winner:?}\n{}", trace.render(a, b))
        })?;
        if types {
            equivalent_pairs[kind] += 1;
            agree_on_sentences(a, b, rho, seed)?;
        }
        Ok(())
    };
    for i in 0..EF_WORD_PAIRS {
        let rho = rng.gen_range(0..=2);
        let (la, lb) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        // every fourth pair is letterless, every fourth an identical copy
        let (alphabet, sets): (Option<u64>, &[&str]) = match (i % 4, rng.gen_bool(0.3)) {
            (1, _) => (None, &[]),
            (_, true) => (Some(2), &["V"]),
            _ => (Some(2), &[]),
        };
        let a = random_word(&mut rng, la, alphabet, sets).unwrap();
        let b = if i % 4 == 0 { a.clone() } else { random_word(&mut rng, lb, alphabet, sets).unwrap() };
        compare(&a, &b, rho, i as u64, 0)?;
    }
    for i in 0..EF_TREE_PAIRS {
        let rho = rng.gen_range(0..=1);
        let (branching, depth) = (rng.gen_range(2..=3), rng.gen_range(0..=2));
        let a = random_tree(&mut rng, branching, depth, Some(2), &["V"]).unwrap();
        let b = match i % 3 {
            0 => a.clone(),
            1 => resample_leaves(&mut rng, &a).unwrap(),
            _ => random_tree(&mut rng, branching, depth, Some(2), &["V"]).unwrap(),
        };
        compare(&a, &b, rho, 1000 + i as u64, 1)?;
    }
    let t = start.elapsed();
    check(t <= EF_LIMIT, || format!("took {t:?}"))?;
    Ok(format!(
        "{EF_WORD_PAIRS} word + {EF_TREE_PAIRS} tree pairs agree; {} + {} equivalent pairs checked on {EF_SENTENCES} sentences each; {t:.2?}",
        equivalent_pairs[0], equivalent_pairs[1]
    ))
}

fn composition() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut engine = TypeEngine::default();
    let (mut premises, mut distinct, mut tries) = (0, 0, 0);
    while premises < COMPOSITION_PAIRS {
        tries += 1;
        check(tries <= 100 * COMPOSITION_PAIRS, || format!("only {premises} pairs met the premise"))?;
        let a = random_tree(&mut rng, 3, 2, Some(2), &["V"]).unwrap();
        let b = if rng.gen_bool(0.2) {
            random_tree(&mut rng, 3, 2, Some(2), &["V"]).unwrap()
        } else {
            resample_leaves(&mut rng, &a).unwrap()
        };
        let premise = (0..3).all(|j| engine.equivalent(&a.restrict(j).unwrap(), &b.restrict(j).unwrap(), 1).unwrap());
        if !premise {
            continue;
        }
        premises += 1;
        distinct += usize::from(a != b);
        check(engine.equivalent(&a, &b, 1).unwrap(), || {
            format!("counterexample:\n{}\nvs\n{}", a.to_toml().unwrap(), b.to_toml().unwrap())
        })?;
    }
    Ok(format!("{premises} pairs ({distinct} non-identical) from {tries} samples, 0 counterexamples"))
}

fn smt_model(rows: &[Vec<u8>]) -> String {
    let mut text = String::from("sat\n(\n");
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            text.push_str(&format!("  (define-fun x_{i}_{j} () Int {v})\n"));
        }
    }
    text + ")\n"
}

fn encoder_equisatisfiability() -> Verdict {
    let mut instances = 0;
    for n in 1..=2 {
        let params = CodeParams::new(3, 3, n).unwrap();
        for m in 3..=5 {
            let cnf_doc = emit_dimacs(&params, m).unwrap();
            let cnf_model = dpll::solve(&parse_dimacs(&cnf_doc.text).unwrap()).unwrap();
            let smt_doc = emit_smtlib(&params, m).unwrap();
            let smt = find_model(&smt_doc).unwrap();
            let search =
                matches!(search_exact(&params, m, &SearchConfig::default()).unwrap(), SearchVerdict::Found { .. });
            check(cnf_model.is_some() == search && smt.is_some() == search, || {
                format!("n={n} m={m}: cnf {} smt {} search {search}", cnf_model.is_some(), smt.is_some())
            })?;
            if let Some(model) = cnf_model {
                let code = decode_assignment(&cnf_doc, &model_text(&model)).map_err(|e| e.to_string())?;
                check(first_violation(&code).is_none() && code.len() == m, || {
                    format!("bad cnf decode at n={n} m={m}")
                })?;
            }
            if let Some(rows) = smt {
                let code = decode_assignment(&smt_doc, &smt_model(&rows)).map_err(|e| e.to_string())?;
                check(first_violation(&code).is_none() && code.len() == m, || {
                    format!("bad smt decode at n={n} m={m}")
                })?;
            }
            instances += 1;
        }
    }
    Ok(format!("{instances} instances, three verdicts agree, decoded models verify"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("n5-nonexistence", n5_nonexistence),
        ("exact-small-values", exact_small_values),
        ("witness-suite", witness_suite),
        ("embedding-equivalence", embedding_equivalence),
        ("ef-engine", ef_engine),
        ("composition", composition),
        ("encoder-equisatisfiability", encoder_equisatisfiability),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
