use itertools::Itertools;
use proptest::prelude::*;
use triff_core::hashcore::{Code, CodeParams};
use triff_core::searcher::*;

/// Independent certificate check straight from the definition.
fn verified(code: &Code) -> bool {
    let k = code.params().k();
    let rows: Vec<&[u8]> = code.words().iter().map(|w| w.symbols()).collect();
    rows.iter().all_unique()
        && rows.iter().combinations(k).all(|t| (0..code.params().n()).any(|i| t.iter().map(|w| w[i]).all_unique()))
}

fn config(symmetry: SymmetryLevel, threads: usize) -> SearchConfig {
    SearchConfig { symmetry, threads, deterministic: true, ..SearchConfig::default() }
}

fn small_params() -> Vec<CodeParams> {
    let mut out = Vec::new();
    for b in 2..=4 {
        for k in 2..=b {
            for n in 1..=2 {
                if (b as u128).pow(n as u32) <= MAX_ORACLE_WORDS {
                    out.push(CodeParams::new(b, k, n).unwrap());
                }
            }
        }
    }
    out
}

#[test]
fn every_level_matches_the_oracle_for_short_lengths() {
    for params in small_params() {
        let (oracle, cert) = brute_force_max(&params).unwrap();
        assert!(verified(&cert));
        for level in SymmetryLevel::ALL {
            let r = max_size(&params, &config(level, 2)).unwrap();
            assert_eq!((r.lower, r.upper, r.status), (oracle, oracle, SizeStatus::Exact), "{params} {level}");
            assert!(verified(&r.certificate) && r.certificate.len() == oracle);
        }
    }
}

#[test]
fn monotone_in_length_and_alphabet() {
    let value = |b, k, n| max_size(&CodeParams::new(b, k, n).unwrap(), &SearchConfig::default()).unwrap().lower;
    for k in 2..=3 {
        for b in k..=4 {
            let row: Vec<usize> = (1..=3).map(|n| value(b, k, n)).collect();
            assert!(row.windows(2).all(|w| w[0] <= w[1]), "b={b} k={k}: {row:?}");
        }
        for n in 1..=3 {
            let col: Vec<usize> = (k..=4).map(|b| value(b, k, n)).collect();
            assert!(col.windows(2).all(|w| w[0] <= w[1]), "k={k} n={n}: {col:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn found_certificates_verify(b in 2usize..=4, n in 1usize..=3, m in 1usize..=9, level in 0usize..4) {
        let k = b.min(3);
        let params = CodeParams::new(b, k, n).unwrap();
        match search_exact(&params, m, &config(SymmetryLevel::ALL[level], 2)).unwrap() {
            SearchVerdict::Found { code, .. } => prop_assert!(verified(&code) && code.len() == m),
            SearchVerdict::ExhaustedNoSolution(_) => {
                let exact = max_size(&params, &config(SymmetryLevel::None, 1)).unwrap();
                prop_assert!(exact.lower < m);
            }
            SearchVerdict::BudgetExceeded(_) => prop_assert!(false, "no budget was set"),
        }
    }

    #[test]
    fn deterministic_runs_repeat(m in 5usize..=10, threads in 1usize..=6, level in 2usize..4) {
        let params = CodeParams::new(3, 3, 4).unwrap();
        let reference = search_exact(&params, m, &config(SymmetryLevel::ALL[level], 1)).unwrap();
        let again = search_exact(&params, m, &config(SymmetryLevel::ALL[level], threads)).unwrap();
        prop_assert_eq!(reference.certificate(), again.certificate());
        prop_assert_eq!(reference.stats().nodes, again.stats().nodes);
        prop_assert_eq!(std::mem::discriminant(&reference), std::mem::discriminant(&again));
    }
}
