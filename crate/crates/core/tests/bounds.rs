use std::path::PathBuf;

use proptest::prelude::*;
use triff_core::bounds::{classic_upper, improved_upper, km_lower, ledger_check, BoundProfile};
use triff_core::hashcore::CodeParams;
use triff_core::ledger::{Ledger, LedgerEntry, LedgerKey, Method};
use triff_core::searcher::{max_size, SearchConfig, SizeStatus};

fn exact_values() -> Vec<(u32, usize, triff_core::hashcore::Code)> {
    (1..=4)
        .map(|n| {
            let r = max_size(&CodeParams::new(3, 3, n).unwrap(), &SearchConfig::default()).unwrap();
            assert_eq!(r.status, SizeStatus::Exact);
            (n as u32, r.lower, r.certificate)
        })
        .collect()
}

#[test]
fn exact_values_sit_between_illustrative_bounds() {
    let profile = BoundProfile::<f64>::illustrative();
    for (n, t, _) in exact_values() {
        let v = profile.evaluate(n);
        assert!(t as f64 <= v.classic_upper, "n={n}: {t} > {}", v.classic_upper);
        assert!(v.km_lower <= t as f64, "n={n}: {} > {t}", v.km_lower);
    }
}

#[test]
fn computed_ledger_is_consistent_under_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let mut ledger = Ledger::default();
    for (n, t, code) in exact_values() {
        let name = format!("b3k3n{n}.code");
        std::fs::write(dir.path().join(&name), code.to_text()).unwrap();
        ledger
            .upsert(LedgerEntry {
                key: LedgerKey { b: 3, k: 3, n: n as usize },
                lower: t,
                upper: t,
                status: SizeStatus::Exact,
                certificate: Some(PathBuf::from(name)),
                method: Method::Search,
                timestamp: "2026-01-01T00:00:00Z".into(),
            })
            .unwrap();
    }
    let path = dir.path().join("ledger.txt");
    ledger.save(&path).unwrap();
    let report = ledger_check(&Ledger::load(&path).unwrap(), &path, Some(&SearchConfig::default()));
    assert_eq!(report.checked, 4);
    assert!(report.issues.is_empty(), "{:?}", report.issues);

    let mut wrong = ledger.clone();
    let mut e = wrong.get(&LedgerKey { b: 3, k: 3, n: 3 }).unwrap().clone();
    e.lower = 5;
    e.upper = 5;
    e.certificate = Some(PathBuf::from("b3k3n2.code"));
    wrong.upsert(e).unwrap();
    let report = ledger_check(&wrong, &path, Some(&SearchConfig::default()));
    assert!(!report.is_consistent());
    assert!(report.issues.iter().any(|i| i.message.contains("recomputed maximum 6")));
}

proptest! {
    #[test]
    fn monotone_in_constant(n in 1u32..60, c1 in 0.01f64..100.0, c2 in 0.01f64..100.0) {
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        prop_assert!(classic_upper(n, lo) <= classic_upper(n, hi));
        prop_assert!(improved_upper(n, lo) <= improved_upper(n, hi));
        prop_assert!(km_lower(n, lo) <= km_lower(n, hi));
    }

    #[test]
    fn classic_and_improved_grow_with_n(n in 1u32..200, c in 0.01f64..100.0) {
        prop_assert!(classic_upper(n, c) < classic_upper(n + 1, c));
        prop_assert!(improved_upper(n, c) < improved_upper(n + 1, c));
    }

    #[test]
    fn improved_ratio_and_strictness(n in 1u32..200, c in 0.01f64..100.0, c2 in 0.01f64..100.0) {
        let ratio = improved_upper(n, c2) / classic_upper(n, c);
        let expected = (n as f64).powf(-0.4) * c2 / c;
        prop_assert!((ratio - expected).abs() <= 1e-9 * expected);
        if n >= 2 {
            prop_assert!(improved_upper(n, c) < classic_upper(n, c));
        }
    }
}
