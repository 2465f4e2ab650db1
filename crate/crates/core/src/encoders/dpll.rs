//! Bundled DPLL (unit propagation, first-unassigned branching). Meant for the
//! tiny instances of the equisatisfiability checks, not for real workloads.

use super::cnf::Cnf;
use super::EncodeError;

/// Largest variable count the bundled procedure accepts.
pub const MAX_VARS: u32 = 256;

/// Returns a model (index 0 unused) or `None` when unsatisfiable.
pub fn solve(cnf: &Cnf) -> Result<Option<Vec<bool>>, EncodeError> {
    if cnf.num_vars > MAX_VARS {
        return Err(EncodeError::Solver(format!(
            "{} variables exceed the bundled DPLL limit of {MAX_VARS}",
            cnf.num_vars
        )));
    }
    let mut assign: Vec<Option<bool>> = vec![None; cnf.num_vars as usize + 1];
    if search(&cnf.clauses, &mut assign) {
        Ok(Some(assign.iter().map(|v| v.unwrap_or(false)).collect()))
    } else {
        Ok(None)
    }
}

fn value(assign: &[Option<bool>], lit: i32) -> Option<bool> {
    assign[lit.unsigned_abs() as usize].map(|v| v == (lit > 0))
}

/// Propagates units to a fixpoint; records every assignment in `trail`.
/// Returns false on a conflict.
fn propagate(clauses: &[Vec<i32>], assign: &mut [Option<bool>], trail: &mut Vec<usize>) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut sat = false;
            for &lit in c {
                match value(assign, lit) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if sat {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return false,
                (1, Some(lit)) => {
                    let v = lit.unsigned_abs() as usize;
                    assign[v] = Some(lit > 0);
                    trail.push(v);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(clauses: &[Vec<i32>], assign: &mut Vec<Option<bool>>) -> bool {
    let mut trail = Vec::new();
    if propagate(clauses, assign, &mut trail) {
        match (1..assign.len()).find(|&v| assign[v].is_none()) {
            None => return true,
            Some(v) => {
                for choice in [true, false] {
                    assign[v] = Some(choice);
                    if search(clauses, assign) {
                        return true;
                    }
                }
                assign[v] = None;
            }
        }
    }
    for v in trail {
        assign[v] = None;
    }
    false
}

/// Runs the bundled procedure and renders its answer as solver output text.
pub fn solve_to_text(cnf: &Cnf) -> Result<String, EncodeError> {
    Ok(match solve(cnf)? {
        Some(model) => super::cnf::model_text(&model),
        None => "s UNSATISFIABLE\n".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(num_vars: u32, clauses: &[&[i32]]) -> Cnf {
        Cnf { num_vars, clauses: clauses.iter().map(|c| c.to_vec()).collect() }
    }

    fn satisfies(f: &Cnf, m: &[bool]) -> bool {
        f.clauses.iter().all(|c| c.iter().any(|&l| m[l.unsigned_abs() as usize] == (l > 0)))
    }

    #[test]
    fn small_formulas() {
        let f = cnf(3, &[&[1, 2], &[-1, 3], &[-3, -2], &[-2]]);
        let m = solve(&f).unwrap().unwrap();
        assert!(satisfies(&f, &m));
        assert_eq!(solve(&cnf(1, &[&[1], &[-1]])).unwrap(), None);
        assert_eq!(solve(&cnf(2, &[&[]])).unwrap(), None);
        // pigeonhole 3 into 2
        let php =
            cnf(6, &[&[1, 2], &[3, 4], &[5, 6], &[-1, -3], &[-1, -5], &[-3, -5], &[-2, -4], &[-2, -6], &[-4, -6]]);
        assert_eq!(solve(&php).unwrap(), None);
    }

    #[test]
    fn brute_force_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let nv = rng.gen_range(1..=6u32);
            let clauses: Vec<Vec<i32>> = (0..rng.gen_range(0..12))
                .map(|_| {
                    (0..rng.gen_range(1..=3))
                        .map(|_| {
                            let v = rng.gen_range(1..=nv) as i32;
                            if rng.gen_bool(0.5) {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let f = Cnf { num_vars: nv, clauses };
            let brute = (0..1u32 << nv).any(|bits| {
                let m: Vec<bool> = (0..=nv).map(|v| v > 0 && bits >> (v - 1) & 1 == 1).collect();
                satisfies(&f, &m)
            });
            let got = solve(&f).unwrap();
            assert_eq!(got.is_some(), brute);
            if let Some(m) = got {
                assert!(satisfies(&f, &m));
            }
        }
    }

    #[test]
    fn guard() {
        assert!(solve(&cnf(MAX_VARS + 1, &[])).is_err());
    }
}
