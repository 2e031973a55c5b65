use icc_core::fme::LinearSystem;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use proptest::prelude::*;

const NAMES: [&str; 6] = ["x0", "x1", "x2", "x3", "x4", "x5"];

#[derive(Debug, Clone)]
struct Instance {
    n: usize,
    rows: Vec<(Vec<i64>, f64)>,
    keep: usize,
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=6).prop_flat_map(|n| {
        let row =
            (prop::collection::vec(-2i64..=2, n), -3i32..=6).prop_map(|(c, b)| (c, b as f64 * 0.5));
        (prop::collection::vec(row, 1..=14), 1..n).prop_map(move |(mut rows, keep)| {
            rows.retain(|(c, _)| c.iter().any(|&x| x != 0));
            Instance { n, rows, keep }
        })
    })
}

fn system(inst: &Instance) -> LinearSystem {
    let mut sys = LinearSystem::new(&NAMES[..inst.n]).unwrap();
    for (c, b) in &inst.rows {
        let terms: Vec<(&str, i64)> = c.iter().enumerate().map(|(i, &x)| (NAMES[i], x)).collect();
        sys.add_le(&terms, *b).unwrap();
    }
    sys
}

/// Whether the free variables can be chosen to satisfy every row with the
/// kept ones fixed at `x`.
fn lp_feasible(inst: &Instance, x: &[f64]) -> bool {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let free: Vec<_> = (inst.keep..inst.n)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (c, b) in &inst.rows {
        let fixed: f64 = c[..inst.keep]
            .iter()
            .zip(x)
            .map(|(a, v)| *a as f64 * v)
            .sum();
        let terms: Vec<_> = free
            .iter()
            .zip(&c[inst.keep..])
            .map(|(v, a)| (*v, *a as f64))
            .collect();
        if terms.iter().all(|t| t.1 == 0.0) {
            if fixed > b + 1e-9 {
                return false;
            }
            continue;
        }
        lp.add_constraint(&terms[..], ComparisonOp::Le, b - fixed);
    }
    lp.solve().is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_membership_matches_lp(inst in instance(), pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 6), 40)) {
        let sys = system(&inst);
        let proj = sys.project(&NAMES[..inst.keep]).unwrap();
        for p in &pts {
            let x = &p[..inst.keep];
            prop_assert_eq!(proj.contains_point(x, 1e-9), lp_feasible(&inst, x), "point {:?}", x);
        }
    }

    #[test]
    fn feasible_points_project_inside(inst in instance(), p in prop::collection::vec(-3.0f64..3.0, 6)) {
        let sys = system(&inst);
        let x = &p[..inst.n];
        if sys.contains_point(x, 0.0) {
            let proj = sys.project(&NAMES[..inst.keep]).unwrap();
            prop_assert!(proj.contains_point(&x[..inst.keep], 1e-9));
        }
    }

    #[test]
    fn redundancy_removal_keeps_the_set(inst in instance(), pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 6), 40)) {
        let sys = system(&inst);
        let lean = sys.remove_redundant();
        prop_assert!(lean.len() <= sys.len());
        for p in &pts {
            let x = &p[..inst.n];
            prop_assert_eq!(sys.contains_point(x, 1e-9), lean.contains_point(x, 1e-9));
        }
    }
}
