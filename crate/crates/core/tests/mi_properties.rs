use icc_core::gaussian::{LinearGaussianModel, Var};
use proptest::prelude::*;

/// Each variable is a random mix of shared sources plus its own noise, so
/// every covariance is non-singular.
fn model() -> impl Strategy<Value = (LinearGaussianModel, Vec<Var>)> {
    (1usize..=4, 3usize..=6).prop_flat_map(|(shared, nvars)| {
        let row = (prop::collection::vec(-2.0f64..2.0, shared), 0.2f64..2.0);
        prop::collection::vec(row, nvars).prop_map(move |rows| {
            let n = rows.len();
            let sources: Vec<String> = (0..shared + n).map(|i| format!("s{i}")).collect();
            let mut m = LinearGaussianModel::new(&sources);
            let vars = rows
                .into_iter()
                .enumerate()
                .map(|(i, (mix, noise))| {
                    let mut c = mix;
                    c.resize(shared + n, 0.0);
                    c[shared + i] = noise;
                    m.define(&format!("v{i}"), c).unwrap()
                })
                .collect();
            (m, vars)
        })
    })
}

/// Disjoint `A`, `B`, `C` from a random assignment of the variables.
fn groups(vars: &[Var], tags: &[u8]) -> [Vec<Var>; 3] {
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for (v, t) in vars.iter().zip(tags) {
        if let Some(g) = out.get_mut(*t as usize) {
            g.push(*v);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symmetric_and_non_negative((m, vars) in model(), tags in prop::collection::vec(0u8..4, 6)) {
        let [a, b, c] = groups(&vars, &tags);
        let ab = m.conditional_mutual_information(&a, &b, &c);
        let ba = m.conditional_mutual_information(&b, &a, &c);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-9);
    }

    #[test]
    fn chain_rule((m, vars) in model(), tags in prop::collection::vec(0u8..4, 6)) {
        let [a, b, c] = groups(&vars, &tags);
        let bc: Vec<Var> = b.iter().chain(&c).copied().collect();
        let joint = m.mutual_information(&a, &bc);
        let split = m.mutual_information(&a, &c) + m.conditional_mutual_information(&a, &b, &c);
        prop_assert!((joint - split).abs() <= 1e-9, "{} vs {}", joint, split);
    }

    #[test]
    fn gram_kernel_agrees((m, vars) in model(), tags in prop::collection::vec(0u8..4, 6)) {
        let [a, b, c] = groups(&vars, &tags);
        let g = m.gram();
        let x = m.conditional_mutual_information(&a, &b, &c);
        let y = g.conditional_mutual_information(&a, &b, &c);
        prop_assert!((x - y).abs() <= 1e-9, "{} vs {}", x, y);
    }

    #[test]
    fn conditioning_on_independent_noise_is_free((m, vars) in model(), tags in prop::collection::vec(0u8..3, 6)) {
        let [a, b, _] = groups(&vars, &tags);
        let mut row = vec![0.0; m.source_count() + 1];
        *row.last_mut().unwrap() = 1.0;
        let mut sources: Vec<String> = m.sources().to_vec();
        sources.push("extra".into());
        let mut wide = LinearGaussianModel::new(&sources);
        for v in &vars {
            let mut c = m.coefficients(*v).to_vec();
            c.push(0.0);
            wide.define(m.name(*v).as_str(), c).unwrap();
        }
        let z = wide.define("z", row).unwrap();
        let plain = wide.mutual_information(&a, &b);
        let given = wide.conditional_mutual_information(&a, &b, &[z]);
        prop_assert!((plain - given).abs() <= 1e-9);
    }
}

#[test]
fn shannon_point_to_point() {
    let mut m = LinearGaussianModel::new(["x", "z"]);
    let x = m.define("X", vec![6f64.sqrt(), 0.0]).unwrap();
    let y = m.define("Y", vec![6f64.sqrt(), 1.0]).unwrap();
    let want = 0.5 * 7f64.log2();
    assert!((m.mutual_information(&[x], &[y]) - want).abs() <= 1e-12);
    assert!((m.gram().mutual_information(&[x], &[y]) - want).abs() <= 1e-12);
}
