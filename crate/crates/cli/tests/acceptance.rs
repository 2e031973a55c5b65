//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs the full-resolution sweeps, so expect several minutes on one core.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use icc_core::baselines::{gvbc_region, hk_region, relay_capacity, RelayMode};
use icc_core::fme::LinearSystem;
use icc_core::gaussian::{LinearGaussianModel, Var};
use icc_core::geom::{excess, hausdorff, slope_violations, Polygon2D, Region2D, HK_SLOPES};
use icc_core::icc::{
    ideal_conferencing_region_with, polished_intercepts_with, zero_cooperation_region_with,
    ChannelParams, SweepConfig,
};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_icc-region");
const REFERENCE_CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/reference.json");

struct Outcome {
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Audit {
    polygons: usize,
    violations: usize,
}

impl Audit {
    fn add(&mut self, p: &Polygon2D) {
        self.polygons += 1;
        if !slope_violations(p, &HK_SLOPES, 1e-6).is_empty() {
            self.violations += 1;
        }
    }
}

fn reference(k: f64) -> ChannelParams {
    ChannelParams::reference(k)
}

fn hk_reduction(audit: &mut Audit) -> Outcome {
    let p = reference(0.0);
    let (zc, _) = zero_cooperation_region_with(&p, 17, |_, poly| audit.add(poly)).unwrap();
    let hk = hk_region(&p, 17).unwrap();
    let d = hausdorff(&zc.hull, &hk.hull);
    Outcome {
        pass: d <= 1e-6,
        detail: format!("Hausdorff {d:.3e} bits (tol 1e-6)"),
    }
}

fn gvbc_reduction(audit: &mut Audit) -> Outcome {
    let p = reference(4.0);
    let (ideal, _) =
        ideal_conferencing_region_with(&p, &SweepConfig::with_resolution(17), |_, poly| {
            audit.add(poly)
        })
        .unwrap();
    let gvbc = gvbc_region(&p, 17).unwrap();
    let d = hausdorff(&ideal.hull, &gvbc.hull);
    Outcome {
        pass: d <= 0.02,
        detail: format!("Hausdorff {d:.3e} bits (tol 2e-2)"),
    }
}

fn relay_intercepts(region_k4: &mut Option<Region2D>, audit: &mut Audit) -> Outcome {
    let p = reference(4.0);
    let (region, i) =
        polished_intercepts_with(&p, &SweepConfig::default(), |_, poly| audit.add(poly)).unwrap();
    *region_k4 = Some(region);
    let c1 = relay_capacity(&p, RelayMode::User2Relays).unwrap().bits;
    let c2 = relay_capacity(&p, RelayMode::User1Relays).unwrap().bits;
    let (d1, d2) = ((i.max_r1 - c1).abs(), (i.max_r2 - c2).abs());
    Outcome {
        pass: d1 <= 1e-2 && d2 <= 1e-2,
        detail: format!(
            "R1 {:.6} vs {c1:.6}, R2 {:.6} vs {c2:.6} (grid {:.6}, {:.6}; tol 1e-2)",
            i.max_r1, i.max_r2, i.grid_max_r1, i.grid_max_r2
        ),
    }
}

fn containment_chain(region_k4: &Region2D, audit: &mut Audit) -> Outcome {
    let p1 = reference(1.0);
    let (k1, _) =
        polished_intercepts_with(&p1, &SweepConfig::default(), |_, poly| audit.add(poly)).unwrap();
    let hk = hk_region(&p1, 17).unwrap();
    let gvbc = gvbc_region(&p1, 17).unwrap();
    let e = [
        excess(&k1, &hk),
        excess(region_k4, &k1),
        excess(&gvbc, region_k4),
    ];
    let gain = excess(&hk, &k1);
    Outcome {
        pass: e.iter().all(|&x| x <= 1e-6) && gain > 1e-3,
        detail: format!(
            "excess HK/K1 {:.1e}, K1/K4 {:.1e}, K4/GVBC {:.1e} (tol 1e-6); K1 beyond HK by {gain:.3e} (> 1e-3)",
            e[0], e[1], e[2]
        ),
    }
}

fn slope_structure(audit: &Audit) -> Outcome {
    Outcome {
        pass: audit.violations == 0 && audit.polygons >= 10_000,
        detail: format!(
            "{} polygons, {} with violations (tol 1e-6)",
            audit.polygons, audit.violations
        ),
    }
}

const NAMES: [&str; 6] = ["x0", "x1", "x2", "x3", "x4", "x5"];

fn lp_feasible(rows: &[(Vec<i64>, f64)], keep: usize, n: usize, x: &[f64]) -> bool {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let free: Vec<_> = (keep..n)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (c, b) in rows {
        let fixed: f64 = c[..keep].iter().zip(x).map(|(a, v)| *a as f64 * v).sum();
        let terms: Vec<_> = free
            .iter()
            .zip(&c[keep..])
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

fn fme_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut disagreements = 0;
    let mut inside = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let keep = rng.gen_range(1..n);
        let m = rng.gen_range(1..=14);
        let rows: Vec<(Vec<i64>, f64)> = (0..m)
            .map(|_| {
                let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                (c, rng.gen_range(-2.0..6.0))
            })
            .filter(|(c, _)| c.iter().any(|&x| x != 0))
            .collect();
        let mut sys = LinearSystem::new(&NAMES[..n]).unwrap();
        for (c, b) in &rows {
            let terms: Vec<(&str, i64)> =
                c.iter().enumerate().map(|(i, &x)| (NAMES[i], x)).collect();
            sys.add_le(&terms, *b).unwrap();
        }
        let proj = sys.project(&NAMES[..keep]).unwrap();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..keep).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let a = proj.contains_point(&x, 1e-9);
            if a != lp_feasible(&rows, keep, n, &x) {
                disagreements += 1;
            }
            inside += a as usize;
        }
    }
    Outcome {
        pass: disagreements == 0,
        detail: format!(
            "200 systems x 1000 points, {inside} inside, {disagreements} disagreements (tol 1e-9)"
        ),
    }
}

fn random_model(rng: &mut ChaCha8Rng) -> (LinearGaussianModel, Vec<Var>) {
    let shared = rng.gen_range(1..=4);
    let n = rng.gen_range(3..=6);
    let sources: Vec<String> = (0..shared + n).map(|i| format!("s{i}")).collect();
    let mut m = LinearGaussianModel::new(&sources);
    let vars = (0..n)
        .map(|i| {
            let mut c: Vec<f64> = (0..shared).map(|_| rng.gen_range(-2.0..2.0)).collect();
            c.resize(shared + n, 0.0);
            c[shared + i] = rng.gen_range(0.2..2.0);
            m.define(&format!("v{i}"), c).unwrap()
        })
        .collect();
    (m, vars)
}

fn mi_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut negative = 0;
    for _ in 0..1000 {
        let (m, vars) = random_model(&mut rng);
        let mut g: [Vec<Var>; 3] = Default::default();
        for v in &vars {
            if let Some(slot) = g.get_mut(rng.gen_range(0..4)) {
                slot.push(*v);
            }
        }
        let [a, b, c] = &g;
        let ab = m.conditional_mutual_information(a, b, c);
        let ba = m.conditional_mutual_information(b, a, c);
        let bc: Vec<Var> = b.iter().chain(c).copied().collect();
        let chain = m.mutual_information(a, &bc) - m.mutual_information(a, c) - ab;
        if ab < 0.0 {
            negative += 1;
        }
        worst = worst.max((ab - ba).abs()).max(chain.abs());
    }
    let mut m = LinearGaussianModel::new(["x", "z"]);
    let x = m.define("X", vec![6f64.sqrt(), 0.0]).unwrap();
    let y = m.define("Y", vec![6f64.sqrt(), 1.0]).unwrap();
    let shannon = (m.mutual_information(&[x], &[y]) - 0.5 * 7f64.log2()).abs();
    Outcome {
        pass: worst <= 1e-9 && negative == 0 && shannon <= 1e-12,
        detail: format!(
            "1000 models: worst symmetry/chain-rule gap {worst:.1e}, {negative} negative (tol 1e-9); Shannon error {shannon:.1e} (tol 1e-12)"
        ),
    }
}

fn run_compare(out: &Path) -> Result<(), String> {
    let o = Command::new(BIN)
        .args(["--config", REFERENCE_CONFIG, "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    if let Err(e) = run_compare(&a).and_then(|_| run_compare(&b)) {
        return Outcome {
            pass: false,
            detail: format!("compare run failed: {e}"),
        };
    }
    let mut files: Vec<String> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv") || n.ends_with(".svg"))
        .collect();
    files.sort();
    let differing: Vec<&String> = files
        .iter()
        .filter(|f| std::fs::read(a.join(f)).ok() != std::fs::read(b.join(f)).ok())
        .collect();
    Outcome {
        pass: differing.is_empty() && files.len() == 5,
        detail: format!(
            "{} files compared ({}), differing: {differing:?}",
            files.len(),
            files.join(", ")
        ),
    }
}

fn main() -> ExitCode {
    let mut audit = Audit::default();
    let mut region_k4 = None;
    let mut failed = 0;
    let mut report =
        |id: usize, name: &str, expected: Option<f64>, f: &mut dyn FnMut() -> Outcome| {
            let t = Instant::now();
            let o = f();
            let secs = t.elapsed().as_secs_f64();
            let budget = expected
                .map(|e| format!(", expected < {e} s"))
                .unwrap_or_default();
            println!(
                "criterion {id} {name}: {} - {} [{secs:.1} s{budget}]",
                if o.pass { "PASS" } else { "FAIL" },
                o.detail
            );
            failed += !o.pass as usize;
        };
    report(1, "HK reduction", Some(60.0), &mut || {
        hk_reduction(&mut audit)
    });
    report(2, "GVBC reduction", Some(120.0), &mut || {
        gvbc_reduction(&mut audit)
    });
    report(3, "relay intercepts", Some(120.0), &mut || {
        relay_intercepts(&mut region_k4, &mut audit)
    });
    report(4, "containment chain", None, &mut || {
        containment_chain(region_k4.as_ref().expect("criterion 3 ran"), &mut audit)
    });
    report(5, "slope structure", None, &mut || slope_structure(&audit));
    report(6, "FME random oracle", Some(60.0), &mut fme_oracle);
    report(7, "Gaussian MI kernel", None, &mut mi_kernel);
    report(8, "determinism", None, &mut determinism);
    if failed == 0 {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria fail");
        ExitCode::FAILURE
    }
}
