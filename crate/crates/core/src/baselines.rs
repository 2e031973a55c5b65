//! Reference regions: Han-Kobayashi in compact form, the
//! degraded Gaussian relay capacity and the capacity region of the Gaussian
//! vector broadcast channel (GVBC) obtained with full transmitter
//! cooperation.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use libm::{cos, log2, sin, sqrt};

use crate::fme::{FmeError, LinearSystem};
use crate::gaussian::LinearGaussianModel;
use crate::geom::{convex_hull, Polygon2D, RatePair, Region2D};
use crate::icc::{ChannelParams, IccError};
use crate::linalg::sqrt_psd2;

/// Slack allowed in the PSD checks of [`GvbcInput`].
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineError {
    NotPsd(String),
    CorrelationOutOfRange(f64),
    InvalidGrid(usize),
    Channel(IccError),
    Fme(FmeError),
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::NotPsd(what) => write!(f, "{what} is not positive semi-definite"),
            BaselineError::CorrelationOutOfRange(c) => {
                write!(
                    f,
                    "input correlation {c} outside [-sqrt(P1 P2), sqrt(P1 P2)]"
                )
            }
            BaselineError::InvalidGrid(r) => write!(f, "grid resolution {r} is below 2"),
            BaselineError::Channel(e) => write!(f, "{e}"),
            BaselineError::Fme(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BaselineError {}

impl From<IccError> for BaselineError {
    fn from(e: IccError) -> Self {
        BaselineError::Channel(e)
    }
}

impl From<FmeError> for BaselineError {
    fn from(e: FmeError) -> Self {
        BaselineError::Fme(e)
    }
}

type Mat2 = [[f64; 2]; 2];

fn is_psd(m: &Mat2, tol: f64) -> bool {
    let sym = (m[0][1] - m[1][0]).abs() <= tol * (1.0 + m[0][1].abs());
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = 1.0 + m[0][0].abs() + m[1][1].abs();
    sym && m[0][0] >= -tol * scale && m[1][1] >= -tol * scale && det >= -tol * scale * scale
}

fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn quad(h: [f64; 2], m: &Mat2) -> f64 {
    h[0] * (m[0][0] * h[0] + m[0][1] * h[1]) + h[1] * (m[1][0] * h[0] + m[1][1] * h[1])
}

/// One GVBC operating point: input covariance `S = [[P1, c], [c, P2]]`
/// split into the two users' DPC covariances `B` and `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GvbcInput {
    pub s: Mat2,
    pub b: Mat2,
    pub d: Mat2,
    pub h1: [f64; 2],
    pub h2: [f64; 2],
}

impl GvbcInput {
    pub fn new(params: &ChannelParams, c: f64, b: Mat2, d: Mat2) -> Result<Self, BaselineError> {
        params.validate()?;
        let lim = sqrt(params.p1 * params.p2);
        if c.is_nan() || c.abs() > lim * (1.0 + PSD_TOL) {
            return Err(BaselineError::CorrelationOutOfRange(c));
        }
        let input = GvbcInput {
            s: [[params.p1, c], [c, params.p2]],
            b,
            d,
            h1: [1.0, params.a21],
            h2: [params.a12, 1.0],
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        if !is_psd(&self.b, PSD_TOL) {
            return Err(BaselineError::NotPsd("B".into()));
        }
        if !is_psd(&self.d, PSD_TOL) {
            return Err(BaselineError::NotPsd("D".into()));
        }
        if !is_psd(&sub(&sub(&self.s, &self.b), &self.d), PSD_TOL) {
            return Err(BaselineError::NotPsd("S - B - D".into()));
        }
        Ok(())
    }
}

/// The two DPC rate pairs of one operating point: user 1 encoded last
/// (first pair) and user 2 encoded last (second pair). Unit noise.
pub fn gvbc_pairs(input: &GvbcInput) -> [RatePair; 2] {
    let bd = add(&input.b, &input.d);
    let h = |x: f64| 0.5 * log2(x.max(1.0));
    let first = RatePair::new(
        h(1.0 + quad(input.h1, &input.b)),
        h((1.0 + quad(input.h2, &bd)) / (1.0 + quad(input.h2, &input.b))),
    );
    let second = RatePair::new(
        h((1.0 + quad(input.h1, &bd)) / (1.0 + quad(input.h1, &input.d))),
        h(1.0 + quad(input.h2, &input.d)),
    );
    [first, second]
}

/// Boundary parameterisation `B = S^½·U(φ)·diag(t1,t2)·U(φ)ᵀ·S^½`,
/// `D = S - B`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GvbcPoint {
    c: f64,
    phi: f64,
    t1: f64,
    t2: f64,
}

impl GvbcPoint {
    fn pairs(&self, params: &ChannelParams) -> [RatePair; 2] {
        let s = [[params.p1, self.c], [self.c, params.p2]];
        let root = sqrt_psd2(s);
        let (cs, sn) = (cos(self.phi), sin(self.phi));
        let u = [[cs, -sn], [sn, cs]];
        let ut = [[cs, sn], [-sn, cs]];
        let diag = [[self.t1, 0.0], [0.0, self.t2]];
        let b = mul(&mul(&mul(&mul(&root, &u), &diag), &ut), &root);
        let b = [
            [b[0][0], 0.5 * (b[0][1] + b[1][0])],
            [0.5 * (b[0][1] + b[1][0]), b[1][1]],
        ];
        let input = GvbcInput {
            s,
            b,
            d: sub(&s, &b),
            h1: [1.0, params.a21],
            h2: [params.a12, 1.0],
        };
        gvbc_pairs(&input)
    }

    fn clamp(self, cmax: f64) -> Self {
        GvbcPoint {
            c: self.c.clamp(-cmax, cmax),
            phi: self.phi,
            t1: self.t1.clamp(0.0, 1.0),
            t2: self.t2.clamp(0.0, 1.0),
        }
    }
}

/// Support directions refined after the grid pass of [`gvbc_region`].
pub const GVBC_REFINE_DIRECTIONS: usize = 128;

/// Capacity region of the GVBC: hull of both DPC pairs over a
/// `resolution`-point grid in each of `c`, `φ`, `t1`, `t2`, followed by a
/// pattern search along [`GVBC_REFINE_DIRECTIONS`] support directions that
/// adds the optimised boundary points.
pub fn gvbc_region(params: &ChannelParams, resolution: usize) -> Result<Region2D, BaselineError> {
    params.validate()?;
    if resolution < 2 {
        return Err(BaselineError::InvalidGrid(resolution));
    }
    let cmax = sqrt(params.p1 * params.p2);
    let step = |i: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
    let mut samples: Vec<(GvbcPoint, [RatePair; 2])> = Vec::new();
    for ic in 0..resolution {
        for ip in 0..resolution {
            for i1 in 0..resolution {
                for i2 in 0..resolution {
                    let g = GvbcPoint {
                        c: step(ic, -cmax, cmax),
                        phi: PI * ip as f64 / resolution as f64,
                        t1: step(i1, 0.0, 1.0),
                        t2: step(i2, 0.0, 1.0),
                    };
                    samples.push((g, g.pairs(params)));
                }
            }
        }
    }
    let mut pts: Vec<RatePair> = samples
        .iter()
        .flat_map(|(_, p)| p.iter().copied())
        .collect();
    for k in 0..GVBC_REFINE_DIRECTIONS {
        let ang = 0.5 * PI * k as f64 / (GVBC_REFINE_DIRECTIONS - 1) as f64;
        let w = [cos(ang), sin(ang)];
        let score = |p: &[RatePair; 2]| {
            p.iter()
                .map(|q| w[0] * q.r1 + w[1] * q.r2)
                .fold(f64::MIN, f64::max)
        };
        let (mut best, mut best_val) =
            samples
                .iter()
                .map(|(g, p)| (*g, score(p)))
                .fold(
                    (samples[0].0, f64::MIN),
                    |acc, x| if x.1 > acc.1 { x } else { acc },
                );
        let mut h = [
            2.0 * cmax / (resolution - 1) as f64,
            PI / resolution as f64,
            1.0 / (resolution - 1) as f64,
            1.0 / (resolution - 1) as f64,
        ];
        for _ in 0..60 {
            let mut improved = false;
            for coord in 0..4 {
                for sign in [-1.0, 1.0] {
                    let mut cand = best;
                    match coord {
                        0 => cand.c += sign * h[0],
                        1 => cand.phi += sign * h[1],
                        2 => cand.t1 += sign * h[2],
                        _ => cand.t2 += sign * h[3],
                    }
                    let cand = cand.clamp(cmax);
                    let v = score(&cand.pairs(params));
                    if v > best_val {
                        best_val = v;
                        best = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                h.iter_mut().for_each(|x| *x *= 0.5);
            }
        }
        pts.extend(best.pairs(params));
    }
    pts.push(RatePair::new(0.0, 0.0));
    Ok(Region2D::new(convex_hull(&pts)))
}

/// Which user acts as relay for the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelayMode {
    /// User 1 relays user 2's message (user-2 rate axis).
    User1Relays,
    /// User 2 relays user 1's message (user-1 rate axis).
    User2Relays,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayCapacity {
    pub bits: f64,
    /// Maximising source/relay correlation.
    pub rho: f64,
    /// Whether the relay observation is a degraded-better version of the
    /// destination's (`K ≥ 1`); only then is `bits` the capacity.
    pub degraded: bool,
}

/// Decode-and-forward rate of the Gaussian relay channel
/// `max_ρ min{½log2(1 + P + a²Q + 2aρ√(PQ)), ½log2(1 + (1-ρ²)K²P)}`,
/// golden-section search on `ρ ∈ [0,1]` to 1e-9.
pub fn relay_capacity(
    params: &ChannelParams,
    mode: RelayMode,
) -> Result<RelayCapacity, BaselineError> {
    params.validate()?;
    let (p, q, a) = match mode {
        RelayMode::User2Relays => (params.p1, params.p2, params.a21),
        RelayMode::User1Relays => (params.p2, params.p1, params.a12),
    };
    let k2 = params.k * params.k;
    let f = |rho: f64| {
        let mac = 0.5 * log2(1.0 + p + a * a * q + 2.0 * a * rho * sqrt(p * q));
        let bc = 0.5 * log2(1.0 + (1.0 - rho * rho) * k2 * p);
        mac.min(bc)
    };
    let g = (sqrt(5.0) - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-9 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    // The optimum may sit on the boundary of [0,1].
    let (rho, bits) = [(0.0, f(0.0)), (mid, f(mid)), (1.0, f(1.0))]
        .into_iter()
        .fold((0.0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(RelayCapacity {
        bits,
        rho,
        degraded: params.k >= 1.0,
    })
}

/// The seven right-hand sides of the compact form of the
/// Han-Kobayashi region for common fractions `beta`, in the order
/// `R1`, `R2`, three `R1+R2`, `2R1+R2`, `R1+2R2`.
pub fn hk_compact_bounds(
    params: &ChannelParams,
    beta: [f64; 2],
) -> Result<[f64; 7], BaselineError> {
    params.validate()?;
    let mut m = LinearGaussianModel::new(["V1", "U1", "V2", "U2", "Z1", "Z2"]);
    let amp = |t: usize, frac: f64| sqrt(frac * [params.p1, params.p2][t]);
    let (v1, u1) = (amp(0, 1.0 - beta[0]), amp(0, beta[0]));
    let (v2, u2) = (amp(1, 1.0 - beta[1]), amp(1, beta[1]));
    let def = |m: &mut LinearGaussianModel, name: &str, row: [f64; 6]| m.define(name, row.to_vec());
    let def_err = |e| BaselineError::Channel(IccError::Gaussian(e));
    let x1 = def(&mut m, "X1", [v1, u1, 0.0, 0.0, 0.0, 0.0]).map_err(def_err)?;
    let x2 = def(&mut m, "X2", [0.0, 0.0, v2, u2, 0.0, 0.0]).map_err(def_err)?;
    let cu1 = def(&mut m, "U1", [0.0, u1, 0.0, 0.0, 0.0, 0.0]).map_err(def_err)?;
    let cu2 = def(&mut m, "U2", [0.0, 0.0, 0.0, u2, 0.0, 0.0]).map_err(def_err)?;
    let y1 = def(
        &mut m,
        "Y1",
        [v1, u1, params.a21 * v2, params.a21 * u2, 1.0, 0.0],
    )
    .map_err(def_err)?;
    let y2 = def(
        &mut m,
        "Y2",
        [params.a12 * v1, params.a12 * u1, v2, u2, 0.0, 1.0],
    )
    .map_err(def_err)?;
    let i = |a: &[_], b: &[_], c: &[_]| m.conditional_mutual_information(a, b, c);
    let a1 = i(&[y1], &[x1, cu2], &[]);
    let a2 = i(&[y2], &[x2, cu1], &[]);
    let d1 = i(&[y1], &[x1], &[cu2]);
    let d2 = i(&[y2], &[x2], &[cu1]);
    let g1 = i(&[y1], &[x1], &[cu1, cu2]);
    let g2 = i(&[y2], &[x2], &[cu1, cu2]);
    let e1 = i(&[y1], &[x1, cu2], &[cu1]);
    let e2 = i(&[y2], &[x2, cu1], &[cu2]);
    Ok([
        d1,
        d2,
        a1 + g2,
        a2 + g1,
        e1 + e2,
        a1 + g1 + e2,
        a2 + g2 + e1,
    ])
}

/// Compact-form HK polygon for one pair of common fractions.
pub fn hk_polygon(
    params: &ChannelParams,
    beta: [f64; 2],
) -> Result<Option<Polygon2D>, BaselineError> {
    let b = hk_compact_bounds(params, beta)?;
    let mut sys = LinearSystem::new(["R1", "R2"])?;
    let rows: [&[(&str, i64)]; 7] = [
        &[("R1", 1)],
        &[("R2", 1)],
        &[("R1", 1), ("R2", 1)],
        &[("R1", 1), ("R2", 1)],
        &[("R1", 1), ("R2", 1)],
        &[("R1", 2), ("R2", 1)],
        &[("R1", 1), ("R2", 2)],
    ];
    for (terms, rhs) in rows.iter().zip(b) {
        sys.add_le(terms, rhs)?;
    }
    sys.add_ge(&[("R1", 1)], 0.0)?;
    sys.add_ge(&[("R2", 1)], 0.0)?;
    Ok(sys.polygon_from_system()?.into_polygon())
}

/// Han-Kobayashi region with Gaussian inputs `X_t = U_t + V_t`: hull of
/// [`hk_polygon`] over a `resolution`-point grid of each common fraction.
pub fn hk_region(params: &ChannelParams, resolution: usize) -> Result<Region2D, BaselineError> {
    if resolution < 2 {
        return Err(BaselineError::InvalidGrid(resolution));
    }
    let mut pts = Vec::new();
    for i in 0..resolution {
        for j in 0..resolution {
            let beta = [
                i as f64 / (resolution - 1) as f64,
                j as f64 / (resolution - 1) as f64,
            ];
            if let Some(p) = hk_polygon(params, beta)? {
                pts.extend_from_slice(p.vertices());
            }
        }
    }
    Ok(Region2D::new(convex_hull(&pts)))
}
