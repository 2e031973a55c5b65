//! Gaussian instantiation of the conferencing inner bound.
//!
//! Each user splits its power into five layers: private (`α`), common (`β`),
//! cooperative (`γ`), its own cell index (`θ`) and the other user's cell
//! index (`μ`). For the side in which user `d` applies dirty-paper coding
//! against the other user's cell index `S_o`, the auxiliaries are the layer
//! signals inflated by `λ·S_oʳ`, where `S_oʳ` is `S_o` scaled by its received
//! amplitude at `Y_d`.
//!
//! [`bound_system`] writes out the 24 rate inequalities together with the two
//! rate-sum equalities, non-negativity and codeword-count constraints;
//! [`achievable_polygon`] projects them onto (R1, R2) and
//! [`sweep_region`] convexifies over a grid of power splits, DPC inflation
//! multipliers, sides and relay polarities.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use libm::sqrt;

use crate::fme::{FmeError, LinearSystem};
use crate::gaussian::{GaussianError, Gram, LinearGaussianModel, Var};
use crate::geom::{convex_hull, Polygon2D, RatePair, Region2D};
use crate::parametric::{CompiledSystem, ParamSign, ParametricSystem};

#[derive(Debug, Clone, PartialEq)]
pub enum IccError {
    InvalidParams(String),
    InvalidSplit(String),
    InvalidConfig(String),
    Fme(FmeError),
    Gaussian(GaussianError),
}

impl fmt::Display for IccError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IccError::InvalidParams(m) => write!(f, "invalid channel parameters: {m}"),
            IccError::InvalidSplit(m) => write!(f, "invalid power split: {m}"),
            IccError::InvalidConfig(m) => write!(f, "invalid sweep configuration: {m}"),
            IccError::Fme(e) => write!(f, "projection failed: {e}"),
            IccError::Gaussian(e) => write!(f, "signal model: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for IccError {}

impl From<FmeError> for IccError {
    fn from(e: FmeError) -> Self {
        IccError::Fme(e)
    }
}

impl From<GaussianError> for IccError {
    fn from(e: GaussianError) -> Self {
        IccError::Gaussian(e)
    }
}

/// Standard-form Gaussian interference channel with a conferencing link:
/// `Y1 = X1 + a21·X2 + Z1`, `Y2 = a12·X1 + X2 + Z2`, `Ỹt = K·Xt + Z̃t`, all
/// noises unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub p1: f64,
    pub p2: f64,
    pub a12: f64,
    pub a21: f64,
    pub k: f64,
}

impl ChannelParams {
    pub fn new(p1: f64, p2: f64, a12: f64, a21: f64, k: f64) -> Result<Self, IccError> {
        let p = ChannelParams {
            p1,
            p2,
            a12,
            a21,
            k,
        };
        p.validate()?;
        Ok(p)
    }

    /// P1 = 6, P2 = 1.5, a12 = a21 = 0.74 with conferencing gain `k`.
    pub fn reference(k: f64) -> Self {
        ChannelParams {
            p1: 6.0,
            p2: 1.5,
            a12: 0.74,
            a21: 0.74,
            k,
        }
    }

    pub fn validate(&self) -> Result<(), IccError> {
        let finite = [self.p1, self.p2, self.a12, self.a21, self.k]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(IccError::InvalidParams(
                "all parameters must be finite".into(),
            ));
        }
        if !(self.p1 > 0.0 && self.p2 > 0.0) {
            return Err(IccError::InvalidParams("powers must be positive".into()));
        }
        if self.a12 < 0.0 || self.a21 < 0.0 || self.k < 0.0 {
            return Err(IccError::InvalidParams("gains must be non-negative".into()));
        }
        Ok(())
    }

    pub fn power(&self, user: usize) -> f64 {
        [self.p1, self.p2][user]
    }

    /// Amplitude of `X_from` at receiver `Y_to` (0-based users).
    pub fn gain(&self, from: usize, to: usize) -> f64 {
        match (from, to) {
            (0, 1) => self.a12,
            (1, 0) => self.a21,
            _ => 1.0,
        }
    }

    /// User relabelling: `(P1, a12) ↔ (P2, a21)`.
    pub fn swapped(&self) -> Self {
        ChannelParams {
            p1: self.p2,
            p2: self.p1,
            a12: self.a21,
            a21: self.a12,
            k: self.k,
        }
    }
}

/// One user's power fractions. `relay_negated` flips the sign with which
/// the user transmits the other user's cell index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSplit {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
    pub mu: f64,
    pub relay_negated: bool,
}

impl UserSplit {
    pub fn new(alpha: f64, beta: f64, gamma: f64, theta: f64, mu: f64) -> Result<Self, IccError> {
        let s = UserSplit {
            alpha,
            beta,
            gamma,
            theta,
            mu,
            relay_negated: false,
        };
        s.validate()?;
        Ok(s)
    }

    /// All power on the private layer.
    pub fn private_only() -> Self {
        UserSplit {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            theta: 0.0,
            mu: 0.0,
            relay_negated: false,
        }
    }

    /// Han-Kobayashi split with common fraction `beta`.
    pub fn hk(beta: f64) -> Result<Self, IccError> {
        UserSplit::new(1.0 - beta, beta, 0.0, 0.0, 0.0)
    }

    pub fn fractions(&self) -> [f64; 5] {
        [self.alpha, self.beta, self.gamma, self.theta, self.mu]
    }

    pub fn from_fractions(f: [f64; 5], relay_negated: bool) -> Self {
        UserSplit {
            alpha: f[0],
            beta: f[1],
            gamma: f[2],
            theta: f[3],
            mu: f[4],
            relay_negated,
        }
    }

    pub fn validate(&self) -> Result<(), IccError> {
        let f = self.fractions();
        if f.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(IccError::InvalidSplit(format!(
                "fractions must lie in [0,1]: {f:?}"
            )));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(IccError::InvalidSplit(format!(
                "fractions sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    fn relay_sign(&self) -> f64 {
        if self.relay_negated {
            -1.0
        } else {
            1.0
        }
    }

    fn cooperative(&self) -> bool {
        self.gamma > 0.0 || self.theta > 0.0 || self.mu > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub users: [UserSplit; 2],
}

impl PowerSplit {
    pub fn new(user1: UserSplit, user2: UserSplit) -> Self {
        PowerSplit {
            users: [user1, user2],
        }
    }

    pub fn swapped(&self) -> Self {
        PowerSplit {
            users: [self.users[1], self.users[0]],
        }
    }

    pub fn validate(&self) -> Result<(), IccError> {
        self.users.iter().try_for_each(UserSplit::validate)
    }

    /// No cooperative layer at either user.
    pub fn is_zero_cooperation(&self) -> bool {
        !self.users.iter().any(UserSplit::cooperative)
    }
}

/// Which user dirty-paper codes against the other's cell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Z1,
    Z2,
}

impl Side {
    /// (DPC user, other user), 0-based.
    pub fn roles(self) -> (usize, usize) {
        match self {
            Side::Z1 => (0, 1),
            Side::Z2 => (1, 0),
        }
    }

    pub fn mirror(self) -> Side {
        match self {
            Side::Z1 => Side::Z2,
            Side::Z2 => Side::Z1,
        }
    }
}

/// DPC inflation coefficients of the side's auxiliaries `M, N, G, H`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DpcCoeffs {
    pub lambda_m: f64,
    pub lambda_n: f64,
    pub lambda_g: f64,
    pub lambda_h: f64,
}

impl DpcCoeffs {
    pub fn zero() -> Self {
        DpcCoeffs::default()
    }

    /// `multiplier · p/(p + n)` per layer, where `p` is the layer's received
    /// power at the DPC user's receiver and `n` the power of everything not
    /// decoded jointly with it (noise included).
    pub fn mmse(params: &ChannelParams, split: &PowerSplit, side: Side, multiplier: f64) -> Self {
        let (d, o) = side.roles();
        let sd = &split.users[d];
        let so = &split.users[o];
        let pd = params.power(d);
        let po = params.power(o);
        let cross = params.gain(o, d);
        let residual = 1.0 + cross * cross * (so.alpha + so.gamma) * po;
        let joint_noise = residual + sd.gamma * pd;
        let h = own_cell_amplitude(params, split, side);
        let ratio = |p: f64, n: f64| if p > 0.0 { p / (p + n) } else { 0.0 };
        DpcCoeffs {
            lambda_m: multiplier * ratio(sd.alpha * pd, joint_noise),
            lambda_n: multiplier * ratio(sd.beta * pd, joint_noise),
            lambda_g: multiplier * ratio(sd.gamma * pd, residual),
            lambda_h: multiplier * ratio(h * h, joint_noise),
        }
    }
}

/// Received amplitude of the other user's cell index `S_o` at `Y_d`.
pub fn interference_amplitude(params: &ChannelParams, split: &PowerSplit, side: Side) -> f64 {
    let (d, o) = side.roles();
    let sd = &split.users[d];
    let so = &split.users[o];
    sd.relay_sign() * sqrt(sd.mu * params.power(d))
        + params.gain(o, d) * sqrt(so.theta * params.power(o))
}

/// Received amplitude of the DPC user's own cell index `S_d` at `Y_d`
/// (own transmission plus the other user's coherent relaying).
pub fn own_cell_amplitude(params: &ChannelParams, split: &PowerSplit, side: Side) -> f64 {
    let (d, o) = side.roles();
    let sd = &split.users[d];
    let so = &split.users[o];
    sqrt(sd.theta * params.power(d))
        + params.gain(o, d) * so.relay_sign() * sqrt(so.mu * params.power(o))
}

/// Latent sources, in column order.
pub const SOURCES: [&str; 12] = [
    "Vp1", "U1", "W1", "S1", "Vp2", "U2", "W2", "S2", "Z1", "Z2", "Zt1", "Zt2",
];

// Source columns: per-user layer blocks, then receiver and conferencing noise.
const VP: usize = 0;
const U: usize = 1;
const W: usize = 2;
const S: usize = 3;

fn layer(user: usize, which: usize) -> usize {
    4 * user + which
}

fn noise(user: usize) -> usize {
    8 + user
}

fn conf_noise(user: usize) -> usize {
    10 + user
}

/// Per-user variable names: `X, Y, Yt, V, U, W, S`.
const USER_VARS: [[&str; 7]; 2] = [
    ["X1", "Y1", "Yt1", "V1", "U1", "W1", "S1"],
    ["X2", "Y2", "Yt2", "V2", "U2", "W2", "S2"],
];

/// Auxiliary names `M, N, G, H` of the DPC user.
const AUX_VARS: [[&str; 4]; 2] = [["M1", "N1", "G1", "H1"], ["M2", "N2", "G2", "H2"]];

/// Signal model for one side. Defines, for both users `t`: `Xt`, `Yt`,
/// `Ytt` (conferencing output Ỹt), `Vt` (the private satellite layer
/// `V't`), `Ut`, `Wt`, `St`; and for the DPC user `d` the auxiliaries `Md`,
/// `Nd`, `Gd`, `Hd`.
pub fn build_signal_model(
    params: &ChannelParams,
    split: &PowerSplit,
    dpc: &DpcCoeffs,
    side: Side,
) -> Result<LinearGaussianModel, IccError> {
    let rows = signal_rows(params, split, dpc, side)?;
    let (d, _) = side.roles();
    let names = USER_VARS[0].iter().chain(&USER_VARS[1]).chain(&AUX_VARS[d]);
    let mut m = LinearGaussianModel::new(SOURCES);
    for (name, row) in names.zip(rows) {
        m.define(name, row.to_vec())?;
    }
    Ok(m)
}

const MODEL_VARS: usize = 18;

type SignalRows = [[f64; SOURCES.len()]; MODEL_VARS];

/// Coefficient rows of the model variables in definition order: the seven
/// per-user variables of each user, then the four auxiliaries.
fn signal_rows(
    params: &ChannelParams,
    split: &PowerSplit,
    dpc: &DpcCoeffs,
    side: Side,
) -> Result<SignalRows, IccError> {
    params.validate()?;
    split.validate()?;
    let mut rows = [[0.0; SOURCES.len()]; MODEL_VARS];
    let amps = |t: usize| {
        let s = &split.users[t];
        let p = params.power(t);
        [
            sqrt(s.alpha * p),
            sqrt(s.beta * p),
            sqrt(s.gamma * p),
            sqrt(s.theta * p),
        ]
    };
    let mut x_rows = [[0.0; SOURCES.len()]; 2];
    for (t, row) in x_rows.iter_mut().enumerate() {
        let s = &split.users[t];
        let p = params.power(t);
        for (which, a) in amps(t).into_iter().enumerate() {
            row[layer(t, which)] = a;
        }
        row[layer(1 - t, S)] = s.relay_sign() * sqrt(s.mu * p);
        let var: f64 = row.iter().map(|c| c * c).sum();
        assert!(
            (var - p).abs() <= 1e-9 * p,
            "power constraint violated: Var(X{}) = {var}, P = {p}",
            t + 1
        );
    }
    for t in 0..2 {
        let a = amps(t);
        let r = &mut rows[7 * t..7 * t + 7];
        r[0] = x_rows[t];
        for (from, xr) in x_rows.iter().enumerate() {
            let g = params.gain(from, t);
            for (acc, c) in r[1].iter_mut().zip(xr) {
                *acc += g * c;
            }
        }
        r[1][noise(t)] = 1.0;
        for (acc, c) in r[2].iter_mut().zip(&x_rows[t]) {
            *acc = params.k * c;
        }
        r[2][conf_noise(t)] = 1.0;
        // The private codeword is superimposed on the common and cell-index
        // codewords; its new information is the satellite layer alone.
        r[3][layer(t, VP)] = a[VP];
        r[4][layer(t, U)] = a[U];
        r[5][layer(t, W)] = a[W];
        r[6][layer(t, S)] = 1.0;
    }
    let (d, o) = side.roles();
    let a = amps(d);
    let amp = interference_amplitude(params, split, side);
    let aux = [
        (VP, a[VP], dpc.lambda_m),
        (U, a[U], dpc.lambda_n),
        (W, a[W], dpc.lambda_g),
        (S, own_cell_amplitude(params, split, side), dpc.lambda_h),
    ];
    for (r, (which, scale, lambda)) in rows[14..].iter_mut().zip(aux) {
        r[layer(d, which)] = scale;
        r[layer(o, S)] += lambda * amp;
    }
    Ok(rows)
}

/// Rate variables of the side-`Z1` bound system; `R1`, `R2` first. The
/// `Z2` system uses `L2j` in place of `L1j`.
pub const RATE_VARS: [&str; 14] = [
    "R1", "R2", "R11", "R12", "R13", "R10", "L10", "L11", "L12", "L13", "R21", "R22", "R23", "R20",
];

const RATE_VARS_Z2: [&str; 14] = [
    "R1", "R2", "R11", "R12", "R13", "R10", "L20", "L21", "L22", "L23", "R21", "R22", "R23", "R20",
];

pub fn rate_vars(side: Side) -> [&'static str; 14] {
    match side {
        Side::Z1 => RATE_VARS,
        Side::Z2 => RATE_VARS_Z2,
    }
}

/// One inequality template: rate terms and the mutual-information constant
/// `sign · I(A;B|C)`. Names use `d`/`o` for the DPC and the other user.
struct Template {
    lhs: &'static [(&'static str, i64)],
    a: &'static [&'static str],
    b: &'static [&'static str],
    c: &'static [&'static str],
    negate: bool,
}

const fn t(
    lhs: &'static [(&'static str, i64)],
    a: &'static [&'static str],
    b: &'static [&'static str],
) -> Template {
    Template {
        lhs,
        a,
        b,
        c: &[],
        negate: false,
    }
}

const fn dpc(
    lhs: &'static [(&'static str, i64)],
    a: &'static [&'static str],
    c: &'static [&'static str],
) -> Template {
    Template {
        lhs,
        a,
        b: &["So"],
        c,
        negate: true,
    }
}

/// The 24 rate inequalities, in order.
const BOUNDS: [Template; 24] = [
    // Binning at encoder d: each bin must hold a codeword typical with S_o.
    dpc(&[("Rdd", 1), ("Ldd", -1)], &["Md"], &["Nd", "Hd"]),
    dpc(&[("Rdo", 1), ("Ldo", -1)], &["Nd"], &[]),
    dpc(&[("Rd3", 1), ("Ld3", -1)], &["Gd"], &[]),
    dpc(&[("Rd0", 1), ("Ld0", -1)], &["Hd"], &[]),
    // Receiver d: joint decoding of M, N, H and the other user's common part.
    t(&[("Ldd", 1)], &["Yd", "Nd", "Hd", "Uo"], &["Md"]),
    t(
        &[("Ldd", 1), ("Ldo", 1)],
        &["Yd", "Hd", "Uo"],
        &["Md", "Nd"],
    ),
    t(
        &[("Ldd", 1), ("Ld0", 1)],
        &["Yd", "Nd", "Uo"],
        &["Md", "Hd"],
    ),
    t(
        &[("Ldd", 1), ("Rod", 1)],
        &["Yd", "Nd", "Hd"],
        &["Md", "Uo"],
    ),
    t(
        &[("Ldd", 1), ("Ldo", 1), ("Ld0", 1)],
        &["Yd", "Uo"],
        &["Md", "Nd", "Hd"],
    ),
    t(
        &[("Ldd", 1), ("Ldo", 1), ("Rod", 1)],
        &["Yd", "Hd"],
        &["Md", "Nd", "Uo"],
    ),
    t(
        &[("Ldd", 1), ("Ld0", 1), ("Rod", 1)],
        &["Yd", "Nd"],
        &["Md", "Hd", "Uo"],
    ),
    t(
        &[("Ldd", 1), ("Ldo", 1), ("Ld0", 1), ("Rod", 1)],
        &["Yd"],
        &["Md", "Nd", "Hd", "Uo"],
    ),
    // Cooperative message: resolved at receiver d, decoded by the relay.
    t(
        &[("Ld3", 1), ("Rd0", -1)],
        &["Yd", "Md", "Nd", "Hd", "Uo"],
        &["Gd"],
    ),
    t(&[("Ld3", 1)], &["Ytd", "Hd", "So"], &["Gd"]),
    // Receiver o.
    t(&[("Roo", 1)], &["Yo", "Uo", "So", "Nd"], &["Vo"]),
    t(
        &[("Roo", 1), ("Rod", 1)],
        &["Yo", "So", "Nd"],
        &["Vo", "Uo"],
    ),
    t(
        &[("Roo", 1), ("Ro0", 1)],
        &["Yo", "Uo", "Nd"],
        &["Vo", "So"],
    ),
    t(
        &[("Roo", 1), ("Ldo", 1)],
        &["Yo", "Uo", "So"],
        &["Vo", "Nd"],
    ),
    t(
        &[("Roo", 1), ("Rod", 1), ("Ro0", 1)],
        &["Yo", "Nd"],
        &["Vo", "Uo", "So"],
    ),
    t(
        &[("Roo", 1), ("Rod", 1), ("Ldo", 1)],
        &["Yo", "So"],
        &["Vo", "Uo", "Nd"],
    ),
    t(
        &[("Roo", 1), ("Ro0", 1), ("Ldo", 1)],
        &["Yo", "Uo"],
        &["Vo", "So", "Nd"],
    ),
    t(
        &[("Roo", 1), ("Rod", 1), ("Ro0", 1), ("Ldo", 1)],
        &["Yo"],
        &["Vo", "Uo", "So", "Nd"],
    ),
    t(
        &[("Ro3", 1), ("Ro0", -1)],
        &["Yo", "Vo", "Uo", "So", "Nd"],
        &["Wo"],
    ),
    t(&[("Ro3", 1)], &["Yto", "Hd", "So"], &["Wo"]),
];

/// Number of rate inequalities in [`bound_system`] (excluding the rate-sum
/// equalities, non-negativity and codeword-count rows).
pub const BOUND_COUNT: usize = BOUNDS.len();

/// Replaces the role letters `d`/`o` by user indices.
fn resolve(template: &str, side: Side) -> String {
    let (d, o) = side.roles();
    template
        .chars()
        .map(|c| match c {
            'd' => char::from(b'1' + d as u8),
            'o' => char::from(b'1' + o as u8),
            c => c,
        })
        .collect()
}

fn resolve_var(model: &LinearGaussianModel, template: &str, side: Side) -> Result<Var, IccError> {
    let name = match template {
        "Ytd" | "Yto" => {
            let (d, o) = side.roles();
            let t = if template == "Ytd" { d } else { o };
            format!("Yt{}", t + 1)
        }
        _ => resolve(template, side),
    };
    Ok(model.var(&name)?)
}

/// Mutual-information constants of the 24 bounds, in [`BOUNDS`] order and
/// with their sign applied.
pub fn bound_constants(model: &LinearGaussianModel, side: Side) -> Result<Vec<f64>, IccError> {
    let mi = bound_mutual_informations(model, side)?;
    Ok(BOUNDS
        .iter()
        .zip(mi)
        .map(|(b, i)| if b.negate { -i } else { i })
        .collect())
}

/// The unsigned mutual-information terms of the 24 bounds.
pub fn bound_mutual_informations(
    model: &LinearGaussianModel,
    side: Side,
) -> Result<Vec<f64>, IccError> {
    Ok(evaluate_terms(model, &bound_terms(model, side)?))
}

/// Variable handles `(A, B, C)` of each bound's `I(A;B|C)`.
type BoundTerms = Vec<[Vec<Var>; 3]>;

fn bound_terms(model: &LinearGaussianModel, side: Side) -> Result<BoundTerms, IccError> {
    let vars = |names: &[&str]| -> Result<Vec<Var>, IccError> {
        names.iter().map(|n| resolve_var(model, n, side)).collect()
    };
    BOUNDS
        .iter()
        .map(|b| Ok([vars(b.a)?, vars(b.b)?, vars(b.c)?]))
        .collect()
}

fn evaluate_terms(model: &LinearGaussianModel, terms: &BoundTerms) -> Vec<f64> {
    evaluate_with(&model.gram(), terms)
}

fn evaluate_with(gram: &Gram, terms: &BoundTerms) -> Vec<f64> {
    terms
        .iter()
        .map(|[a, b, c]| gram.conditional_mutual_information(a, b, c))
        .collect()
}

/// The full inequality system of one side over [`RATE_VARS`].
pub fn bound_system(model: &LinearGaussianModel, side: Side) -> Result<LinearSystem, IccError> {
    let consts = bound_constants(model, side)?;
    system_from_constants(&consts, side)
}

/// One row `Σ c·v ≤ sign·I_bound` (or `≤ 0`), `eq` for equalities.
struct RowSpec {
    terms: Vec<(String, i64)>,
    bound: Option<(usize, i64)>,
    eq: bool,
}

impl RowSpec {
    fn terms(&self) -> Vec<(&str, i64)> {
        self.terms.iter().map(|(n, c)| (n.as_str(), *c)).collect()
    }
}

fn row_specs(side: Side) -> Vec<RowSpec> {
    let r = |v: &str| resolve(v, side);
    let mut out = Vec::new();
    for (i, b) in BOUNDS.iter().enumerate() {
        out.push(RowSpec {
            terms: b.lhs.iter().map(|(v, c)| (r(v), *c)).collect(),
            bound: Some((i, if b.negate { -1 } else { 1 })),
            eq: false,
        });
    }
    for (total, parts) in [("Rd", ["Rdd", "Rdo", "Rd3"]), ("Ro", ["Roo", "Rod", "Ro3"])] {
        let mut terms = vec![(r(total), 1)];
        terms.extend(parts.iter().map(|p| (r(p), -1)));
        out.push(RowSpec {
            terms,
            bound: None,
            eq: true,
        });
    }
    for v in rate_vars(side) {
        out.push(RowSpec {
            terms: vec![(String::from(v), -1)],
            bound: None,
            eq: false,
        });
    }
    for (l, rr) in [
        ("Ldd", "Rdd"),
        ("Ldo", "Rdo"),
        ("Ld3", "Rd3"),
        ("Ld0", "Rd0"),
    ] {
        out.push(RowSpec {
            terms: vec![(r(l), -1), (r(rr), 1)],
            bound: None,
            eq: false,
        });
    }
    out
}

fn system_from_constants(consts: &[f64], side: Side) -> Result<LinearSystem, IccError> {
    let mut sys = LinearSystem::new(rate_vars(side))?;
    for spec in row_specs(side) {
        let rhs = spec.bound.map_or(0.0, |(i, _)| consts[i]);
        if spec.eq {
            sys.add_eq(&spec.terms(), rhs)?;
        } else {
            sys.add_le(&spec.terms(), rhs)?;
        }
    }
    Ok(sys)
}

/// The bound system of one side with each mutual-information term kept
/// as a non-negative parameter, in [`BOUNDS`] order.
pub fn parametric_bound_system(side: Side) -> Result<ParametricSystem, IccError> {
    let mut sys =
        ParametricSystem::new(rate_vars(side), vec![ParamSign::NonNegative; BOUND_COUNT])?;
    for spec in row_specs(side) {
        let rhs: Vec<(usize, i64)> = spec.bound.into_iter().collect();
        if spec.eq {
            sys.add_eq(&spec.terms(), &rhs)?;
        } else {
            sys.add_le(&spec.terms(), &rhs)?;
        }
    }
    Ok(sys)
}

/// Both sides' bound systems projected onto (R1, R2) once, so that each
/// evaluation point only costs the mutual-information terms.
#[derive(Debug, Clone)]
pub struct BoundProjector {
    sides: [CompiledSystem; 2],
    // Signal models are always built in the same definition order, so the
    // handles resolved on one model are valid for every other.
    terms: [BoundTerms; 2],
}

impl BoundProjector {
    pub fn new() -> Result<Self, IccError> {
        let compile = |side| -> Result<CompiledSystem, IccError> {
            Ok(parametric_bound_system(side)?
                .project(&["R1", "R2"])?
                .compile())
        };
        let split = PowerSplit::new(UserSplit::private_only(), UserSplit::private_only());
        let reference = ChannelParams::reference(1.0);
        let terms = |side| -> Result<BoundTerms, IccError> {
            let m = build_signal_model(&reference, &split, &DpcCoeffs::zero(), side)?;
            bound_terms(&m, side)
        };
        Ok(BoundProjector {
            sides: [compile(Side::Z1)?, compile(Side::Z2)?],
            terms: [terms(Side::Z1)?, terms(Side::Z2)?],
        })
    }

    pub fn projected(&self, side: Side) -> &CompiledSystem {
        &self.sides[side.roles().0]
    }

    pub fn polygon(
        &self,
        params: &ChannelParams,
        split: &PowerSplit,
        dpc: &DpcCoeffs,
        side: Side,
    ) -> Result<Option<Polygon2D>, IccError> {
        let gram = Gram::from_rows(&signal_rows(params, split, dpc, side)?);
        let mi = evaluate_with(&gram, &self.terms[side.roles().0]);
        let plane = self.projected(side).instantiate(&mi);
        Ok(plane.polygon_from_system()?.into_polygon())
    }
}

/// Projection of one side's bound system onto (R1, R2). `None` when the
/// point admits no non-negative rates.
pub fn achievable_polygon(
    params: &ChannelParams,
    split: &PowerSplit,
    dpc: &DpcCoeffs,
    side: Side,
) -> Result<Option<Polygon2D>, IccError> {
    let model = build_signal_model(params, split, dpc, side)?;
    let sys = bound_system(&model, side)?;
    project_to_polygon(&sys)
}

fn project_to_polygon(sys: &LinearSystem) -> Result<Option<Polygon2D>, IccError> {
    let plane = sys.project(&["R1", "R2"])?;
    Ok(plane.polygon_from_system()?.into_polygon())
}

/// Which sides enter a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideSelection {
    Z1,
    Z2,
    Both,
}

impl SideSelection {
    pub fn sides(self) -> &'static [Side] {
        match self {
            SideSelection::Z1 => &[Side::Z1],
            SideSelection::Z2 => &[Side::Z2],
            SideSelection::Both => &[Side::Z1, Side::Z2],
        }
    }
}

/// Signs with which a user may relay the other user's cell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    PositiveOnly,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Grid points per simplex dimension (step `1/(resolution-1)`).
    pub resolution: usize,
    /// Multipliers of the per-layer MMSE inflation coefficient.
    pub lambda_grid: Vec<f64>,
    pub sides: SideSelection,
    pub polarity: Polarity,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            resolution: 9,
            lambda_grid: vec![0.0, 0.5, 1.0, 1.5],
            sides: SideSelection::Both,
            polarity: Polarity::Both,
        }
    }
}

impl SweepConfig {
    pub fn with_resolution(resolution: usize) -> Self {
        SweepConfig {
            resolution,
            ..SweepConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), IccError> {
        if self.resolution < 2 {
            return Err(IccError::InvalidConfig(
                "resolution must be at least 2".into(),
            ));
        }
        if self.lambda_grid.is_empty() {
            return Err(IccError::InvalidConfig(
                "lambda grid must be non-empty".into(),
            ));
        }
        if self.lambda_grid.iter().any(|l| !l.is_finite()) {
            return Err(IccError::InvalidConfig(
                "lambda multipliers must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Every composition of `resolution-1` into five parts, as fractions, in
/// lexicographic order of the integer parts.
pub fn simplex_grid(resolution: usize) -> Vec<[f64; 5]> {
    let n = resolution.saturating_sub(1);
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let f = |k: usize| k as f64 / n as f64;
    for a in 0..=n {
        for b in 0..=n - a {
            for g in 0..=n - a - b {
                for t in 0..=n - a - b - g {
                    let m = n - a - b - g - t;
                    out.push([f(a), f(b), f(g), f(t), f(m)]);
                }
            }
        }
    }
    out
}

/// A fully specified evaluation point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub split: PowerSplit,
    pub side: Side,
    pub lambda_multiplier: f64,
}

impl GridPoint {
    pub fn dpc(&self, params: &ChannelParams) -> DpcCoeffs {
        DpcCoeffs::mmse(params, &self.split, self.side, self.lambda_multiplier)
    }

    pub fn polygon(&self, params: &ChannelParams) -> Result<Option<Polygon2D>, IccError> {
        achievable_polygon(params, &self.split, &self.dpc(params), self.side)
    }

    /// Same polygon through a precompiled projection.
    pub fn polygon_with(
        &self,
        params: &ChannelParams,
        projector: &BoundProjector,
    ) -> Result<Option<Polygon2D>, IccError> {
        projector.polygon(params, &self.split, &self.dpc(params), self.side)
    }
}

fn polarity_options(s: &[f64; 5], polarity: Polarity) -> &'static [bool] {
    if s[4] > 0.0 && polarity == Polarity::Both {
        &[false, true]
    } else {
        &[false]
    }
}

/// Visits the sweep's grid points in deterministic order, skipping
/// inflation multipliers that produce coefficients already visited for the
/// same split and side.
pub fn for_each_grid_point<E>(
    params: &ChannelParams,
    cfg: &SweepConfig,
    splits: &[[f64; 5]],
    mut f: impl FnMut(&GridPoint) -> Result<(), E>,
) -> Result<(), E> {
    for s1 in splits {
        for s2 in splits {
            for &side in cfg.sides.sides() {
                for &n1 in polarity_options(s1, cfg.polarity) {
                    for &n2 in polarity_options(s2, cfg.polarity) {
                        let split = PowerSplit::new(
                            UserSplit::from_fractions(*s1, n1),
                            UserSplit::from_fractions(*s2, n2),
                        );
                        let amp = interference_amplitude(params, &split, side);
                        let mut seen: Vec<DpcCoeffs> = Vec::new();
                        for &mult in &cfg.lambda_grid {
                            let c = if amp == 0.0 {
                                DpcCoeffs::zero()
                            } else {
                                DpcCoeffs::mmse(params, &split, side, mult)
                            };
                            if seen.contains(&c) {
                                continue;
                            }
                            seen.push(c);
                            f(&GridPoint {
                                split,
                                side,
                                lambda_multiplier: mult,
                            })?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Number of points [`for_each_grid_point`] visits.
pub fn grid_point_count(params: &ChannelParams, cfg: &SweepConfig, splits: &[[f64; 5]]) -> usize {
    let mut n = 0;
    let _ = for_each_grid_point::<()>(params, cfg, splits, |_| {
        n += 1;
        Ok(())
    });
    n
}

/// Running convex hull of many small polygons.
#[derive(Debug, Default)]
struct HullAccumulator {
    pending: Vec<RatePair>,
    hull: Vec<RatePair>,
}

impl HullAccumulator {
    fn add(&mut self, p: &Polygon2D) {
        self.pending.extend_from_slice(p.vertices());
        if self.pending.len() > 4096 {
            self.compact();
        }
    }

    fn compact(&mut self) {
        self.pending.extend_from_slice(&self.hull);
        self.hull = convex_hull(&self.pending).vertices().to_vec();
        self.pending.clear();
    }

    fn finish(mut self) -> Region2D {
        self.compact();
        Region2D::new(convex_hull(&self.hull))
    }
}

/// Sweep statistics reported alongside the region.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepStats {
    pub evaluated: usize,
    pub empty: usize,
}

/// Hull of [`achievable_polygon`] over every grid point; `visit` sees each
/// non-empty polygon in grid order.
pub fn sweep_region_with(
    params: &ChannelParams,
    cfg: &SweepConfig,
    mut visit: impl FnMut(&GridPoint, &Polygon2D),
) -> Result<(Region2D, SweepStats), IccError> {
    params.validate()?;
    cfg.validate()?;
    let splits = simplex_grid(cfg.resolution);
    let projector = BoundProjector::new()?;
    let mut acc = HullAccumulator::default();
    let mut stats = SweepStats::default();
    for_each_grid_point(params, cfg, &splits, |gp| {
        evaluate_into(params, &projector, gp, &mut acc, &mut stats, &mut visit)
    })?;
    Ok((acc.finish(), stats))
}

fn evaluate_into(
    params: &ChannelParams,
    projector: &BoundProjector,
    gp: &GridPoint,
    acc: &mut HullAccumulator,
    stats: &mut SweepStats,
    visit: &mut impl FnMut(&GridPoint, &Polygon2D),
) -> Result<(), IccError> {
    stats.evaluated += 1;
    match gp.polygon_with(params, projector)? {
        Some(poly) => {
            visit(gp, &poly);
            acc.add(&poly);
        }
        None => stats.empty += 1,
    }
    Ok(())
}

/// Achievable region `R` for the channel: convex hull over the full sweep.
pub fn sweep_region(params: &ChannelParams, cfg: &SweepConfig) -> Result<Region2D, IccError> {
    Ok(sweep_region_with(params, cfg, |_, _| {})?.0)
}

/// Sweep restricted to `γ = θ = μ = 0` with no inflation: the
/// Han-Kobayashi specialisation of the bound system.
pub fn zero_cooperation_region_with(
    params: &ChannelParams,
    resolution: usize,
    mut visit: impl FnMut(&GridPoint, &Polygon2D),
) -> Result<(Region2D, SweepStats), IccError> {
    params.validate()?;
    if resolution < 2 {
        return Err(IccError::InvalidConfig(
            "resolution must be at least 2".into(),
        ));
    }
    let betas: Vec<f64> = (0..resolution)
        .map(|i| i as f64 / (resolution - 1) as f64)
        .collect();
    let mut points = Vec::new();
    for &b1 in &betas {
        for &b2 in &betas {
            for side in [Side::Z1, Side::Z2] {
                points.push(GridPoint {
                    split: PowerSplit::new(UserSplit::hk(b1)?, UserSplit::hk(b2)?),
                    side,
                    lambda_multiplier: 0.0,
                });
            }
        }
    }
    let projector = BoundProjector::new()?;
    let mut acc = HullAccumulator::default();
    let mut stats = SweepStats::default();
    for gp in &points {
        evaluate_into(params, &projector, gp, &mut acc, &mut stats, &mut visit)?;
    }
    Ok((acc.finish(), stats))
}

pub fn zero_cooperation_region(
    params: &ChannelParams,
    resolution: usize,
) -> Result<Region2D, IccError> {
    Ok(zero_cooperation_region_with(params, resolution, |_, _| {})?.0)
}

/// The reduced bounds of the ideal-conferencing case for one side:
/// `R_d ≤ I(Y_d;H_d) − I(H_d;S_o)`, `R_o ≤ I(Y_o;S_o)` (as `(R1, R2)` caps).
pub fn ideal_rate_caps(
    params: &ChannelParams,
    split: &PowerSplit,
    dpc: &DpcCoeffs,
    side: Side,
) -> Result<RatePair, IccError> {
    let model = build_signal_model(params, split, dpc, side)?;
    let v = |n: &str| resolve_var(&model, n, side);
    let rd = model.mutual_information(&[v("Yd")?], &[v("Hd")?])
        - model.mutual_information(&[v("Hd")?], &[v("So")?]);
    let ro = model.mutual_information(&[v("Yo")?], &[v("So")?]);
    Ok(match side {
        Side::Z1 => RatePair::new(rd, ro),
        Side::Z2 => RatePair::new(ro, rd),
    })
}

/// Ideal conferencing: all power on the cell-index layers (`α = β = γ = 0`),
/// only the four reduced bounds, hull over `θ` grid × inflation multipliers ×
/// polarities × sides.
pub fn ideal_conferencing_region_with(
    params: &ChannelParams,
    cfg: &SweepConfig,
    mut visit: impl FnMut(&GridPoint, &Polygon2D),
) -> Result<(Region2D, SweepStats), IccError> {
    params.validate()?;
    cfg.validate()?;
    let splits: Vec<[f64; 5]> = (0..cfg.resolution)
        .map(|i| {
            let th = i as f64 / (cfg.resolution - 1) as f64;
            [0.0, 0.0, 0.0, th, 1.0 - th]
        })
        .collect();
    let mut acc = HullAccumulator::default();
    let mut stats = SweepStats::default();
    for_each_grid_point(params, cfg, &splits, |gp| {
        stats.evaluated += 1;
        let caps = ideal_rate_caps(params, &gp.split, &gp.dpc(params), gp.side)?;
        let mut sys = LinearSystem::new(["R1", "R2"])?;
        sys.add_le(&[("R1", 1)], caps.r1)?;
        sys.add_le(&[("R2", 1)], caps.r2)?;
        sys.add_ge(&[("R1", 1)], 0.0)?;
        sys.add_ge(&[("R2", 1)], 0.0)?;
        match sys.polygon_from_system()?.into_polygon() {
            Some(poly) => {
                visit(gp, &poly);
                acc.add(&poly);
            }
            None => stats.empty += 1,
        }
        Ok::<(), IccError>(())
    })?;
    Ok((acc.finish(), stats))
}

pub fn ideal_conferencing_region(
    params: &ChannelParams,
    cfg: &SweepConfig,
) -> Result<Region2D, IccError> {
    Ok(ideal_conferencing_region_with(params, cfg, |_, _| {})?.0)
}

/// Axis intercepts of the sweep region refined by coordinate descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intercepts {
    pub max_r1: f64,
    pub max_r2: f64,
    pub grid_max_r1: f64,
    pub grid_max_r2: f64,
    pub argmax_r1: GridPoint,
    pub argmax_r2: GridPoint,
}

/// Number of coordinate-descent rounds in [`polish_axis`].
pub const POLISH_ROUNDS: usize = 20;

/// Coordinate descent on the two users' power fractions, moving mass
/// between pairs of layers with a step that halves every round.
pub fn polish_axis(
    params: &ChannelParams,
    projector: &BoundProjector,
    start: GridPoint,
    initial_step: f64,
    axis: usize,
) -> Result<(f64, GridPoint), IccError> {
    let score = |gp: &GridPoint| -> Result<f64, IccError> {
        Ok(match gp.polygon_with(params, projector)? {
            Some(p) if axis == 0 => p.max_r1(),
            Some(p) => p.max_r2(),
            None => f64::NEG_INFINITY,
        })
    };
    let mut best = start;
    let mut best_val = score(&best)?;
    let mut step = initial_step;
    for _ in 0..POLISH_ROUNDS {
        for user in 0..2 {
            for from in 0..5 {
                for to in 0..5 {
                    if from == to {
                        continue;
                    }
                    let mut f = best.split.users[user].fractions();
                    let delta = step.min(f[from]);
                    if delta <= 0.0 {
                        continue;
                    }
                    f[from] -= delta;
                    f[to] += delta;
                    // Keep the sum exact.
                    let total: f64 = f.iter().sum();
                    f[to] += 1.0 - total;
                    if f[to] > 1.0 {
                        continue;
                    }
                    let mut cand = best;
                    cand.split.users[user] =
                        UserSplit::from_fractions(f, best.split.users[user].relay_negated);
                    if cand.split.validate().is_err() {
                        continue;
                    }
                    let v = score(&cand)?;
                    if v > best_val + 1e-13 {
                        best_val = v;
                        best = cand;
                    }
                }
            }
        }
        step *= 0.5;
    }
    Ok((best_val, best))
}

/// Runs the sweep, remembers the grid points attaining each axis maximum
/// and polishes them. The returned region includes the polished polygons.
pub fn polished_intercepts(
    params: &ChannelParams,
    cfg: &SweepConfig,
) -> Result<(Region2D, Intercepts), IccError> {
    polished_intercepts_with(params, cfg, |_, _| {})
}

/// [`polished_intercepts`] that also hands every grid-point polygon and the
/// two polished polygons to `visit`.
pub fn polished_intercepts_with(
    params: &ChannelParams,
    cfg: &SweepConfig,
    mut visit: impl FnMut(&GridPoint, &Polygon2D),
) -> Result<(Region2D, Intercepts), IccError> {
    let mut best: [(f64, Option<GridPoint>); 2] =
        [(f64::NEG_INFINITY, None), (f64::NEG_INFINITY, None)];
    let (region, _) = sweep_region_with(params, cfg, |gp, poly| {
        visit(gp, poly);
        for (axis, b) in best.iter_mut().enumerate() {
            let v = if axis == 0 {
                poly.max_r1()
            } else {
                poly.max_r2()
            };
            if v > b.0 {
                *b = (v, Some(*gp));
            }
        }
    })?;
    let step = 1.0 / (cfg.resolution - 1) as f64;
    let projector = BoundProjector::new()?;
    let mut out = [(0.0, None); 2];
    for axis in 0..2 {
        let (grid_val, Some(gp)) = best[axis] else {
            return Err(IccError::InvalidConfig("sweep produced no polygon".into()));
        };
        let (v, p) = polish_axis(params, &projector, gp, step, axis)?;
        out[axis] = (v.max(grid_val), Some(p));
    }
    // The polished points are achievable too.
    let mut pts = region.vertices().to_vec();
    for (_, gp) in &out {
        let gp = gp.expect("set above");
        if let Some(poly) = gp.polygon_with(params, &projector)? {
            visit(&gp, &poly);
            pts.extend_from_slice(poly.vertices());
        }
    }
    Ok((
        Region2D::new(convex_hull(&pts)),
        Intercepts {
            max_r1: out[0].0,
            max_r2: out[1].0,
            grid_max_r1: best[0].0,
            grid_max_r2: best[1].0,
            argmax_r1: out[0].1.expect("set above"),
            argmax_r2: out[1].1.expect("set above"),
        },
    ))
}
