//! Jointly Gaussian variables as linear maps of independent unit-variance
//! latent sources.
//!
//! Every named variable is a row of coefficients over the latent sources, so
//! the covariance of any subset is `G·Gᵀ` of the stacked rows. Mutual
//! information is evaluated from the geometry of those row spans: after
//! projecting out the conditioning span, `I(A;B|C) = -½·log2 det(I - M·Mᵀ)`
//! where `M` holds the inner products between orthonormal bases of the
//! residual spans of `A` and `B`. For non-singular covariances this is the
//! familiar `½·log2(|Σ_A|·|Σ_B| / |Σ_AB|)`; zero-power layers simply drop out
//! of their span and contribute nothing.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, Basis};

/// Name of a random variable inside a [`LinearGaussianModel`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Result<Self, GaussianError> {
        let name = name.into();
        if name.is_empty() {
            return Err(GaussianError::EmptyName);
        }
        Ok(VariableId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Cheap handle to a variable of one particular model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaussianError {
    UnknownVariable(String),
    DuplicateVariable(String),
    EmptyName,
    LengthMismatch { expected: usize, found: usize },
}

impl fmt::Display for GaussianError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaussianError::UnknownVariable(n) => write!(f, "unknown variable `{n}`"),
            GaussianError::DuplicateVariable(n) => write!(f, "variable `{n}` already defined"),
            GaussianError::EmptyName => f.write_str("variable names must be non-empty"),
            GaussianError::LengthMismatch { expected, found } => write!(
                f,
                "coefficient vector has {found} entries, model has {expected} sources"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GaussianError {}

/// Named Gaussian variables over a fixed list of latent N(0,1) sources.
#[derive(Debug, Clone, Default)]
pub struct LinearGaussianModel {
    sources: Vec<String>,
    names: Vec<VariableId>,
    rows: Vec<Vec<f64>>,
}

impl LinearGaussianModel {
    pub fn new<S: AsRef<str>>(sources: impl IntoIterator<Item = S>) -> Self {
        LinearGaussianModel {
            sources: sources
                .into_iter()
                .map(|s| s.as_ref().to_string())
                .collect(),
            names: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &VariableId> {
        self.names.iter()
    }

    /// Index of a latent source by name.
    pub fn source_index(&self, name: &str) -> Option<usize> {
        self.sources.iter().position(|s| s == name)
    }

    pub fn define(&mut self, name: &str, coeffs: Vec<f64>) -> Result<Var, GaussianError> {
        let id = VariableId::new(name)?;
        if self.names.contains(&id) {
            return Err(GaussianError::DuplicateVariable(id.0));
        }
        if coeffs.len() != self.sources.len() {
            return Err(GaussianError::LengthMismatch {
                expected: self.sources.len(),
                found: coeffs.len(),
            });
        }
        self.names.push(id);
        self.rows.push(coeffs);
        Ok(Var(self.rows.len() - 1))
    }

    /// Defines `name` as `Σ scale·source` over the named latent sources.
    pub fn define_from_sources(
        &mut self,
        name: &str,
        terms: &[(&str, f64)],
    ) -> Result<Var, GaussianError> {
        let mut row = vec![0.0; self.sources.len()];
        for &(src, scale) in terms {
            let i = self
                .source_index(src)
                .ok_or_else(|| GaussianError::UnknownVariable(src.to_string()))?;
            row[i] += scale;
        }
        self.define(name, row)
    }

    /// Defines `name` as a linear combination of already-defined variables.
    pub fn define_combination(
        &mut self,
        name: &str,
        terms: &[(Var, f64)],
    ) -> Result<Var, GaussianError> {
        let mut row = vec![0.0; self.sources.len()];
        for &(v, scale) in terms {
            for (acc, c) in row.iter_mut().zip(&self.rows[v.0]) {
                *acc += scale * c;
            }
        }
        self.define(name, row)
    }

    pub fn var(&self, name: &str) -> Result<Var, GaussianError> {
        self.names
            .iter()
            .position(|n| n.0 == name)
            .map(Var)
            .ok_or_else(|| GaussianError::UnknownVariable(name.to_string()))
    }

    pub fn vars(&self, names: &[&str]) -> Result<Vec<Var>, GaussianError> {
        names.iter().map(|n| self.var(n)).collect()
    }

    pub fn name(&self, v: Var) -> &VariableId {
        &self.names[v.0]
    }

    pub fn coefficients(&self, v: Var) -> &[f64] {
        &self.rows[v.0]
    }

    pub fn variance(&self, v: Var) -> f64 {
        linalg::dot(&self.rows[v.0], &self.rows[v.0])
    }

    /// Row-major covariance of `vars` in the given order.
    pub fn covariance(&self, vars: &[Var]) -> Vec<f64> {
        let n = vars.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let c = linalg::dot(&self.rows[vars[i].0], &self.rows[vars[j].0]);
                out[i * n + j] = c;
                out[j * n + i] = c;
            }
        }
        out
    }

    /// Covariance of the named variables.
    pub fn build_covariance(&self, names: &[&str]) -> Result<Vec<f64>, GaussianError> {
        Ok(self.covariance(&self.vars(names)?))
    }

    fn span(&self, vars: &[Var], against: &Basis) -> Basis {
        Basis::residual_span(
            self.sources.len(),
            vars.iter().map(|v| self.rows[v.0].as_slice()),
            against,
        )
    }

    /// `I(A;B)` in bits.
    pub fn mutual_information(&self, a: &[Var], b: &[Var]) -> f64 {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(A;B|C)` in bits. Infinite when the residual spans of `A` and `B`
    /// share a direction (a noiseless deterministic link).
    pub fn conditional_mutual_information(&self, a: &[Var], b: &[Var], c: &[Var]) -> f64 {
        let dim = self.sources.len();
        let cond = self.span(c, &Basis::empty(dim));
        let qa = self.span(a, &cond);
        let qb = self.span(b, &cond);
        if qa.rank() == 0 || qb.rank() == 0 {
            return 0.0;
        }
        // Work with the smaller of M·Mᵀ and Mᵀ·M.
        let (small, large) = if qa.rank() <= qb.rank() {
            (&qa, &qb)
        } else {
            (&qb, &qa)
        };
        let k = small.rank();
        let l = large.rank();
        let mut cross = Vec::with_capacity(k * l);
        for s in small.rows() {
            cross.extend(large.rows().map(|q| linalg::dot(s, q)));
        }
        let mut g = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let mut v = -linalg::dot(&cross[i * l..(i + 1) * l], &cross[j * l..(j + 1) * l]);
                if i == j {
                    v += 1.0;
                }
                g[i * k + j] = v;
                g[j * k + i] = v;
            }
        }
        match linalg::ln_det_spd(&g, k) {
            Some(ld) => (-0.5 * ld / core::f64::consts::LN_2).max(0.0),
            None => f64::INFINITY,
        }
    }

    /// Inner products of all variable pairs, for evaluating many terms of
    /// one model.
    pub fn gram(&self) -> Gram {
        Gram::from_rows(&self.rows)
    }

    /// Name-based form of [`Self::mutual_information`].
    pub fn mi(&self, a: &[&str], b: &[&str]) -> Result<f64, GaussianError> {
        Ok(self.mutual_information(&self.vars(a)?, &self.vars(b)?))
    }

    /// Name-based form of [`Self::conditional_mutual_information`].
    pub fn cmi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64, GaussianError> {
        Ok(self.conditional_mutual_information(&self.vars(a)?, &self.vars(b)?, &self.vars(c)?))
    }
}

/// Residual variance, relative to the variance, below which a variable is
/// treated as determined by the ones before it.
pub const GRAM_RANK_TOL: f64 = 1e-13;

const MAX_FACTOR: usize = 16;

/// Covariance of every variable pair of a [`LinearGaussianModel`].
///
/// Mutual information is computed from Cholesky pivots, `I(A;B|C) =
/// ½·log2(|Σ_B'|C| / |Σ_B'|CA|)` where `B'` is a maximal subset of `B`
/// independent given `C`; a pivot that vanishes once `A` is known means a
/// shared direction and infinite information. It agrees with
/// [`LinearGaussianModel::conditional_mutual_information`] but avoids
/// working in the source space.
#[derive(Debug, Clone)]
pub struct Gram {
    n: usize,
    g: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Factor {
    sel: [usize; MAX_FACTOR],
    l: [f64; MAX_FACTOR * MAX_FACTOR],
    k: usize,
}

impl Factor {
    fn new() -> Self {
        Factor {
            sel: [0; MAX_FACTOR],
            l: [0.0; MAX_FACTOR * MAX_FACTOR],
            k: 0,
        }
    }

    /// Residual variance of `v` given the accepted variables; `v` is
    /// accepted when it is not (numerically) determined by them.
    fn push(&mut self, gram: &Gram, v: usize) -> Option<f64> {
        let gvv = gram.g[v * gram.n + v];
        if gvv.is_nan() || gvv <= 0.0 || self.k == MAX_FACTOR {
            return None;
        }
        let k = self.k;
        let mut d = gvv;
        for j in 0..k {
            let mut r = gram.g[v * gram.n + self.sel[j]];
            for t in 0..j {
                r -= self.l[k * MAX_FACTOR + t] * self.l[j * MAX_FACTOR + t];
            }
            r /= self.l[j * MAX_FACTOR + j];
            self.l[k * MAX_FACTOR + j] = r;
            d -= r * r;
        }
        if d <= GRAM_RANK_TOL * gvv {
            return None;
        }
        self.l[k * MAX_FACTOR + k] = libm::sqrt(d);
        self.sel[k] = v;
        self.k += 1;
        Some(d)
    }
}

impl Gram {
    /// Gram matrix of coefficient rows; variable `i` is row `i`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = linalg::dot(rows[i].as_ref(), rows[j].as_ref());
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        Gram { n, g }
    }

    pub fn covariance(&self, a: Var, b: Var) -> f64 {
        self.g[a.0 * self.n + b.0]
    }

    /// `I(A;B|C)` in bits; infinite when `A` and `B` share a direction
    /// given `C`.
    pub fn conditional_mutual_information(&self, a: &[Var], b: &[Var], c: &[Var]) -> f64 {
        if a.len() + b.len() + c.len() > MAX_FACTOR {
            panic!("at most {MAX_FACTOR} variables per term");
        }
        let mut given_c = Factor::new();
        for v in c {
            given_c.push(self, v.0);
        }
        let mut given_ca = given_c;
        for v in a {
            given_ca.push(self, v.0);
        }
        let mut with_b = given_c;
        let mut acc = 0.0;
        let mut any = false;
        for v in b {
            let Some(d) = with_b.push(self, v.0) else {
                continue;
            };
            any = true;
            match given_ca.push(self, v.0) {
                Some(d2) => acc += libm::log(d / d2),
                None => return f64::INFINITY,
            }
        }
        if !any {
            return 0.0;
        }
        (0.5 * acc / core::f64::consts::LN_2).max(0.0)
    }

    pub fn mutual_information(&self, a: &[Var], b: &[Var]) -> f64 {
        self.conditional_mutual_information(a, b, &[])
    }
}
