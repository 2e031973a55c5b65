//! Linear inequality systems over named rate variables and their projection
//! by Fourier-Motzkin elimination.
//!
//! Coefficients are exact: each row is kept as a primitive integer vector
//! (any rational row is rescaled by a positive factor on entry). Right-hand
//! sides are `f64` and carry all the numerical noise.
//!
//! Every row remembers which input rows it was combined from. A derived row
//! whose origin set strictly contains another row's origin set cannot be an
//! extreme combination and is dropped (Chernikov's rule); this keeps the
//! elimination polynomial in practice without any LP calls.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::geom::{convex_hull, Polygon2D, RatePair};

pub type Rational = Ratio<i64>;

/// Feasibility / comparison tolerance on right-hand sides, in bits.
pub const RHS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FmeError {
    UnknownVariable(String),
    DuplicateVariable(String),
    ZeroRow,
    NotANumber,
    CoefficientOverflow,
    NotTwoDimensional(usize),
    Unbounded,
    Irrational,
}

impl fmt::Display for FmeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FmeError::UnknownVariable(v) => write!(f, "unknown rate variable `{v}`"),
            FmeError::DuplicateVariable(v) => write!(f, "rate variable `{v}` declared twice"),
            FmeError::ZeroRow => f.write_str("inequality has no nonzero coefficient"),
            FmeError::NotANumber => f.write_str("right-hand side is NaN"),
            FmeError::CoefficientOverflow => f.write_str("coefficient overflow during elimination"),
            FmeError::NotTwoDimensional(n) => {
                write!(
                    f,
                    "polygon extraction needs exactly 2 variables, system has {n}"
                )
            }
            FmeError::Unbounded => f.write_str("feasible region is unbounded (missing bound)"),
            FmeError::Irrational => f.write_str("edge normal has no small rational form"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FmeError {}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RateVar(String);

impl RateVar {
    pub fn new(name: impl Into<String>) -> Self {
        RateVar(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RateVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `Σ coeffs[v]·v ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coeffs: BTreeMap<RateVar, Rational>,
    pub rhs: f64,
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if *c < Rational::from_integer(0) {
                ("-", -*c)
            } else {
                ("+", *c)
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if mag != Rational::from_integer(1) {
                write!(f, "{mag}·")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, " <= {}", self.rhs)
    }
}

/// Small growable bitset over input-row indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct Origins(Vec<u64>);

impl Origins {
    pub(crate) fn single(i: usize) -> Self {
        let mut w = vec![0u64; i / 64 + 1];
        w[i / 64] |= 1 << (i % 64);
        Origins(w)
    }

    pub(crate) fn union(&self, o: &Origins) -> Origins {
        let n = self.0.len().max(o.0.len());
        Origins(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0) | o.0.get(i).copied().unwrap_or(0))
                .collect(),
        )
    }

    /// `self ⊊ other`
    pub(crate) fn strict_subset_of(&self, other: &Origins) -> bool {
        let mut proper = false;
        for i in 0..self.0.len().max(other.0.len()) {
            let a = self.0.get(i).copied().unwrap_or(0);
            let b = other.0.get(i).copied().unwrap_or(0);
            if a & !b != 0 {
                return false;
            }
            if a != b {
                proper = true;
            }
        }
        proper
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    coeffs: Vec<i64>,
    rhs: f64,
    origins: Origins,
}

impl Row {
    /// Divides by the gcd of the coefficients. Returns false for all-zero rows.
    fn normalize(&mut self) -> bool {
        let g = self.coeffs.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return false;
        }
        if g != 1 {
            self.coeffs.iter_mut().for_each(|c| *c /= g);
            self.rhs /= g as f64;
        }
        true
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(&c, &v)| c as f64 * v).sum()
    }
}

/// A conjunction of `≤` rows over an ordered list of rate variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    vars: Vec<RateVar>,
    rows: Vec<Row>,
    infeasible: bool,
    next_origin: usize,
}

impl LinearSystem {
    pub fn new<S: AsRef<str>>(vars: impl IntoIterator<Item = S>) -> Result<Self, FmeError> {
        let mut out: Vec<RateVar> = Vec::new();
        for v in vars {
            let v = RateVar::new(v.as_ref());
            if out.contains(&v) {
                return Err(FmeError::DuplicateVariable(v.0));
            }
            out.push(v);
        }
        Ok(LinearSystem {
            vars: out,
            rows: Vec::new(),
            infeasible: false,
            next_origin: 0,
        })
    }

    /// Rows given as primitive integer coefficient vectors.
    pub(crate) fn from_primitive_rows(
        vars: Vec<RateVar>,
        rows: impl IntoIterator<Item = (Vec<i64>, f64)>,
        infeasible: bool,
    ) -> Self {
        let rows: Vec<Row> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (coeffs, rhs))| Row {
                coeffs,
                rhs,
                origins: Origins::single(i),
            })
            .collect();
        let next_origin = rows.len();
        LinearSystem {
            vars,
            rows,
            infeasible,
            next_origin,
        }
    }

    pub fn vars(&self) -> &[RateVar] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.0 == name)
    }

    /// Number of stored rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True once a row `0 ≤ b` with `b < 0` (or an infinite lower bound) was
    /// met. The solution set is then empty.
    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }

    /// Adds `Σ c·v ≤ rhs`. A `+∞` right-hand side is vacuous and not stored;
    /// `-∞` marks the system infeasible.
    pub fn add(&mut self, terms: &[(&str, Rational)], rhs: f64) -> Result<(), FmeError> {
        if rhs.is_nan() {
            return Err(FmeError::NotANumber);
        }
        let mut dense = vec![Rational::from_integer(0); self.vars.len()];
        for (name, c) in terms {
            let i = self
                .var_index(name)
                .ok_or_else(|| FmeError::UnknownVariable(name.to_string()))?;
            dense[i] += *c;
        }
        if dense.iter().all(|c| *c == Rational::from_integer(0)) {
            return Err(FmeError::ZeroRow);
        }
        let lcm = dense.iter().fold(1i64, |l, c| l.lcm(c.denom()));
        let coeffs = dense
            .iter()
            .map(|c| {
                c.numer()
                    .checked_mul(lcm / c.denom())
                    .ok_or(FmeError::CoefficientOverflow)
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.push_row(coeffs, rhs * lcm as f64);
        Ok(())
    }

    /// Integer-coefficient convenience for [`Self::add`].
    pub fn add_le(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<(), FmeError> {
        let t: Vec<(&str, Rational)> = terms
            .iter()
            .map(|&(n, c)| (n, Rational::from_integer(c)))
            .collect();
        self.add(&t, rhs)
    }

    /// `Σ c·v ≥ rhs`, stored negated.
    pub fn add_ge(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<(), FmeError> {
        let t: Vec<(&str, i64)> = terms.iter().map(|&(n, c)| (n, -c)).collect();
        self.add_le(&t, -rhs)
    }

    /// `Σ c·v = rhs` as a pair of opposite rows.
    pub fn add_eq(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<(), FmeError> {
        self.add_le(terms, rhs)?;
        self.add_ge(terms, rhs)
    }

    fn push_row(&mut self, coeffs: Vec<i64>, rhs: f64) {
        if rhs == f64::INFINITY {
            return;
        }
        if rhs == f64::NEG_INFINITY {
            self.infeasible = true;
            return;
        }
        let mut row = Row {
            coeffs,
            rhs,
            origins: Origins::single(self.next_origin),
        };
        self.next_origin += 1;
        if row.normalize() {
            self.rows.push(row);
        } else if rhs < -RHS_TOL {
            self.infeasible = true;
        }
    }

    /// Rows in exact rational form.
    pub fn inequalities(&self) -> Vec<LinearInequality> {
        self.rows
            .iter()
            .map(|r| LinearInequality {
                coeffs: self
                    .vars
                    .iter()
                    .zip(&r.coeffs)
                    .filter(|(_, &c)| c != 0)
                    .map(|(v, &c)| (v.clone(), Rational::from_integer(c)))
                    .collect(),
                rhs: r.rhs,
            })
            .collect()
    }

    /// Whether `point` (one value per variable, in declaration order)
    /// satisfies every row within `tol`.
    pub fn contains_point(&self, point: &[f64], tol: f64) -> bool {
        !self.infeasible && self.rows.iter().all(|r| r.eval(point) <= r.rhs + tol)
    }

    fn counts(&self, j: usize) -> (usize, usize) {
        self.rows
            .iter()
            .fold((0, 0), |(p, n), r| match r.coeffs[j].signum() {
                1 => (p + 1, n),
                -1 => (p, n + 1),
                _ => (p, n),
            })
    }

    /// Pair of opposite rows pinning `Σ c·v` on variable `j`, if present.
    fn equality_pair(&self, j: usize) -> Option<(usize, usize)> {
        for (a, ra) in self.rows.iter().enumerate() {
            if ra.coeffs[j] <= 0 {
                continue;
            }
            for (b, rb) in self.rows.iter().enumerate() {
                if rb.coeffs[j] < 0
                    && ra.coeffs.iter().zip(&rb.coeffs).all(|(x, y)| *x == -*y)
                    && (ra.rhs + rb.rhs).abs() <= RHS_TOL
                {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Number of rows elimination of variable `j` would create.
    fn elimination_cost(&self, j: usize) -> usize {
        let (p, n) = self.counts(j);
        match self.equality_pair(j) {
            Some(_) => p + n - 2,
            None => p * n,
        }
    }

    fn combine(up: &Row, down: &Row, j: usize) -> Result<Row, FmeError> {
        let a = up.coeffs[j];
        let b = -down.coeffs[j];
        debug_assert!(a > 0 && b > 0);
        let coeffs = up
            .coeffs
            .iter()
            .zip(&down.coeffs)
            .map(|(&u, &d)| {
                b.checked_mul(u)
                    .and_then(|x| a.checked_mul(d).and_then(|y| x.checked_add(y)))
                    .ok_or(FmeError::CoefficientOverflow)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Row {
            coeffs,
            rhs: b as f64 * up.rhs + a as f64 * down.rhs,
            origins: up.origins.union(&down.origins),
        })
    }

    /// Projects out `v`. Rows not mentioning `v` pass through unchanged; an
    /// equality on `v` is used by substitution, otherwise every upper bound
    /// is paired with every lower bound.
    pub fn eliminate_variable(&self, v: &str) -> Result<LinearSystem, FmeError> {
        let Some(j) = self.var_index(v) else {
            return Err(FmeError::UnknownVariable(v.to_string()));
        };
        let mut keep: Vec<Row> = Vec::new();
        let mut ups: Vec<usize> = Vec::new();
        let mut downs: Vec<usize> = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            match r.coeffs[j].signum() {
                0 => keep.push(r.clone()),
                1 => ups.push(i),
                _ => downs.push(i),
            }
        }
        let mut infeasible = self.infeasible;
        let mut derived: Vec<Row> = Vec::new();
        let mut emit = |mut row: Row, derived: &mut Vec<Row>| {
            if row.normalize() {
                derived.push(row);
            } else if row.rhs < -RHS_TOL {
                infeasible = true;
            }
        };
        if let Some((eu, ed)) = self.equality_pair(j) {
            for &u in ups.iter().filter(|&&u| u != eu) {
                emit(
                    Self::combine(&self.rows[u], &self.rows[ed], j)?,
                    &mut derived,
                );
            }
            for &d in downs.iter().filter(|&&d| d != ed) {
                emit(
                    Self::combine(&self.rows[eu], &self.rows[d], j)?,
                    &mut derived,
                );
            }
        } else {
            for &u in &ups {
                for &d in &downs {
                    emit(
                        Self::combine(&self.rows[u], &self.rows[d], j)?,
                        &mut derived,
                    );
                }
            }
        }
        // Chernikov: a derived row built on a strict superset of another
        // row's origins is implied.
        let mut rows = keep;
        let candidates = derived;
        for (i, r) in candidates.iter().enumerate() {
            let dominated = rows.iter().any(|s| s.origins.strict_subset_of(&r.origins))
                || candidates
                    .iter()
                    .enumerate()
                    .any(|(k, s)| k != i && s.origins.strict_subset_of(&r.origins));
            if !dominated {
                rows.push(r.clone());
            }
        }
        for r in rows.iter_mut() {
            r.coeffs.remove(j);
        }
        // Rows that lost their last variable become constant checks.
        let mut out_rows = Vec::with_capacity(rows.len());
        for r in rows {
            if r.coeffs.iter().all(|&c| c == 0) {
                if r.rhs < -RHS_TOL {
                    infeasible = true;
                }
            } else {
                out_rows.push(r);
            }
        }
        let mut vars = self.vars.clone();
        vars.remove(j);
        Ok(LinearSystem {
            vars,
            rows: out_rows,
            infeasible,
            next_origin: self.next_origin,
        })
    }

    /// Eliminates every variable not in `keep`, cheapest first (fewest
    /// created rows, ties by name), cleaning up after each step.
    pub fn project(&self, keep: &[&str]) -> Result<LinearSystem, FmeError> {
        for k in keep {
            if self.var_index(k).is_none() {
                return Err(FmeError::UnknownVariable(k.to_string()));
            }
        }
        let mut sys = self.remove_redundant();
        loop {
            if sys.infeasible {
                break;
            }
            let next = sys
                .vars
                .iter()
                .enumerate()
                .filter(|(_, v)| !keep.contains(&v.as_str()))
                .map(|(j, v)| (sys.elimination_cost(j), v.clone()))
                .min();
            let Some((_, v)) = next else { break };
            sys = sys.eliminate_variable(v.as_str())?.remove_redundant();
        }
        if sys.infeasible {
            let mut vars = sys.vars.clone();
            vars.retain(|v| keep.contains(&v.as_str()));
            sys = LinearSystem {
                vars,
                rows: Vec::new(),
                infeasible: true,
                next_origin: sys.next_origin,
            };
        }
        Ok(sys)
    }

    /// Drops duplicate rows (keeping the tighter right-hand side) and rows
    /// dominated coefficient-wise by another row where every variable that
    /// makes the difference is known to be non-negative.
    pub fn remove_redundant(&self) -> LinearSystem {
        let mut by_coeffs: BTreeMap<Vec<i64>, Row> = BTreeMap::new();
        for r in &self.rows {
            match by_coeffs.get_mut(&r.coeffs) {
                Some(existing) if existing.rhs <= r.rhs => {}
                Some(existing) => *existing = r.clone(),
                None => {
                    by_coeffs.insert(r.coeffs.clone(), r.clone());
                }
            }
        }
        let mut rows: Vec<Row> = by_coeffs.into_values().collect();
        let n = self.vars.len();

        // Rows `-c·x_j ≤ b` with b ≤ 0 witness x_j ≥ 0.
        let witness = |r: &Row| -> Option<usize> {
            let mut nz = r.coeffs.iter().enumerate().filter(|(_, &c)| c != 0);
            let (j, &c) = nz.next()?;
            (nz.next().is_none() && c < 0 && r.rhs <= 0.0).then_some(j)
        };
        let mut nonneg = vec![0usize; n];
        for r in &rows {
            if let Some(j) = witness(r) {
                nonneg[j] += 1;
            }
        }
        let mut alive = vec![true; rows.len()];
        for i in 0..rows.len() {
            let own = witness(&rows[i]);
            let known = |j: usize| nonneg[j] > usize::from(own == Some(j));
            let implied_by = (0..rows.len()).find(|&k| {
                k != i
                    && alive[k]
                    && rows[k].rhs <= rows[i].rhs
                    && rows[k]
                        .coeffs
                        .iter()
                        .zip(&rows[i].coeffs)
                        .enumerate()
                        .all(|(j, (&s, &r))| s == r || (s > r && known(j)))
            });
            if implied_by.is_some() {
                alive[i] = false;
                if let Some(j) = own {
                    nonneg[j] -= 1;
                }
            }
        }
        let mut idx = 0;
        rows.retain(|_| {
            idx += 1;
            alive[idx - 1]
        });
        LinearSystem {
            vars: self.vars.clone(),
            rows,
            infeasible: self.infeasible,
            next_origin: self.next_origin,
        }
    }

    /// Feasible set of a two-variable system as a convex polygon, the first
    /// declared variable on the horizontal axis.
    pub fn polygon_from_system(&self) -> Result<PolygonOutcome, FmeError> {
        if self.vars.len() != 2 {
            return Err(FmeError::NotTwoDimensional(self.vars.len()));
        }
        if self.infeasible {
            return Ok(PolygonOutcome::Empty);
        }
        let mut lines: Vec<([f64; 2], f64, bool)> = self
            .rows
            .iter()
            .map(|r| ([r.coeffs[0] as f64, r.coeffs[1] as f64], r.rhs, false))
            .collect();
        // A far box distinguishes unbounded regions from empty ones.
        const BOX: f64 = 1e9;
        lines.extend([
            ([1.0, 0.0], BOX, true),
            ([-1.0, 0.0], BOX, true),
            ([0.0, 1.0], BOX, true),
            ([0.0, -1.0], BOX, true),
        ]);
        let feasible = |p: [f64; 2]| {
            lines.iter().all(|(a, b, _)| {
                let lhs = a[0] * p[0] + a[1] * p[1];
                let scale = 1.0 + b.abs() + (a[0] * p[0]).abs() + (a[1] * p[1]).abs();
                lhs <= b + RHS_TOL * scale
            })
        };
        let mut verts: Vec<RatePair> = Vec::new();
        let mut touches_box = false;
        for i in 0..lines.len() {
            for k in i + 1..lines.len() {
                let (a, b, box_a) = lines[i];
                let (c, d, box_c) = lines[k];
                let det = a[0] * c[1] - a[1] * c[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let p = [(b * c[1] - a[1] * d) / det, (a[0] * d - b * c[0]) / det];
                if !feasible(p) {
                    continue;
                }
                if box_a || box_c {
                    touches_box = true;
                } else {
                    verts.push(RatePair::new(p[0], p[1]));
                }
            }
        }
        if touches_box {
            return Err(FmeError::Unbounded);
        }
        if verts.is_empty() {
            return Ok(PolygonOutcome::Empty);
        }
        Ok(PolygonOutcome::Polygon(convex_hull(&verts)))
    }

    /// Inequality description of a non-degenerate polygon whose edge normals
    /// are small rational directions.
    pub fn from_polygon(poly: &Polygon2D, names: [&str; 2]) -> Result<LinearSystem, FmeError> {
        let mut sys = LinearSystem::new(names)?;
        for (n, c) in poly.half_planes() {
            let (p, q) = rational_direction(n).ok_or(FmeError::Irrational)?;
            let scale = if p != 0 {
                p as f64 / n[0]
            } else {
                q as f64 / n[1]
            };
            sys.add_le(&[(names[0], p), (names[1], q)], c * scale)?;
        }
        Ok(sys)
    }
}

/// Integer vector parallel to `n` with entries up to 1000 in magnitude.
fn rational_direction(n: [f64; 2]) -> Option<(i64, i64)> {
    for q in 1..=1000i64 {
        for (i, j) in [(0usize, 1usize), (1, 0)] {
            if n[j].abs() < 1e-12 {
                continue;
            }
            let p = n[i] / n[j].abs() * q as f64;
            let pr = libm::round(p);
            if (p - pr).abs() < 1e-7 * q as f64 && pr.abs() <= 1000.0 {
                let sj = if n[j] > 0.0 { q } else { -q };
                let v = if i == 0 {
                    (pr as i64, sj)
                } else {
                    (sj, pr as i64)
                };
                let g = v.0.gcd(&v.1);
                return Some((v.0 / g, v.1 / g));
            }
        }
    }
    None
}

/// Result of [`LinearSystem::polygon_from_system`].
#[derive(Debug, Clone, PartialEq)]
pub enum PolygonOutcome {
    Polygon(Polygon2D),
    Empty,
}

impl PolygonOutcome {
    pub fn into_polygon(self) -> Option<Polygon2D> {
        match self {
            PolygonOutcome::Polygon(p) => Some(p),
            PolygonOutcome::Empty => None,
        }
    }
}
