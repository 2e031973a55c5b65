//! Fourier-Motzkin elimination with symbolic right-hand sides.
//!
//! Each right-hand side is a rational combination `Σ w_i·p_i` of parameters
//! whose values are only known later. Elimination and Chernikov pruning do
//! not look at right-hand side values, so a projection computed once can be
//! instantiated for many parameter vectors at the cost of a few dot
//! products. Redundancy pruning only uses comparisons that hold for every
//! parameter vector consistent with the declared signs.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::fme::{FmeError, LinearSystem, Origins, RateVar, Rational, RHS_TOL};

/// What is known about a parameter's sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSign {
    NonNegative,
    NonPositive,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    coeffs: Vec<i64>,
    rhs: Vec<Rational>,
    origins: Origins,
}

impl Row {
    fn normalize(&mut self) -> bool {
        let g = self.coeffs.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return false;
        }
        if g != 1 {
            self.coeffs.iter_mut().for_each(|c| *c /= g);
            let g = Rational::from_integer(g);
            self.rhs.iter_mut().for_each(|w| *w /= g);
        }
        true
    }
}

/// Linear system `A·x ≤ W·p` with integer `A` and rational `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSystem {
    vars: Vec<RateVar>,
    params: Vec<ParamSign>,
    rows: Vec<Row>,
    /// Right-hand sides of rows whose variables were all eliminated; each
    /// must be non-negative for the system to be feasible.
    checks: Vec<Vec<Rational>>,
    next_origin: usize,
}

impl ParametricSystem {
    pub fn new<S: AsRef<str>>(
        vars: impl IntoIterator<Item = S>,
        params: Vec<ParamSign>,
    ) -> Result<Self, FmeError> {
        let mut out: Vec<RateVar> = Vec::new();
        for v in vars {
            let v = RateVar::new(v.as_ref());
            if out.contains(&v) {
                return Err(FmeError::DuplicateVariable(v.as_str().to_string()));
            }
            out.push(v);
        }
        Ok(ParametricSystem {
            vars: out,
            params,
            rows: Vec::new(),
            checks: Vec::new(),
            next_origin: 0,
        })
    }

    pub fn vars(&self) -> &[RateVar] {
        &self.vars
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.as_str() == name)
    }

    /// Adds `Σ c·v ≤ Σ w·p`.
    pub fn add_le(&mut self, terms: &[(&str, i64)], rhs: &[(usize, i64)]) -> Result<(), FmeError> {
        let mut coeffs = vec![0i64; self.vars.len()];
        for (name, c) in terms {
            let i = self
                .var_index(name)
                .ok_or_else(|| FmeError::UnknownVariable(name.to_string()))?;
            coeffs[i] += c;
        }
        let mut w = vec![Rational::from_integer(0); self.params.len()];
        for &(p, c) in rhs {
            w[p] += Rational::from_integer(c);
        }
        let mut row = Row {
            coeffs,
            rhs: w,
            origins: Origins::single(self.next_origin),
        };
        self.next_origin += 1;
        if row.normalize() {
            self.rows.push(row);
            Ok(())
        } else {
            Err(FmeError::ZeroRow)
        }
    }

    pub fn add_ge(&mut self, terms: &[(&str, i64)], rhs: &[(usize, i64)]) -> Result<(), FmeError> {
        let t: Vec<(&str, i64)> = terms.iter().map(|&(n, c)| (n, -c)).collect();
        let r: Vec<(usize, i64)> = rhs.iter().map(|&(p, c)| (p, -c)).collect();
        self.add_le(&t, &r)
    }

    pub fn add_eq(&mut self, terms: &[(&str, i64)], rhs: &[(usize, i64)]) -> Result<(), FmeError> {
        self.add_le(terms, rhs)?;
        self.add_ge(terms, rhs)
    }

    /// `a ≤ b` for every admissible parameter vector.
    fn provably_le(&self, a: &[Rational], b: &[Rational]) -> bool {
        a.iter().zip(b).zip(&self.params).all(|((x, y), s)| {
            let d = *y - *x;
            d == Rational::from_integer(0)
                || match s {
                    ParamSign::NonNegative => d > Rational::from_integer(0),
                    ParamSign::NonPositive => d < Rational::from_integer(0),
                    ParamSign::Free => false,
                }
        })
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

    fn equality_pair(&self, j: usize) -> Option<(usize, usize)> {
        for (a, ra) in self.rows.iter().enumerate() {
            if ra.coeffs[j] <= 0 {
                continue;
            }
            for (b, rb) in self.rows.iter().enumerate() {
                if rb.coeffs[j] < 0
                    && ra.coeffs.iter().zip(&rb.coeffs).all(|(x, y)| *x == -*y)
                    && ra.rhs.iter().zip(&rb.rhs).all(|(x, y)| *x == -*y)
                {
                    return Some((a, b));
                }
            }
        }
        None
    }

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
        let (ra, rb) = (Rational::from_integer(a), Rational::from_integer(b));
        Ok(Row {
            coeffs,
            rhs: up
                .rhs
                .iter()
                .zip(&down.rhs)
                .map(|(u, d)| rb * u + ra * d)
                .collect(),
            origins: up.origins.union(&down.origins),
        })
    }

    pub fn eliminate_variable(&self, v: &str) -> Result<ParametricSystem, FmeError> {
        let j = self
            .var_index(v)
            .ok_or_else(|| FmeError::UnknownVariable(v.to_string()))?;
        let mut keep = Vec::new();
        let mut ups = Vec::new();
        let mut downs = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            match r.coeffs[j].signum() {
                0 => keep.push(r.clone()),
                1 => ups.push(i),
                _ => downs.push(i),
            }
        }
        let mut pairs = Vec::new();
        if let Some((eu, ed)) = self.equality_pair(j) {
            pairs.extend(ups.iter().filter(|&&u| u != eu).map(|&u| (u, ed)));
            pairs.extend(downs.iter().filter(|&&d| d != ed).map(|&d| (eu, d)));
        } else {
            for &u in &ups {
                pairs.extend(downs.iter().map(|&d| (u, d)));
            }
        }
        let mut checks = self.checks.clone();
        let mut derived = Vec::new();
        for (u, d) in pairs {
            let mut row = Self::combine(&self.rows[u], &self.rows[d], j)?;
            if row.normalize() {
                derived.push(row);
            } else {
                checks.push(row.rhs);
            }
        }
        let mut rows = keep;
        for (i, r) in derived.iter().enumerate() {
            let dominated = rows
                .iter()
                .any(|s: &Row| s.origins.strict_subset_of(&r.origins))
                || derived
                    .iter()
                    .enumerate()
                    .any(|(k, s)| k != i && s.origins.strict_subset_of(&r.origins));
            if !dominated {
                rows.push(r.clone());
            }
        }
        let mut out_rows = Vec::with_capacity(rows.len());
        for mut r in rows {
            r.coeffs.remove(j);
            if r.coeffs.iter().all(|&c| c == 0) {
                checks.push(r.rhs);
            } else {
                out_rows.push(r);
            }
        }
        let mut vars = self.vars.clone();
        vars.remove(j);
        let mut out = ParametricSystem {
            vars,
            params: self.params.clone(),
            rows: out_rows,
            checks,
            next_origin: self.next_origin,
        };
        out.prune_checks();
        Ok(out)
    }

    fn prune_checks(&mut self) {
        let zero = vec![Rational::from_integer(0); self.params.len()];
        let mut kept: Vec<Vec<Rational>> = Vec::new();
        for c in core::mem::take(&mut self.checks) {
            if self.provably_le(&zero, &c) || kept.contains(&c) {
                continue;
            }
            kept.push(c);
        }
        self.checks = kept;
    }

    /// Same pruning as [`LinearSystem::remove_redundant`], with right-hand
    /// side comparisons that must hold for all admissible parameters.
    pub fn remove_redundant(&self) -> ParametricSystem {
        let mut by_coeffs: BTreeMap<Vec<i64>, Vec<Row>> = BTreeMap::new();
        for r in &self.rows {
            let group = by_coeffs.entry(r.coeffs.clone()).or_default();
            if group.iter().any(|g| self.provably_le(&g.rhs, &r.rhs)) {
                continue;
            }
            group.retain(|g| !self.provably_le(&r.rhs, &g.rhs));
            group.push(r.clone());
        }
        let mut rows: Vec<Row> = by_coeffs.into_values().flatten().collect();
        let zero = vec![Rational::from_integer(0); self.params.len()];
        let witness = |r: &Row| -> Option<usize> {
            let mut nz = r.coeffs.iter().enumerate().filter(|(_, &c)| c != 0);
            let (j, &c) = nz.next()?;
            (nz.next().is_none() && c < 0 && self.provably_le(&r.rhs, &zero)).then_some(j)
        };
        let mut nonneg = vec![0usize; self.vars.len()];
        for r in &rows {
            if let Some(j) = witness(r) {
                nonneg[j] += 1;
            }
        }
        let mut alive = vec![true; rows.len()];
        for i in 0..rows.len() {
            let own = witness(&rows[i]);
            let known = |j: usize| nonneg[j] > usize::from(own == Some(j));
            let implied = (0..rows.len()).any(|k| {
                k != i
                    && alive[k]
                    && self.provably_le(&rows[k].rhs, &rows[i].rhs)
                    && rows[k]
                        .coeffs
                        .iter()
                        .zip(&rows[i].coeffs)
                        .enumerate()
                        .all(|(j, (&s, &r))| s == r || (s > r && known(j)))
            });
            if implied {
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
        ParametricSystem {
            vars: self.vars.clone(),
            params: self.params.clone(),
            rows,
            checks: self.checks.clone(),
            next_origin: self.next_origin,
        }
    }

    /// Eliminates every variable not in `keep` in the same order rule as
    /// [`LinearSystem::project`].
    pub fn project(&self, keep: &[&str]) -> Result<ParametricSystem, FmeError> {
        for k in keep {
            if self.var_index(k).is_none() {
                return Err(FmeError::UnknownVariable(k.to_string()));
            }
        }
        let mut sys = self.remove_redundant();
        loop {
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
        Ok(sys)
    }

    /// Compiles the rows for repeated instantiation. Rows sharing a
    /// coefficient vector are grouped; each instance keeps the tightest.
    pub fn compile(&self) -> CompiledSystem {
        let sparse = |w: &[Rational]| -> Vec<(usize, f64)> {
            w.iter()
                .enumerate()
                .filter(|(_, x)| **x != Rational::from_integer(0))
                .map(|(i, x)| (i, *x.numer() as f64 / *x.denom() as f64))
                .collect()
        };
        let mut groups: BTreeMap<Vec<i64>, Vec<Vec<(usize, f64)>>> = BTreeMap::new();
        for r in &self.rows {
            groups
                .entry(r.coeffs.clone())
                .or_default()
                .push(sparse(&r.rhs));
        }
        let (coeffs, weights) = groups.into_iter().unzip();
        CompiledSystem {
            vars: self.vars.clone(),
            params: self.params.len(),
            coeffs,
            weights,
            checks: self.checks.iter().map(|c| sparse(c)).collect(),
        }
    }

    pub fn instantiate(&self, values: &[f64]) -> LinearSystem {
        self.compile().instantiate(values)
    }
}

/// A projected [`ParametricSystem`] ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledSystem {
    vars: Vec<RateVar>,
    params: usize,
    coeffs: Vec<Vec<i64>>,
    /// Sparse right-hand sides of every row with the matching coefficients.
    weights: Vec<Vec<Vec<(usize, f64)>>>,
    checks: Vec<Vec<(usize, f64)>>,
}

impl CompiledSystem {
    pub fn vars(&self) -> &[RateVar] {
        &self.vars
    }

    /// Number of distinct coefficient vectors.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Numeric system for parameter values `values`. Infinite values make
    /// the rows that use them vacuous (`+∞`) or infeasible (`-∞`).
    pub fn instantiate(&self, values: &[f64]) -> LinearSystem {
        assert_eq!(values.len(), self.params, "parameter count");
        let eval = |w: &[(usize, f64)]| -> f64 { w.iter().map(|&(i, c)| c * values[i]).sum() };
        let mut infeasible = self.checks.iter().any(|c| {
            let v = eval(c);
            v.is_nan() || v < -RHS_TOL
        });
        let mut rows = Vec::with_capacity(self.coeffs.len());
        for (a, group) in self.coeffs.iter().zip(&self.weights) {
            let mut best = f64::INFINITY;
            for w in group {
                let v = eval(w);
                if v.is_nan() {
                    infeasible = true;
                } else if v < best {
                    best = v;
                }
            }
            if best == f64::NEG_INFINITY {
                infeasible = true;
            } else if best < f64::INFINITY {
                rows.push((a.clone(), best));
            }
        }
        LinearSystem::from_primitive_rows(self.vars.clone(), rows, infeasible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_matches_numeric_projection() {
        // x - y ≤ -p0, y ≤ p1, x ≥ 0, y ≥ 0; project onto x.
        let mut s = ParametricSystem::new(["x", "y"], vec![ParamSign::NonNegative; 2]).unwrap();
        s.add_le(&[("x", 1), ("y", -1)], &[(0, -1)]).unwrap();
        s.add_le(&[("y", 1)], &[(1, 1)]).unwrap();
        s.add_ge(&[("x", 1)], &[]).unwrap();
        s.add_ge(&[("y", 1)], &[]).unwrap();
        let p = s.project(&["x"]).unwrap().compile();
        let sys = p.instantiate(&[0.25, 1.0]);
        assert!(sys.contains_point(&[0.75], 1e-12));
        assert!(!sys.contains_point(&[0.8], 1e-12));
        assert!(!sys.contains_point(&[-0.1], 1e-12));
        // p0 > p1 leaves nothing; eliminating x exposes it.
        let none = p.instantiate(&[2.0, 1.0]);
        assert!(!none.contains_point(&[0.0], 1e-12));
        assert!(none.eliminate_variable("x").unwrap().is_infeasible());
    }

    #[test]
    fn equality_substitution() {
        let mut s =
            ParametricSystem::new(["t", "a", "b"], vec![ParamSign::NonNegative; 2]).unwrap();
        s.add_eq(&[("t", 1), ("a", -1), ("b", -1)], &[]).unwrap();
        s.add_le(&[("a", 1)], &[(0, 1)]).unwrap();
        s.add_le(&[("b", 1)], &[(1, 1)]).unwrap();
        s.add_ge(&[("a", 1)], &[]).unwrap();
        s.add_ge(&[("b", 1)], &[]).unwrap();
        let p = s.project(&["t"]).unwrap();
        assert_eq!(p.len(), 2);
        let sys = p.instantiate(&[1.0, 2.0]);
        assert!(sys.contains_point(&[3.0], 1e-12));
        assert!(!sys.contains_point(&[3.01], 1e-12));
    }

    #[test]
    fn duplicate_rows_keep_both_when_incomparable() {
        let mut s =
            ParametricSystem::new(["x"], vec![ParamSign::Free, ParamSign::NonNegative]).unwrap();
        s.add_le(&[("x", 1)], &[(0, 1)]).unwrap();
        s.add_le(&[("x", 1)], &[(1, 1)]).unwrap();
        s.add_le(&[("x", 1)], &[(1, 2)]).unwrap();
        assert_eq!(s.remove_redundant().len(), 2);
    }
}
