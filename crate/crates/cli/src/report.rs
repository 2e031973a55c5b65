//! Run summary and its plain-text rendering.

use std::fmt::Write as _;

use icc_core::geom::{slope_violations, Polygon2D, Region2D, HK_SLOPES};

use crate::output::fmt_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub tol: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedRegion {
    /// Also the CSV file stem.
    pub name: String,
    pub region: Region2D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterceptLine {
    pub region: String,
    pub max_r1: f64,
    pub max_r2: f64,
    pub grid_max_r1: f64,
    pub grid_max_r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelayLine {
    pub k: f64,
    /// Axis the relay channel bounds (1 or 2).
    pub axis: usize,
    pub bits: f64,
    pub rho: f64,
    pub degraded: bool,
}

/// Facet-slope audit over every per-point polygon of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlopeAudit {
    pub polygons: usize,
    pub violations: usize,
}

pub const SLOPE_TOL: f64 = 1e-6;

impl SlopeAudit {
    pub fn add(&mut self, poly: &Polygon2D) {
        self.polygons += 1;
        if !slope_violations(poly, &HK_SLOPES, SLOPE_TOL).is_empty() {
            self.violations += 1;
        }
    }

    pub fn check(&self) -> Check {
        if self.polygons == 0 {
            return Check {
                name: "slope audit".into(),
                verdict: Verdict::Skipped,
                tol: None,
                detail: "no per-point polygons in this mode".into(),
            };
        }
        Check {
            name: "slope audit".into(),
            verdict: Verdict::from_bool(self.violations == 0),
            tol: Some(SLOPE_TOL),
            detail: format!(
                "{} polygons, {} with violations",
                self.polygons, self.violations
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub mode: String,
    pub channel: String,
    pub sweep: String,
    pub regions: Vec<NamedRegion>,
    pub intercepts: Vec<InterceptLine>,
    pub relay: Vec<RelayLine>,
    pub checks: Vec<Check>,
    pub slope_audit: Check,
    pub seconds: f64,
}

impl RunReport {
    pub fn region(&self, name: &str) -> Option<&Region2D> {
        self.regions
            .iter()
            .find(|r| r.name == name)
            .map(|r| &r.region)
    }

    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().chain(std::iter::once(&self.slope_audit))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode: {}", self.mode);
        let _ = writeln!(s, "channel: {}", self.channel);
        let _ = writeln!(s, "sweep: {}", self.sweep);
        for r in &self.regions {
            let _ = writeln!(
                s,
                "\nregion {} ({} vertices, bits)",
                r.name,
                r.region.vertices().len()
            );
            for v in r.region.vertices() {
                let _ = writeln!(s, "  {} {}", fmt_bits(v.r1), fmt_bits(v.r2));
            }
        }
        if !self.intercepts.is_empty() {
            let _ = writeln!(s, "\nintercepts (polished; grid value in brackets)");
            for i in &self.intercepts {
                let _ = writeln!(
                    s,
                    "  {}: R1 {} [{}]  R2 {} [{}]",
                    i.region,
                    fmt_bits(i.max_r1),
                    fmt_bits(i.grid_max_r1),
                    fmt_bits(i.max_r2),
                    fmt_bits(i.grid_max_r2)
                );
            }
        }
        if !self.relay.is_empty() {
            let _ = writeln!(s, "\nrelay capacity");
            for r in &self.relay {
                let _ = writeln!(
                    s,
                    "  K={} user {} relays for user {} (R{} axis): {} bits at rho {}{}",
                    r.k,
                    3 - r.axis,
                    r.axis,
                    r.axis,
                    fmt_bits(r.bits),
                    fmt_bits(r.rho),
                    if r.degraded {
                        ""
                    } else {
                        " (degradedness not established)"
                    }
                );
            }
        }
        let _ = writeln!(s, "\nchecks");
        for c in self.all_checks() {
            let tol = c.tol.map(|t| format!(" tol {t:e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "  [{}] {}{}: {}",
                c.verdict.label(),
                c.name,
                tol,
                c.detail
            );
        }
        let _ = writeln!(s, "\nwall clock: {:.3} s", self.seconds);
        s
    }
}
