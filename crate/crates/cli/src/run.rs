//! Executes one run configuration.

use std::time::Instant;

use icc_core::baselines::{gvbc_region, hk_region, relay_capacity, RelayMode};
use icc_core::geom::{excess, Region2D};
use icc_core::icc::{ideal_conferencing_region_with, polished_intercepts_with, ChannelParams};

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_bits, render_svg, write_csv, write_text};
use crate::report::{Check, InterceptLine, NamedRegion, RelayLine, RunReport, SlopeAudit, Verdict};

pub const CONTAINMENT_TOL: f64 = 1e-6;
/// Margin by which conferencing must beat HK somewhere.
pub const STRICT_GAIN: f64 = 1e-3;
pub const INTERCEPT_TOL: f64 = 1e-2;

pub const REPORT_FILE: &str = "report.txt";

fn region_name(k: f64) -> String {
    format!("region_K{k}")
}

fn relay_lines(params: &ChannelParams) -> Result<Vec<RelayLine>, CliError> {
    [(1, RelayMode::User2Relays), (2, RelayMode::User1Relays)]
        .into_iter()
        .map(|(axis, mode)| {
            let c = relay_capacity(params, mode)?;
            Ok(RelayLine {
                k: params.k,
                axis,
                bits: c.bits,
                rho: c.rho,
                degraded: c.degraded,
            })
        })
        .collect()
}

fn containment(outer: &NamedRegion, inner: &NamedRegion) -> Check {
    let e = excess(&outer.region, &inner.region);
    Check {
        name: format!("{} inside {}", inner.name, outer.name),
        verdict: Verdict::from_bool(e <= CONTAINMENT_TOL),
        tol: Some(CONTAINMENT_TOL),
        detail: format!("largest excess {e:.3e} bits"),
    }
}

/// Region sweep at gain `k` with polished intercepts; every per-point
/// polygon goes through the slope audit.
fn sweep(
    cfg: &RunConfig,
    k: f64,
    audit: &mut SlopeAudit,
) -> Result<(NamedRegion, InterceptLine), CliError> {
    let params = cfg.channel_with(k)?;
    let (region, i) = polished_intercepts_with(&params, &cfg.sweep_config(), |_, p| audit.add(p))?;
    let name = region_name(k);
    Ok((
        NamedRegion {
            name: name.clone(),
            region,
        },
        InterceptLine {
            region: name,
            max_r1: i.max_r1,
            max_r2: i.max_r2,
            grid_max_r1: i.grid_max_r1,
            grid_max_r2: i.grid_max_r2,
        },
    ))
}

/// Runs `cfg` and writes its CSV, SVG and report files.
pub fn execute(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let out = cfg.output_dir()?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;

    let mut regions = Vec::new();
    let mut intercepts = Vec::new();
    let mut relay = Vec::new();
    let mut checks = Vec::new();
    let mut audit = SlopeAudit::default();
    let res = cfg.sweep.resolution;
    let base = cfg.channel_with(cfg.k())?;
    let sweep_desc = match cfg.mode {
        Mode::Hk | Mode::Gvbc => format!("resolution={res}"),
        Mode::Relay => "none".to_string(),
        _ => format!(
            "resolution={res} lambda_grid={:?} sides={:?} polarity={:?}",
            cfg.sweep.lambda_grid, cfg.sweep.sides, cfg.sweep.polarity
        )
        .to_lowercase(),
    };

    match cfg.mode {
        Mode::Region => {
            let (r, i) = sweep(cfg, cfg.k(), &mut audit)?;
            regions.push(r);
            intercepts.push(i);
        }
        Mode::Hk => regions.push(NamedRegion {
            name: "hk".into(),
            region: hk_region(&base, res)?,
        }),
        Mode::Gvbc => regions.push(NamedRegion {
            name: "gvbc".into(),
            region: gvbc_region(&base, res)?,
        }),
        Mode::Ideal => {
            let (region, _) =
                ideal_conferencing_region_with(&base, &cfg.sweep_config(), |_, p| audit.add(p))?;
            regions.push(NamedRegion {
                name: "ideal".into(),
                region,
            });
        }
        Mode::Relay => relay = relay_lines(&base)?,
        Mode::Compare => {
            let mut ks = cfg.k_values.clone().unwrap_or_default();
            ks.sort_by(f64::total_cmp);
            ks.dedup();
            let hk = NamedRegion {
                name: "hk".into(),
                region: hk_region(&base, cfg.baseline_resolution)?,
            };
            let mut swept = Vec::new();
            for &k in &ks {
                let (r, i) = sweep(cfg, k, &mut audit)?;
                relay.extend(relay_lines(&cfg.channel_with(k)?)?);
                swept.push(r);
                intercepts.push(i);
            }
            let gvbc = NamedRegion {
                name: "gvbc".into(),
                region: gvbc_region(&base, cfg.baseline_resolution)?,
            };
            let chain: Vec<&NamedRegion> = std::iter::once(&hk)
                .chain(&swept)
                .chain(std::iter::once(&gvbc))
                .collect();
            for w in chain.windows(2) {
                checks.push(containment(w[1], w[0]));
            }
            for (r, &k) in swept.iter().zip(&ks) {
                if k > 0.0 {
                    let gain = excess(&hk.region, &r.region);
                    checks.push(Check {
                        name: format!("{} beyond hk", r.name),
                        verdict: Verdict::from_bool(gain > STRICT_GAIN),
                        tol: Some(STRICT_GAIN),
                        detail: format!("farthest vertex outside hk by {gain:.3e} bits"),
                    });
                }
            }
            // The intercept claim concerns the strongest conferencing link.
            if let (Some(&k), Some(i)) = (ks.last(), intercepts.last()) {
                for line in relay.iter().filter(|l| l.k == k) {
                    let got = if line.axis == 1 { i.max_r1 } else { i.max_r2 };
                    let diff = (got - line.bits).abs();
                    checks.push(Check {
                        name: format!("{} R{} intercept vs relay capacity", i.region, line.axis),
                        verdict: Verdict::from_bool(diff <= INTERCEPT_TOL),
                        tol: Some(INTERCEPT_TOL),
                        detail: format!("{} vs {} bits", fmt_bits(got), fmt_bits(line.bits)),
                    });
                }
            }
            regions.push(hk);
            regions.extend(swept);
            regions.push(gvbc);
        }
    }

    for r in &regions {
        write_csv(&out.join(format!("{}.csv", r.name)), &r.region)?;
    }
    if cfg.plot && !regions.is_empty() {
        let named: Vec<(String, &Region2D)> = regions
            .iter()
            .map(|r| (r.name.clone(), &r.region))
            .collect();
        write_text(
            &out.join(format!("{}.svg", cfg.mode.name())),
            &render_svg(&named),
        )?;
    }
    let c = &cfg.channel;
    let report = RunReport {
        mode: cfg.mode.name().into(),
        channel: format!(
            "P1={} P2={} a12={} a21={}{}",
            c.p1,
            c.p2,
            c.a12,
            c.a21,
            match (cfg.mode, &cfg.k_values) {
                (Mode::Compare, Some(ks)) => format!(" K={ks:?}"),
                _ => c.k.map(|k| format!(" K={k}")).unwrap_or_default(),
            }
        ),
        sweep: if cfg.mode == Mode::Compare {
            format!(
                "{sweep_desc} baseline_resolution={}",
                cfg.baseline_resolution
            )
        } else {
            sweep_desc
        },
        regions,
        intercepts,
        relay,
        checks,
        slope_audit: audit.check(),
        seconds: start.elapsed().as_secs_f64(),
    };
    write_text(&out.join(REPORT_FILE), &report.render())?;
    Ok(report)
}
