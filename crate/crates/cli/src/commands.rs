use std::path::Path;
use std::process::ExitCode;

use anyhow::Result;
use serde_json::json;
use toa_lab::distributions::{
    default_tau_grid, toa_distribution, DistributionSystem, TOADistribution, DEFAULT_GRID_POINTS,
};
use toa_lab::eigenfunctions::{EigenKind, EigenSystem, ToaEigenfunction};
use toa_lab::kernels::{
    barrier_kernel_piece, barrier_kernel_stitched, weyl_integral, weyl_kernel, Provenance, Region, TimeKernel,
};
use toa_lab::ordering::{closed_form_kernel, BuiltinRule, OrderingRule};
use toa_lab::potentials::Potential;
use toa_lab::tunneling::{delta_tau_coordinate, delta_tau_eigen, delta_tau_momentum};
use toa_lab::verify::{run_suite, Suite};
use toa_lab::{Error, Execution};

use crate::config::{ExperimentConfig, Grid};
use crate::output::{num, Artifacts};
use crate::{load, Common, EXIT_ACCEPTANCE};

fn eta_zeta(cfg: &ExperimentConfig, common: &Common) -> Result<Vec<f64>> {
    let g = Grid {
        points: common.grid.unwrap_or(cfg.grids.eta_zeta.points),
        ..cfg.grids.eta_zeta
    };
    Ok(g.values()?)
}

fn build_kernel(cfg: &ExperimentConfig, rule: &OrderingRule, region: Option<Region>) -> Result<TimeKernel> {
    let c = &cfg.physical;
    let base = match (&cfg.potential, region) {
        (Potential::SquareBarrier(b), Some(r)) => barrier_kernel_piece(b, r, c),
        (Potential::SquareBarrier(b), None) => barrier_kernel_stitched(b, c),
        (_, Some(_)) => return Err(Error::WrongVariant.into()),
        (p, None) => weyl_kernel(p, c)?,
    };
    Ok(rule.deform(&base)?)
}

/// Error of one kernel value: quadrature error for the bare Weyl integral,
/// size of the last retained ordering term for deformed kernels.
fn kernel_err(
    cfg: &ExperimentConfig,
    rule: &OrderingRule,
    shorter: Option<&TimeKernel>,
    k: &TimeKernel,
    eta: f64,
    zeta: f64,
) -> Result<f64> {
    let v = k.value(eta, zeta)?;
    Ok(match (k.provenance(), shorter) {
        (Provenance::WeylIntegral, _) => weyl_integral(&cfg.potential, eta, zeta, &cfg.physical)?.err_est,
        (_, Some(s)) if rule.effective_terms() > 0 => (v - s.value(eta, zeta)?).abs(),
        _ => 0.0,
    })
}

fn shorter_rule(rule: &OrderingRule) -> Result<Option<OrderingRule>> {
    let t = rule.effective_terms();
    if t == 0 {
        return Ok(None);
    }
    Ok(Some(OrderingRule::new(rule.name(), rule.alpha().to_vec(), t - 1)?))
}

pub fn kernel(common: &Common, region: Option<Region>) -> Result<ExitCode> {
    let cfg = load(common)?;
    let rule = cfg.ordering.resolve()?;
    let k = build_kernel(&cfg, &rule, region)?;
    let short = shorter_rule(&rule)?
        .map(|r| build_kernel(&cfg, &r, region))
        .transpose()?;
    let grid = eta_zeta(&cfg, common)?;
    let mut rows = Vec::with_capacity(grid.len() * grid.len());
    let mut max_err: f64 = 0.0;
    for &eta in &grid {
        for &zeta in &grid {
            let v = k.value(eta, zeta)?;
            let e = kernel_err(&cfg, &rule, short.as_ref(), &k, eta, zeta)?;
            max_err = max_err.max(e);
            rows.push(vec![num(eta), num(zeta), num(v), num(e)]);
        }
    }
    let art = Artifacts::new(&common.out, Some(&cfg))?;
    let csv = art.csv("kernel.csv", &["eta", "zeta", "value", "err_est"], &rows)?;
    art.json(
        "kernel_summary.json",
        &json!({
            "rule": rule.name(),
            "provenance": k.provenance().as_str(),
            "region": region.map(|r| r.to_string()),
            "points": rows.len(),
            "max_err_est": max_err,
        }),
    )?;
    println!("wrote {} ({} points)", csv.display(), rows.len());
    Ok(ExitCode::SUCCESS)
}

pub fn deform(common: &Common) -> Result<ExitCode> {
    let cfg = load(common)?;
    let rule = cfg.ordering.resolve()?;
    let c = &cfg.physical;
    let base = weyl_kernel(&cfg.potential, c)?;
    let k = rule.deform(&base)?;
    let short = shorter_rule(&rule)?.map(|r| r.deform(&base)).transpose()?;
    let builtin: Option<BuiltinRule> = rule.name().parse().ok();
    let oracle = builtin.filter(|_| {
        matches!(
            cfg.potential,
            Potential::Free | Potential::Linear { .. } | Potential::Harmonic { .. }
        )
    });
    let grid = eta_zeta(&cfg, common)?;
    let mut rows = Vec::new();
    let mut worst: Option<f64> = None;
    for &eta in &grid {
        for &zeta in &grid {
            let v = k.value(eta, zeta)?;
            let e = kernel_err(&cfg, &rule, short.as_ref(), &k, eta, zeta)?;
            let (exact, rel) = match oracle {
                Some(b) => {
                    let x = closed_form_kernel(b, &cfg.potential, eta, zeta, c)?;
                    let r = if x == 0.0 {
                        (v - x).abs()
                    } else {
                        (v - x).abs() / x.abs()
                    };
                    worst = Some(worst.unwrap_or(0.0).max(r));
                    (num(x), num(r))
                }
                None => (String::new(), String::new()),
            };
            rows.push(vec![num(eta), num(zeta), num(v), num(e), exact, rel]);
        }
    }
    let art = Artifacts::new(&common.out, Some(&cfg))?;
    let csv = art.csv(
        "deform.csv",
        &["eta", "zeta", "deformed", "err_est", "closed_form", "rel_error"],
        &rows,
    )?;
    art.json(
        "deform_summary.json",
        &json!({
            "rule": rule.name(),
            "terms": rule.effective_terms(),
            "oracle": oracle.map(|b| b.name()),
            "max_rel_error": worst,
        }),
    )?;
    match worst {
        Some(w) => println!("wrote {}; max relative error vs closed form {w:.3e}", csv.display()),
        None => println!("wrote {}; no closed form for this rule and potential", csv.display()),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn tunnel_time(common: &Common) -> Result<ExitCode> {
    let cfg = load(common)?;
    let c = &cfg.physical;
    let b = cfg.potential.as_barrier()?;
    let pkt = cfg.packet()?;
    let kappa = b.kappa(c);
    let support = pkt.support_classification(kappa, 5.0)?;
    let warning = pkt.leakage_warning(b);
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let reports = [
        delta_tau_coordinate(&pkt, b, c)?,
        delta_tau_momentum(&pkt, b, c)?,
        delta_tau_eigen(&pkt, b, c)?,
    ];
    let mut spread: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            spread = spread.max((reports[i].delta_tau - reports[j].delta_tau).abs());
        }
    }
    let m = &reports[1];
    let art = Artifacts::new(&common.out, Some(&cfg))?;
    let path = art.json(
        "tunnel_time.json",
        &json!({
            "support": support,
            "kappa": kappa,
            "leakage": pkt.leakage(b),
            "warning": warning,
            "delta_tau": m.delta_tau,
            "err_est": m.err_est,
            "Q": m.q,
            "R": m.r,
            "tau_trav": m.tau_trav,
            "routes": reports,
            "route_spread": spread,
        }),
    )?;
    println!(
        "delta_tau {:.10e} (err {:.1e}), tau_trav {}, route spread {spread:.2e}; wrote {}",
        m.delta_tau,
        m.err_est,
        m.tau_trav.map_or("n/a".into(), |t| format!("{t:.3e}")),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn kind_name(k: EigenKind) -> &'static str {
    match k {
        EigenKind::NonNodal => "non_nodal",
        EigenKind::Nodal => "nodal",
    }
}

pub fn eigen(common: &Common) -> Result<ExitCode> {
    let cfg = load(common)?;
    let c = &cfg.physical;
    let system = match &cfg.potential {
        Potential::Free => EigenSystem::Free,
        Potential::SquareBarrier(b) => EigenSystem::Barrier(*b),
        _ => {
            return Err(
                Error::Unsupported("eigenfunctions exist for the free particle and the square barrier".into()).into(),
            )
        }
    };
    let ps = cfg.grids.p.values()?;
    let qs = eta_zeta(&cfg, common)?;
    let mut mom = Vec::new();
    let mut pos = Vec::new();
    for &tau in &cfg.eigen_taus {
        for kind in [EigenKind::NonNodal, EigenKind::Nodal] {
            let e = ToaEigenfunction::new(kind, system, tau);
            for &p in &ps {
                let v = e.evaluate(p, c);
                mom.push(vec![
                    num(tau),
                    kind_name(kind).into(),
                    num(p),
                    num(v.re),
                    num(v.im),
                    num(v.norm_sqr()),
                    num(0.0),
                ]);
            }
            let dens = toa_lab::par::map(Execution::default(), &qs, |&q| e.position_density(q, cfg.epsilon, c));
            for (q, d) in qs.iter().zip(dens) {
                let d = d?;
                pos.push(vec![
                    num(tau),
                    kind_name(kind).into(),
                    num(*q),
                    num(d.value),
                    num(d.err_est),
                ]);
            }
        }
    }
    let art = Artifacts::new(&common.out, Some(&cfg))?;
    art.csv(
        "eigen_momentum.csv",
        &["tau", "kind", "p", "re", "im", "modulus_sq", "err_est"],
        &mom,
    )?;
    let p = art.csv("eigen_position.csv", &["tau", "kind", "q", "density", "err_est"], &pos)?;
    println!("wrote {} and eigen_momentum.csv", p.display());
    Ok(ExitCode::SUCCESS)
}

fn peak_or_null(d: &TOADistribution) -> serde_json::Value {
    d.peak().map_or(serde_json::Value::Null, |p| json!(p))
}

fn mean_or_null(d: &TOADistribution) -> serde_json::Value {
    d.mean_arrival().map_or(serde_json::Value::Null, |p| json!(p))
}

pub fn distribution(common: &Common) -> Result<ExitCode> {
    let cfg = load(common)?;
    let c = &cfg.physical;
    let b = *cfg.potential.as_barrier()?;
    let pkt = cfg.packet()?;
    if let Some(w) = pkt.leakage_warning(&b) {
        eprintln!("warning: {w}");
    }
    let grid = match (&cfg.grids.tau, common.grid) {
        (Some(g), n) => Grid {
            points: n.unwrap_or(g.points),
            ..*g
        }
        .values()?,
        (None, n) => default_tau_grid(&pkt, n.unwrap_or(DEFAULT_GRID_POINTS), c)?,
    };
    let exec = Execution::default();
    let run = |s| toa_distribution(&pkt, s, EigenKind::NonNodal, &grid, c, exec);
    let free = run(DistributionSystem::Free)?;
    let bar = run(DistributionSystem::Barrier(b))?;
    let short = run(DistributionSystem::FreeShortened(b))?;
    let dists = [&free, &bar, &short];
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            let mut r = vec![num(grid[i])];
            for d in dists {
                r.push(num(d.values[i]));
                r.push(num(d.err_est[i]));
            }
            r
        })
        .collect();
    let art = Artifacts::new(&common.out, Some(&cfg))?;
    let csv = art.csv(
        "distribution.csv",
        &[
            "tau",
            "free",
            "free_err",
            "barrier",
            "barrier_err",
            "shortened",
            "shortened_err",
        ],
        &rows,
    )?;
    let shift = |d: &TOADistribution| match (free.peak(), d.peak()) {
        (Ok(a), Ok(b)) => json!(b - a),
        _ => serde_json::Value::Null,
    };
    let dt = delta_tau_momentum(&pkt, &b, c)?;
    let mean_diff = match (free.mean_arrival(), bar.mean_arrival()) {
        (Ok(a), Ok(b)) => json!(a - b),
        _ => serde_json::Value::Null,
    };
    let summary = json!({
        "peak": {"free": peak_or_null(&free), "barrier": peak_or_null(&bar), "shortened": peak_or_null(&short)},
        "mean_arrival": {"free": mean_or_null(&free), "barrier": mean_or_null(&bar), "shortened": mean_or_null(&short)},
        "norm_captured": {"free": free.norm_captured, "barrier": bar.norm_captured, "shortened": short.norm_captured},
        "failures": {"free": free.failures, "barrier": bar.failures, "shortened": short.failures},
        "peak_shift": shift(&bar),
        "peak_shift_shortened": shift(&short),
        "opaque_limit_shift": -b.length() / (c.hbar * pkt.k0 / c.mu),
        "mean_difference": mean_diff,
        "delta_tau_momentum": dt.delta_tau,
        "delta_tau_err_est": dt.err_est,
    });
    let path = art.json("distribution_summary.json", &summary)?;
    println!(
        "peak shift {}, mean difference {}, delta_tau {:.6e}; wrote {} and {}",
        summary["peak_shift"],
        summary["mean_difference"],
        dt.delta_tau,
        csv.display(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn verify(suite: &str, out: &Path) -> Result<ExitCode> {
    let suite: Suite = suite.parse()?;
    let results = run_suite(suite, Execution::default());
    for r in &results {
        println!("{r}");
    }
    let art = Artifacts::new(out, None)?;
    art.json("verify.json", &results)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ACCEPTANCE)
    })
}
