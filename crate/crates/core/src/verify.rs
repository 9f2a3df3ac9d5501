//! Acceptance checks against independent oracles.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::distributions::{default_tau_grid, peak_shift, toa_distribution, DistributionSystem};
use crate::eigenfunctions::{
    apply_barrier_toa_momentum, completeness_defect, EigenKind, EigenSystem, ToaEigenfunction,
};
use crate::error::{Error, Result};
use crate::kernels::{supra_correction_chain, supra_correction_n1, weyl_kernel, Region, TimeKernel};
use crate::numerics::{bessel_i0, bessel_j0, bessel_j0_fourier, hyp0f1, hyp0f1_1};
use crate::ordering::{closed_form_kernel, BuiltinRule, OrderingRule};
use crate::par::Execution;
use crate::potentials::{Potential, SquareBarrier};
use crate::testfns::TestFunction;
use crate::tunneling::{
    delta_tau_coordinate, delta_tau_eigen, delta_tau_momentum, ordering_invariance_check, teccr_defect,
};
use crate::wavepackets::{GaussianPacket, Support};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Numerics,
    Ordering,
    Supra,
    Tunneling,
    Teccr,
    Eigen,
    Distribution,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "numerics",
        "ordering",
        "supra",
        "tunneling",
        "teccr",
        "eigen",
        "distribution",
        "all",
    ];

    pub fn criteria(&self) -> Vec<u8> {
        match self {
            Suite::Ordering => vec![1, 2],
            Suite::Supra => vec![3],
            Suite::Tunneling => vec![4, 5],
            Suite::Teccr => vec![6],
            Suite::Eigen => vec![7],
            Suite::Distribution => vec![8],
            Suite::Numerics => vec![9],
            Suite::All => (1..=9).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "numerics" => Suite::Numerics,
            "ordering" => Suite::Ordering,
            "supra" => Suite::Supra,
            "tunneling" => Suite::Tunneling,
            "teccr" => Suite::Teccr,
            "eigen" => Suite::Eigen,
            "distribution" => Suite::Distribution,
            "all" => Suite::All,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown suite `{s}`, expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

pub const CRITERION_NAMES: [&str; 9] = [
    "ordering oracles",
    "ordering invariance of tunneling",
    "supraquantization",
    "three-route equivalence",
    "instantaneity and high-energy limits",
    "time-energy commutator defect",
    "eigen-structure",
    "arrival-time distributions",
    "numerics foundation",
];

pub fn run_suite(suite: Suite, exec: Execution) -> Vec<CheckResult> {
    suite.criteria().into_iter().map(|c| run_criterion(c, exec)).collect()
}

pub fn run_criterion(n: u8, exec: Execution) -> CheckResult {
    let start = Instant::now();
    let out = match n {
        1 => ordering_oracles(),
        2 => ordering_invariance(),
        3 => supraquantization(),
        4 => route_equivalence(),
        5 => instantaneity(),
        6 => teccr(),
        7 => eigen_structure(exec),
        8 => distributions(exec),
        9 => numerics_foundation(),
        _ => Err(Error::InvalidInput(format!("no criterion {n}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let limit = match n {
        1 => Some(10.0),
        4 => Some(60.0),
        8 => Some(300.0),
        _ => None,
    };
    let (mut passed, mut detail) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit {
        if seconds > l {
            passed = false;
            detail.push_str(&format!("; runtime {seconds:.1} s exceeds {l} s"));
        }
    }
    let name = CRITERION_NAMES
        .get(n.wrapping_sub(1) as usize)
        .copied()
        .unwrap_or("unknown")
        .to_string();
    CheckResult {
        criterion: n,
        name,
        passed,
        detail,
        seconds,
    }
}

fn unit() -> PhysicalConfig {
    PhysicalConfig::default()
}

type Outcome = Result<(bool, String)>;

fn ordering_oracles() -> Outcome {
    let c = unit();
    let mut worst: f64 = 0.0;
    for pot in [Potential::Linear { lambda: 1.0 }, Potential::Harmonic { omega: 1.0 }] {
        let base = weyl_kernel(&pot, &c)?;
        for rule in [BuiltinRule::BornJordan, BuiltinRule::SimpleSymmetric] {
            let k = OrderingRule::builtin(rule).deform(&base)?;
            for i in 0..20 {
                let eta = -2.0 + 4.0 * i as f64 / 19.0;
                for j in 0..20 {
                    let zeta = -2.0 + 4.0 * j as f64 / 19.0;
                    let got = k.value(eta, zeta)?;
                    let want = closed_form_kernel(rule, &pot, eta, zeta, &c)?;
                    worst = worst.max((got - want).abs() / want.abs());
                }
            }
        }
    }
    Ok((worst < 1e-8, format!("max relative error {worst:.2e} over 1600 points")))
}

/// Even rules α = (1, 0, a₂, 0, a₄, 0, a₆) with random coefficients.
pub fn random_even_rules(count: usize, seed: u64) -> Result<Vec<OrderingRule>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut alpha = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
            let mut fact = 1.0;
            for n in 1..=3 {
                fact *= (2 * n - 1) as f64 * (2 * n) as f64;
                alpha[2 * n] = rng.random_range(-1.0..1.0) / fact;
            }
            OrderingRule::new(format!("custom_{i}"), alpha, 3)
        })
        .collect()
}

fn ordering_invariance() -> Outcome {
    let c = unit();
    let barrier = SquareBarrier::new(1.0, 1.0, 0.5)?;
    let mut rules: Vec<OrderingRule> = BuiltinRule::ALL.iter().map(|r| OrderingRule::builtin(*r)).collect();
    rules.extend(random_even_rules(5, 7)?);
    let mut worst: f64 = 0.0;
    for r in &rules {
        worst = worst.max(ordering_invariance_check(r, &barrier, &c)?);
    }
    Ok((
        worst == 0.0,
        format!("max deviation {worst:e} over {} rules", rules.len()),
    ))
}

fn plain_hyp0f1(z: f64) -> f64 {
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut m = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        m += 1.0;
        term *= z / (m * m);
        sum += term;
    }
    sum
}

fn simpson(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect()
}

/// First supraquantized correction for V = q⁴ by brute-force Simpson rules
/// in s, w and (for the Weyl base) x, all with `n` intervals.
pub fn quartic_supra_oracle(eta: f64, zeta: f64, n: usize, cfg: &PhysicalConfig) -> f64 {
    let v = |x: f64| x.powi(4);
    let c = simpson(n);
    let scale = cfg.mu / (2.0 * cfg.hbar * cfg.hbar);
    let (hs, hw) = (eta / n as f64, zeta / n as f64);
    let mut total = 0.0;
    for i in 0..=n {
        let s = i as f64 * hs;
        let hx = s / n as f64;
        let mut row = 0.0;
        for j in 0..=n {
            let w = j as f64 * hw;
            let mut base = 0.0;
            if s != 0.0 {
                for (k, ck) in c.iter().enumerate() {
                    let x = k as f64 * hx;
                    base += ck * plain_hyp0f1(scale * (v(s) - v(x)) * w * w);
                }
                base *= 0.5 * hx / 3.0;
            }
            let g = plain_hyp0f1(scale * (zeta * zeta - w * w) * (v(eta) - v(s)));
            row += c[j] * w.powi(3) * g * base;
        }
        total += c[i] * 24.0 * s * row * hw / 3.0;
    }
    cfg.mu / (24.0 * cfg.hbar * cfg.hbar) * total * hs / 3.0
}

fn supraquantization() -> Outcome {
    let c = unit();
    let barrier = SquareBarrier::new(1.0, 1.0, 0.5)?;
    let mut all_zero = true;
    for n in 1..=5 {
        let chain = supra_correction_chain(&barrier, n, &c)?;
        for r in Region::ALL {
            all_zero &= chain.kernel(r).is_zero();
        }
        all_zero &= chain.log.is_consistent() && chain.log.all_vanish();
    }
    let quartic = Potential::Polynomial {
        coeffs: vec![0.0, 0.0, 0.0, 0.0, 1.0],
    };
    let base = weyl_kernel(&quartic, &c)?;
    let got = supra_correction_n1(&quartic, &base, &c)?.value(1.0, 1.0)?;
    let want = quartic_supra_oracle(1.0, 1.0, 512, &c);
    let rel = (got - want).abs() / want.abs();
    Ok((
        all_zero && rel < 1e-6,
        format!(
            "barrier corrections n<=5 {}; quartic n=1 at (1,1): {got:.12} vs Simpson {want:.12}, rel {rel:.1e}",
            if all_zero { "all zero" } else { "NOT all zero" }
        ),
    ))
}

/// A packet and barrier with the packet's support classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteConfig {
    pub packet: GaussianPacket,
    pub barrier: SquareBarrier,
    pub support: Support,
}

/// Configurations split across the three support classes.
pub fn route_configs(seed: u64, cfg: &PhysicalConfig) -> Result<Vec<RouteConfig>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let wanted = [Support::AboveBarrier, Support::BelowBarrier, Support::Mixed];
    let counts = [4, 3, 3];
    for (class, count) in wanted.iter().zip(counts) {
        let mut made = 0;
        while made < count {
            let sigma = rng.random_range(0.8..2.0);
            let k0 = rng.random_range(3.0..20.0);
            let len = rng.random_range(0.2..1.0);
            let w = 5.0 / (2.0 * sigma);
            let kappa: f64 = match class {
                Support::AboveBarrier => (k0 - w) * rng.random_range(0.1..0.9),
                Support::BelowBarrier => (k0 + w) * rng.random_range(1.1..2.0),
                Support::Mixed => k0 + rng.random_range(-0.8..0.8) * w,
            };
            if !(kappa > 0.0) {
                continue;
            }
            let v0 = (cfg.hbar * kappa).powi(2) / (2.0 * cfg.mu);
            let b = 0.5;
            let barrier = SquareBarrier::new(v0, b + len, b)?;
            let packet = GaussianPacket::new(-(b + len) - 10.0 * sigma, k0, sigma)?;
            if packet.support_classification(kappa, 5.0)? != *class {
                continue;
            }
            out.push(RouteConfig {
                packet,
                barrier,
                support: *class,
            });
            made += 1;
        }
    }
    Ok(out)
}

fn route_equivalence() -> Outcome {
    let c = unit();
    let configs = route_configs(11, &c)?;
    let mut worst_ratio: f64 = 0.0;
    let mut failures = 0;
    for rc in &configs {
        let r = [
            delta_tau_coordinate(&rc.packet, &rc.barrier, &c)?,
            delta_tau_momentum(&rc.packet, &rc.barrier, &c)?,
            delta_tau_eigen(&rc.packet, &rc.barrier, &c)?,
        ];
        for i in 0..3 {
            for j in i + 1..3 {
                let d = (r[i].delta_tau - r[j].delta_tau).abs();
                let allowed = (1e-6 * r[i].delta_tau.abs().max(r[j].delta_tau.abs())).max(r[i].err_est + r[j].err_est);
                worst_ratio = worst_ratio.max(d / allowed);
                if d > allowed {
                    failures += 1;
                }
            }
        }
    }
    Ok((
        failures == 0,
        format!(
            "{} configurations, {failures} pairwise disagreements, worst difference/allowance {worst_ratio:.2e}",
            configs.len()
        ),
    ))
}

fn instantaneity() -> Outcome {
    let c = unit();
    let below_pkt = GaussianPacket::new(-9.0, 15.0, 1.2)?;
    let below = SquareBarrier::new(200.0, 1.0, 0.5)?;
    let kappa = below.kappa(&c);
    let below_ok = below_pkt.support_classification(kappa, 5.0)? == Support::BelowBarrier;
    let m = delta_tau_momentum(&below_pkt, &below, &c)?;
    let scale = below.length() / (c.hbar * below_pkt.k0 / c.mu);
    let tt = m.tau_trav.unwrap_or(f64::NAN);

    let fast = GaussianPacket::new(-20.0, 75.0, 1.2)?;
    let weak = SquareBarrier::new(1.0, 1.0, 0.5)?;
    let k = weak.kappa(&c);
    let h = delta_tau_momentum(&fast, &weak, &c)?;
    let q = h.q.unwrap_or(f64::NAN);
    let r = h.r.unwrap_or(f64::NAN);
    let r_lim = fast.k0 / (fast.k0 * fast.k0 - k * k).sqrt();
    let pass =
        below_ok && tt < 1e-8 * scale && (q - 1.0).abs() < 1e-4 && (r - r_lim).abs() < 1e-4 && fast.k0 >= 50.0 * k;
    Ok((
        pass,
        format!(
            "tau_trav {tt:.2e} vs bound {:.2e}; k0/kappa {:.1}: |Q-1| {:.2e}, |R-limit| {:.2e}",
            1e-8 * scale,
            fast.k0 / k,
            (q - 1.0).abs(),
            (r - r_lim).abs()
        ),
    ))
}

fn teccr() -> Outcome {
    let c = unit();
    let free = weyl_kernel(&Potential::Free, &c)?;
    let phi = TestFunction::Gaussian {
        center: -2.0,
        width: 0.3,
        wavenumber: 1.0,
    };
    let psi = TestFunction::Gaussian {
        center: -1.6,
        width: 0.25,
        wavenumber: 2.0,
    };
    let d_free = teccr_defect(&free, &Potential::Free, &phi, &psi, &c)?.value.norm();

    let osc = Potential::Harmonic { omega: 1.0 };
    let phi = TestFunction::Gaussian {
        center: -0.1,
        width: 0.065,
        wavenumber: 1.0,
    };
    let psi = TestFunction::Gaussian {
        center: 0.05,
        width: 0.065,
        wavenumber: 2.0,
    };
    let weyl = weyl_kernel(&osc, &c)?;
    let d_weyl = teccr_defect(&weyl, &osc, &phi, &psi, &c)?.value.norm();
    let bj = TimeKernel::closed_form(BuiltinRule::BornJordan, &osc, &c)?;
    let d_bj = teccr_defect(&bj, &osc, &phi, &psi, &c)?.value.norm();
    let pass = d_free < 1e-5 * c.hbar && d_weyl < 1e-5 * c.hbar && d_bj >= 10.0 * d_weyl;
    Ok((
        pass,
        format!("free {d_free:.2e}, Weyl harmonic {d_weyl:.2e}, Born-Jordan harmonic {d_bj:.2e}"),
    ))
}

fn eigen_structure(exec: Execution) -> Outcome {
    let c = unit();
    let barrier = SquareBarrier::new(1.0, 1.0, 0.5)?;
    let pc = barrier.critical_momentum(&c);
    let guard = 0.05;
    let mut residual: f64 = 0.0;
    for tau in [-1.0, 0.0, 2.0] {
        let e = ToaEigenfunction::new(EigenKind::NonNodal, EigenSystem::Barrier(barrier), tau);
        for i in 0..=400 {
            let p = guard + (20.0 - guard) * i as f64 / 400.0;
            if p <= guard || (p - pc).abs() < 0.05 * pc {
                continue;
            }
            let phi = e.evaluate(p, &c);
            let out = apply_barrier_toa_momentum(phi, e.derivative(p, &c)?, p, &barrier, guard, &c)?;
            residual = residual.max((out - phi * tau).norm());
        }
    }

    let g = TestFunction::Gaussian {
        center: 15.0,
        width: 1.0,
        wavenumber: 9.0,
    };
    let ts = [0.3, 0.45, 0.6, 0.8, 1.2, 2.0, 200.0];
    let mut defects = Vec::new();
    for t in ts {
        defects.push(completeness_defect(&barrier, &g, &g, t, &c, exec)?);
    }
    let monotone = defects
        .windows(2)
        .all(|w| w[1].value.norm() <= w[0].value.norm() + w[0].err_est + w[1].err_est);
    let last = defects.last().map_or(f64::NAN, |d| d.value.norm());

    let mut nodal: f64 = 0.0;
    for sys in [EigenSystem::Free, EigenSystem::Barrier(barrier)] {
        for tau in [0.0, 0.5] {
            let e = ToaEigenfunction::new(EigenKind::Nodal, sys, tau);
            nodal = nodal.max(e.position_density(0.0, 0.05, &c)?.value);
        }
    }
    let pass = residual < 1e-8 && monotone && last < 1e-3 && nodal < 1e-10;
    let seq: Vec<String> = defects.iter().map(|d| format!("{:.1e}", d.value.norm())).collect();
    Ok((
        pass,
        format!(
            "eigen residual {residual:.1e} (p > 0); completeness over T={ts:?}: [{}] monotone {monotone}; nodal density at 0 {nodal:.1e}",
            seq.join(", ")
        ),
    ))
}

fn distributions(exec: Execution) -> Outcome {
    let c = unit();
    let pkt = GaussianPacket::new(-9.0, 15.0, 1.2)?;
    let grid = default_tau_grid(&pkt, 600, &c)?;
    let free = toa_distribution(&pkt, DistributionSystem::Free, EigenKind::NonNodal, &grid, &c, exec)?;
    let below = SquareBarrier::new(200.0, 1.0, 0.5)?;
    let above = SquareBarrier::new(1.0, 1.0, 0.5)?;
    let d_below = toa_distribution(
        &pkt,
        DistributionSystem::Barrier(below),
        EigenKind::NonNodal,
        &grid,
        &c,
        exec,
    )?;
    let d_above = toa_distribution(
        &pkt,
        DistributionSystem::Barrier(above),
        EigenKind::NonNodal,
        &grid,
        &c,
        exec,
    )?;
    let expect = -below.length() / (c.hbar * pkt.k0 / c.mu);
    let shift_below = peak_shift(&free, &d_below)?;
    let shift_above = peak_shift(&free, &d_above)?;
    let mut mean_ok = true;
    let mut mean_rel: f64 = 0.0;
    for (b, d) in [(below, &d_below), (above, &d_above)] {
        let dt = delta_tau_momentum(&pkt, &b, &c)?.delta_tau;
        let diff = free.mean_arrival()? - d.mean_arrival()?;
        let rel = (diff - dt).abs() / dt.abs();
        mean_rel = mean_rel.max(rel);
        mean_ok &= rel < 0.02;
    }
    let pass = (shift_below - expect).abs() <= 0.1 * expect.abs() && shift_above > 0.0 && mean_ok;
    Ok((
        pass,
        format!(
            "below-barrier shift {shift_below:.5} vs {expect:.5}; above-barrier shift {shift_above:.2e}; mean difference vs delta_tau worst rel {mean_rel:.1e}"
        ),
    ))
}

/// Double-double arithmetic for the series oracles.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }
    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let e = s.1 + self.1 + o.1;
        Dd::two_sum(s.0, e)
    }
    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p) + (self.0 * o.1 + self.1 * o.0);
        Dd::two_sum(p, e)
    }
    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.0 / d;
        let r = self.add(Dd(-q1 * d, -q1.mul_add(d, -(q1 * d))));
        let q2 = r.0 / d;
        Dd::two_sum(q1, q2)
    }
}

/// Σ (±x²/4)^m/(m!)² in double-double.
fn dd_bessel_series(x: f64, sign: f64) -> f64 {
    let half = x / 2.0;
    let z = Dd(half, 0.0).mul(Dd(half, 0.0));
    let z = Dd(sign * z.0, sign * z.1);
    let mut term = Dd(1.0, 0.0);
    let mut sum = Dd(1.0, 0.0);
    let mut m = 0.0;
    loop {
        m += 1.0;
        term = term.mul(z).div_f64(m * m);
        sum = sum.add(term);
        if term.0.abs() < 1e-34 * sum.0.abs().max(1.0) {
            break;
        }
    }
    sum.0 + sum.1
}

fn numerics_foundation() -> Outcome {
    let mut j_err: f64 = 0.0;
    let mut i_err: f64 = 0.0;
    for i in 0..=600 {
        let x = -30.0 + 0.1 * i as f64;
        let j = dd_bessel_series(x, -1.0);
        let iv = dd_bessel_series(x, 1.0);
        j_err = j_err
            .max((bessel_j0(x) - j).abs())
            .max((hyp0f1_1(-x * x / 4.0)? - j).abs());
        for got in [bessel_i0(x)?, hyp0f1_1(x * x / 4.0)?, hyp0f1(1.0, x * x / 4.0, 500)?] {
            i_err = i_err.max((got - iv).abs() / iv);
        }
    }
    let tol = crate::config::Tolerance::default();
    let mut osc_err: f64 = 0.0;
    for (a, b) in [(1.0f64, 2.0f64), (2.0, 1.0), (1.0, 1.01)] {
        let want = if b > a { 1.0 / (b * b - a * a).sqrt() } else { 0.0 };
        let got: Complex64 = bessel_j0_fourier(a, b, 0.0, &tol)?.value;
        osc_err = osc_err.max((got.im - want).abs() / want.abs().max(1.0));
    }
    Ok((
        j_err < 1e-10 && i_err < 1e-10 && osc_err < 1e-8,
        format!("J0 abs {j_err:.1e}, I0 rel {i_err:.1e} on |x| <= 30; sine-transform identity {osc_err:.1e}"),
    ))
}
