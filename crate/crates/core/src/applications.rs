//! Harmonic-trap and Coulomb-stability bounds for anyons, and the confined Calogero-Sutherland
//! partition minimizer with its power-law asymptotics.

use crate::error::{Error, Result};
use crate::exclusion::{xi_h, ConstantsRegistry, Fraction, StatisticsParams};
use crate::report::BoundReport;
use crate::special::{find_root, ln_gamma, RootBracket};
use crate::thermo::{alpha_constant, maximize_log, Potential1D};
use quadrature::double_exponential;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Each of N/ξc^{2/μ} and ξcN must exceed this for the power-law asymptotics to be flagged valid.
pub const ASYMPTOTIC_RATIO: f64 = 100.0;
pub const MAX_AUTO_INTERVALS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapSpec {
    pub alpha: f64,
    pub fraction: Option<Fraction>,
    pub n: u64,
    pub omega: f64,
    pub c_a: f64,
    pub l_angular: Option<i64>,
}

impl TrapSpec {
    pub fn new(alpha: f64, n: u64, omega: f64, c_a: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("α must be finite, got {alpha}")));
        }
        if n < 1 {
            return Err(Error::InvalidInput("N must be ≥ 1".into()));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidInput(format!("ω must be positive, got {omega}")));
        }
        ConstantsRegistry::new(c_a)?;
        Ok(Self {
            alpha,
            fraction: None,
            n,
            omega,
            c_a,
            l_angular: None,
        })
    }

    pub fn with_fraction(mut self, f: Fraction) -> Self {
        self.alpha = f.value();
        self.fraction = Some(f);
        self
    }

    pub fn with_angular_momentum(mut self, l: i64) -> Self {
        self.l_angular = Some(l);
        self
    }

    fn statistics(&self) -> StatisticsParams {
        StatisticsParams {
            kind: crate::exclusion::StatisticsKind::Anyon,
            eta: None,
            alpha: Some(self.alpha),
            fraction: self.fraction,
        }
    }
}

/// (1/3)√(8C_A/π) C_{α,N} ω N^{3/2}, or the bosonic (1/3)√(8C_A/π) ω N when C_{α,N} = 0.
pub fn harmonic_trap_bound(spec: &TrapSpec) -> Result<BoundReport> {
    let stats = spec.statistics();
    let nf = spec.n as f64;
    let c = if spec.n >= 2 {
        alpha_constant(&stats, spec.n)?
    } else {
        0.0
    };
    let pref = (8.0 * spec.c_a / PI).sqrt() / 3.0;
    let (kappa, value, branch) = if c > 0.0 {
        (spec.c_a * c * c, pref * c * spec.omega * nf.powf(1.5), "exclusion")
    } else {
        (spec.c_a / nf, pref * spec.omega * nf, "bosonic")
    };
    let lambda = spec.omega * (2.0 * kappa * nf / PI).sqrt();
    let radius = (2.0 * lambda).sqrt() / spec.omega;
    let w2 = spec.omega * spec.omega;
    let rho = |r: f64| (lambda - 0.5 * w2 * r * r).max(0.0) / (2.0 * kappa);
    let mass = double_exponential::integrate(|r| 2.0 * PI * r * rho(r), 0.0, radius, 1e-12).integral;
    let energy = double_exponential::integrate(
        |r| {
            let p = rho(r);
            2.0 * PI * r * (kappa * p * p + 0.5 * w2 * r * r * p)
        },
        0.0,
        radius,
        1e-12 * value.max(1.0),
    )
    .integral;
    let mut report = BoundReport::new(value, Some(stats))?
        .with_constant("C_A", spec.c_a)
        .with_diagnostic("branch", branch)
        .with_diagnostic("C_alpha_N", c)
        .with_diagnostic("lambda", lambda)
        .with_diagnostic("thomas_fermi_radius", radius)
        .with_diagnostic("profile_mass_quadrature", mass)
        .with_diagnostic("energy_quadrature", energy);
    if spec.l_angular.is_some() {
        report = report.with_diagnostic("angular_momentum_bound", angular_momentum_bound(spec)?);
    }
    Ok(report)
}

/// ω(N + |L + αN(N−1)/2|).
pub fn angular_momentum_bound(spec: &TrapSpec) -> Result<f64> {
    let l = spec
        .l_angular
        .ok_or_else(|| Error::InvalidInput("angular momentum L is required".into()))?;
    let nf = spec.n as f64;
    Ok(spec.omega * (nf + (l as f64 + spec.alpha * nf * (nf - 1.0) / 2.0).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilitySpec {
    pub m: f64,
    pub z: f64,
    pub nu: u64,
    pub k: u64,
    pub n: u64,
    pub b: Option<f64>,
}

impl StabilitySpec {
    pub fn new(m: f64, z: f64, nu: u64, k: u64, n: u64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidInput(format!("m must be positive, got {m}")));
        }
        if !(z >= 1.0 && z.is_finite()) {
            return Err(Error::InvalidInput(format!("Z must be ≥ 1, got {z}")));
        }
        if nu < 1 {
            return Err(Error::InvalidInput("ν must be a positive integer".into()));
        }
        if n < 1 {
            return Err(Error::InvalidInput("N must be ≥ 1".into()));
        }
        Ok(Self {
            m,
            z,
            nu,
            k,
            n,
            b: None,
        })
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = Some(b);
        self
    }

    /// ν²m(2Z+1).
    pub fn default_b(&self) -> f64 {
        (self.nu * self.nu) as f64 * self.m * (2.0 * self.z + 1.0)
    }
}

/// 5 + 16m²(2Z+1)²/b² + [ln(288π m C_A′ ν²/b)]₊.
pub fn stability_bracket(spec: &StabilitySpec, c_a_prime: f64, b: f64) -> f64 {
    let q = 2.0 * spec.z + 1.0;
    let nu2 = (spec.nu * spec.nu) as f64;
    5.0 + 16.0 * spec.m * spec.m * q * q / (b * b) + (288.0 * PI * spec.m * c_a_prime * nu2 / b).ln().max(0.0)
}

/// −4π m C_A′ ν²(2Z+1)² K · bracket − (2Z+1) b N.
pub fn stability_value(spec: &StabilitySpec, c_a_prime: f64, b: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidInput(format!("b must be positive, got {b}")));
    }
    let q = 2.0 * spec.z + 1.0;
    let nu2 = (spec.nu * spec.nu) as f64;
    let nuclei = if spec.k == 0 {
        0.0
    } else {
        -4.0 * PI * spec.m * c_a_prime * nu2 * q * q * spec.k as f64 * stability_bracket(spec, c_a_prime, b)
    };
    Ok(nuclei - q * b * spec.n as f64)
}

pub fn stability_bound(spec: &StabilitySpec, registry: &ConstantsRegistry) -> Result<BoundReport> {
    let cp = registry.c_a_prime();
    let b_default = spec.default_b();
    let b = spec.b.unwrap_or(b_default);
    let value = stability_value(spec, cp, b)?;
    let at_default = stability_value(spec, cp, b_default)?;
    let (b_opt, v_opt) = maximize_log(
        |x| stability_value(spec, cp, x).unwrap_or(f64::NEG_INFINITY),
        b_default * 1e-12,
        b_default * 1e12,
        2001,
    );
    let (b_opt, v_opt) = if v_opt >= at_default {
        (b_opt, v_opt)
    } else {
        (b_default, at_default)
    };
    let total = (spec.k + spec.n) as f64;
    Ok(BoundReport::new(value, None)?
        .with_constant("C_A", registry.c_a())
        .with_constant("C_A_prime", cp)
        .with_diagnostic("b", b)
        .with_diagnostic("b_default", b_default)
        .with_diagnostic("value_default_b", at_default)
        .with_diagnostic("b_optimized", b_opt)
        .with_diagnostic("value_optimized_b", v_opt)
        .with_diagnostic("bracket", stability_bracket(spec, cp, b))
        .with_diagnostic("per_particle", value / total)
        .with_diagnostic(
            "linear_constant",
            -value / ((spec.nu * spec.nu) as f64 * spec.m * spec.z * spec.z * total),
        ))
}

/// ρ_c > 2 with ρ_c³/32 = ρ_c − 1.
pub fn rho_c() -> f64 {
    static RHO_C: OnceLock<f64> = OnceLock::new();
    *RHO_C.get_or_init(|| {
        let f = |r: f64| r * r * r / 32.0 - (r - 1.0);
        find_root(
            f,
            RootBracket::from_fn(f, 2.0, 10.0).expect("sign change on [2, 10]"),
            1e-15,
        )
        .expect("bracketed root")
    })
}

/// ℰ(ρ) = max{0, ρ − 1, χ_{ρ≥2} ρ³/32}.
pub fn local_energy(rho: f64) -> f64 {
    let cubic = if rho >= 2.0 { rho * rho * rho / 32.0 } else { 0.0 };
    0.0f64.max(rho - 1.0).max(cubic)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSpec {
    pub intervals: Vec<(f64, f64)>,
    pub potentials: Vec<f64>,
    pub v_ext: f64,
    pub alpha: f64,
    pub n: u64,
}

impl PartitionSpec {
    pub fn new(intervals: Vec<(f64, f64)>, potentials: Vec<f64>, v_ext: f64, alpha: f64, n: u64) -> Result<Self> {
        if intervals.is_empty() || intervals.len() != potentials.len() {
            return Err(Error::InvalidInput("need one potential value per interval".into()));
        }
        if intervals
            .iter()
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b))
        {
            return Err(Error::InvalidInput("intervals must be finite with lo < hi".into()));
        }
        let mut sorted = intervals.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        if sorted.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidInput("intervals overlap".into()));
        }
        if potentials.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("interval potentials must be finite".into()));
        }
        if v_ext.is_nan() || v_ext == f64::NEG_INFINITY {
            return Err(Error::InvalidInput("exterior potential must be finite or +∞".into()));
        }
        if !(alpha >= 1.0) {
            return Err(Error::Inapplicable(format!(
                "the partition bound requires α ≥ 1, got {alpha}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidInput("N must be ≥ 2".into()));
        }
        Ok(Self {
            intervals,
            potentials,
            v_ext,
            alpha,
            n,
        })
    }

    fn weights(&self, xi: f64) -> Vec<f64> {
        self.intervals
            .iter()
            .map(|(a, b)| xi * xi / ((b - a) * (b - a)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSolution {
    pub value: f64,
    pub dual_value: f64,
    pub lambda: f64,
    pub occupations: Vec<f64>,
    pub exterior: f64,
    pub xi_h: f64,
}

/// Breakpoints of the multiplier at which the minimizer set of wℰ(ρ) + (v − λ)ρ changes.
fn breakpoints(v: f64, w: f64) -> [f64; 3] {
    let rc = rho_c();
    [v, v + w, v + w * (3.0 * rc * rc / 32.0)]
}

/// Minimizers of wℰ(ρ) + (v − λ)ρ form the interval [lo, hi].
fn argmin_range(w: f64, v: f64, lambda: f64) -> (f64, f64) {
    let rc = rho_c();
    let [b0, b1, b2] = breakpoints(v, w);
    if lambda < b0 {
        (0.0, 0.0)
    } else if lambda == b0 {
        (0.0, 1.0)
    } else if lambda < b1 {
        (1.0, 1.0)
    } else if lambda == b1 {
        (1.0, rc)
    } else if lambda <= b2 {
        (rc, rc)
    } else {
        let r = (32.0 * (lambda - v) / (3.0 * w)).sqrt().max(rc);
        (r, r)
    }
}

fn exterior_range(v_ext: f64, lambda: f64) -> (f64, f64) {
    if lambda < v_ext {
        (0.0, 0.0)
    } else if lambda == v_ext {
        (0.0, f64::INFINITY)
    } else {
        (f64::INFINITY, f64::INFINITY)
    }
}

fn objective(spec: &PartitionSpec, w: &[f64], occ: &[f64], ext: f64) -> f64 {
    let mut s = 0.0;
    for ((wj, vj), r) in w.iter().zip(&spec.potentials).zip(occ) {
        s += wj * local_energy(*r) + vj * r;
    }
    if ext > 0.0 {
        s += spec.v_ext * ext;
    }
    s
}

/// Global minimum of Σ_j (ξ_H²/|I_j|²)ℰ(ρ_j) + V_jρ_j + V_ext ρ_ext subject to Σρ = N, by
/// bisection on the multiplier and exact snapping to the breakpoints of the piecewise dual.
pub fn solve_partition(spec: &PartitionSpec) -> Result<PartitionSolution> {
    let xi = xi_h(spec.alpha)?;
    let w = spec.weights(xi);
    let nf = spec.n as f64;
    let rc = rho_c();
    let m_max = |lambda: f64| -> f64 {
        let mut s = exterior_range(spec.v_ext, lambda).1;
        for (wj, vj) in w.iter().zip(&spec.potentials) {
            s += argmin_range(*wj, *vj, lambda).1;
        }
        s
    };
    let vmin = spec.potentials.iter().cloned().fold(spec.v_ext, f64::min);
    let mut lo = vmin - 1.0;
    let top = nf.max(rc);
    let mut hi = w
        .iter()
        .zip(&spec.potentials)
        .map(|(wj, vj)| vj + wj * 3.0 * top * top / 32.0)
        .fold(f64::INFINITY, f64::min)
        + 1.0;
    hi = hi.min(spec.v_ext);
    if !(m_max(hi) >= nf) {
        return Err(Error::Infeasible(format!("no multiplier reaches N = {}", spec.n)));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if m_max(mid) >= nf {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut lambda = hi;
    let mut breaks: Vec<f64> = vec![spec.v_ext];
    for (wj, vj) in w.iter().zip(&spec.potentials) {
        breaks.extend(breakpoints(*vj, *wj));
    }
    let slack = 4.0 * f64::EPSILON * (1.0 + lambda.abs());
    let mut snapped: Vec<f64> = breaks
        .into_iter()
        .filter(|b| b.is_finite() && *b >= lo - slack && *b <= hi + slack && m_max(*b) >= nf)
        .collect();
    snapped.sort_by(f64::total_cmp);
    if let Some(b) = snapped.first() {
        lambda = lambda.min(*b);
    }

    let ranges: Vec<(f64, f64)> = w
        .iter()
        .zip(&spec.potentials)
        .map(|(wj, vj)| argmin_range(*wj, *vj, lambda))
        .collect();
    let ext_range = exterior_range(spec.v_ext, lambda);
    let mut occ: Vec<f64> = ranges.iter().map(|r| r.0).collect();
    let mut ext = if ext_range.0.is_finite() { ext_range.0 } else { 0.0 };
    let mut residual = nf - occ.iter().sum::<f64>() - ext;
    let mut order: Vec<usize> = (0..occ.len()).collect();
    order.sort_by(|a, b| spec.potentials[*a].total_cmp(&spec.potentials[*b]).then(a.cmp(b)));
    for &j in &order {
        if residual <= 0.0 {
            break;
        }
        let add = residual.min(ranges[j].1 - ranges[j].0);
        occ[j] += add;
        residual -= add;
    }
    if residual > 0.0 && ext_range.1 > 0.0 {
        ext += residual;
        residual = 0.0;
    }
    if residual.abs() > 1e-9 * nf {
        return Err(Error::Infeasible(format!("occupations miss N by {residual}")));
    }
    if residual != 0.0 {
        let j = (0..occ.len())
            .max_by(|a, b| occ[*a].total_cmp(&occ[*b]))
            .expect("nonempty");
        occ[j] = (occ[j] + residual).max(0.0);
    }
    let value = objective(spec, &w, &occ, ext);
    let mut dual = lambda * nf;
    for (j, (wj, vj)) in w.iter().zip(&spec.potentials).enumerate() {
        let r = ranges[j].0;
        dual += wj * local_energy(r) + (vj - lambda) * r;
    }
    Ok(PartitionSolution {
        value,
        dual_value: dual,
        lambda,
        occupations: occ,
        exterior: ext,
        xi_h: xi,
    })
}

pub fn cs_confined_energy(spec: &PartitionSpec) -> Result<BoundReport> {
    let sol = solve_partition(spec)?;
    Ok(
        BoundReport::new(sol.value, Some(StatisticsParams::calogero_sutherland(spec.alpha)?))?
            .with_constant("C_H", ConstantsRegistry::C_H)
            .with_diagnostic("xi_H", sol.xi_h)
            .with_diagnostic("lambda", sol.lambda)
            .with_diagnostic("dual_value", sol.dual_value)
            .with_diagnostic("occupations", sol.occupations)
            .with_diagnostic("exterior_occupation", sol.exterior)
            .with_diagnostic("intervals", spec.intervals.len()),
    )
}

/// Grid minimization over (ρ₁, ρ₂) with repeated zooming, for partitions with at most two
/// intervals. Independent of the dual solver.
pub fn cs_confined_energy_brute_force(spec: &PartitionSpec, divisions: usize) -> Result<f64> {
    let m = spec.intervals.len();
    if m > 2 {
        return Err(Error::InvalidInput("brute force supports at most two intervals".into()));
    }
    let xi = xi_h(spec.alpha)?;
    let w = spec.weights(xi);
    let nf = spec.n as f64;
    let free_ext = spec.v_ext.is_finite();
    let eval = |r1: f64, r2: f64| -> Option<f64> {
        let occ = if m == 1 { vec![r1] } else { vec![r1, r2] };
        let used: f64 = occ.iter().sum();
        let ext = nf - used;
        if occ.iter().any(|r| *r < 0.0) || ext < -1e-12 * nf {
            return None;
        }
        if !free_ext && ext.abs() > 1e-12 * nf {
            return None;
        }
        Some(objective(spec, &w, &occ, ext.max(0.0)))
    };
    let second = |r1: f64| if !free_ext && m == 2 { nf - r1 } else { 0.0 };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let h = nf / divisions as f64;
    for i in 0..=divisions {
        let r1 = i as f64 * h;
        if m == 2 && free_ext {
            for j in 0..=(divisions - i) {
                let r2 = j as f64 * h;
                if let Some(v) = eval(r1, r2) {
                    if v < best.0 {
                        best = (v, r1, r2);
                    }
                }
            }
        } else if m == 1 && free_ext || m == 2 {
            if let Some(v) = eval(r1, second(r1)) {
                if v < best.0 {
                    best = (v, r1, second(r1));
                }
            }
        } else if let Some(v) = eval(nf, 0.0) {
            best = (v, nf, 0.0);
        }
    }
    let two_d = m == 2 && free_ext;
    let mut step = h;
    while step > 1e-13 * nf {
        let (_, c1, c2) = best;
        let fine = step / 8.0;
        for i in -16i32..=16 {
            let r1 = c1 + i as f64 * fine;
            if two_d {
                for j in -16i32..=16 {
                    let r2 = c2 + j as f64 * fine;
                    if let Some(v) = eval(r1, r2) {
                        if v < best.0 {
                            best = (v, r1, r2);
                        }
                    }
                }
            } else if let Some(v) = eval(r1, second(r1)) {
                if v < best.0 {
                    best = (v, r1, second(r1));
                }
            }
        }
        step = fine;
    }
    if best.0.is_finite() {
        Ok(best.0)
    } else {
        Err(Error::Infeasible("no feasible grid point".into()))
    }
}

/// Confining potentials with exactly computable infima on intervals and exteriors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TrapPotential {
    /// ω²x²/2.
    Harmonic { omega: f64 },
    /// c^μ|x|^μ.
    PowerLaw { c: f64, mu: f64 },
    /// Constant on each sample cell, extended by the end values outside the samples.
    Sampled(Potential1D),
}

impl TrapPotential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Harmonic { omega } if !(*omega > 0.0 && omega.is_finite()) => {
                Err(Error::InvalidInput(format!("ω must be positive, got {omega}")))
            }
            Self::PowerLaw { c, mu } if !(*c > 0.0 && *mu > 0.0 && c.is_finite() && mu.is_finite()) => Err(
                Error::InvalidInput(format!("power law needs c, μ > 0, got c = {c}, μ = {mu}")),
            ),
            Self::Sampled(p) if p.values.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidInput("sampled trap potential must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    fn radial(&self, r: f64) -> f64 {
        match self {
            Self::Harmonic { omega } => 0.5 * omega * omega * r * r,
            Self::PowerLaw { c, mu } => (c * r).powf(*mu),
            Self::Sampled(_) => unreachable!("sampled potentials are not radial"),
        }
    }

    fn cell_range(p: &Potential1D, a: f64, b: f64) -> Option<(usize, usize)> {
        let n = p.values.len();
        let left = p.x0 - 0.5 * p.dx;
        let i0 = ((a - left) / p.dx).floor().max(0.0) as usize;
        let i1 = (((b - left) / p.dx).floor().max(0.0) as usize).min(n - 1);
        if b < left || i0 > n - 1 {
            return None;
        }
        Some((i0, i1))
    }

    /// inf of V over [a, b].
    pub fn inf_on(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Sampled(p) => {
                let n = p.values.len();
                let left = p.x0 - 0.5 * p.dx;
                let right = left + n as f64 * p.dx;
                let mut m = f64::INFINITY;
                if a < left {
                    m = m.min(p.values[0]);
                }
                if b > right {
                    m = m.min(p.values[n - 1]);
                }
                if let Some((i0, i1)) = Self::cell_range(p, a.max(left), b.min(right)) {
                    for v in &p.values[i0..=i1] {
                        m = m.min(*v);
                    }
                }
                m
            }
            _ => {
                let r = if a <= 0.0 && b >= 0.0 {
                    0.0
                } else {
                    a.abs().min(b.abs())
                };
                self.radial(r)
            }
        }
    }

    /// inf of V over |x| ≥ r.
    pub fn inf_outside(&self, r: f64) -> f64 {
        match self {
            Self::Sampled(p) => {
                let span = p.dx * (p.values.len() as f64 + 2.0) + p.x0.abs();
                self.inf_on(r, r + span).min(self.inf_on(-r - span, -r))
            }
            _ => self.radial(r),
        }
    }
}

/// Symmetric partition [−(k+1)a, −ka], [ka, (k+1)a] for k < M plus the exterior |x| ≥ Ma.
pub fn symmetric_partition(v: &TrapPotential, a: f64, m: usize, alpha: f64, n: u64) -> Result<PartitionSpec> {
    let mut intervals = Vec::with_capacity(2 * m);
    let mut pots = Vec::with_capacity(2 * m);
    for k in 0..m {
        let (lo, hi) = (k as f64 * a, (k + 1) as f64 * a);
        intervals.push((-hi, -lo));
        pots.push(v.inf_on(-hi, -lo));
        intervals.push((lo, hi));
        pots.push(v.inf_on(lo, hi));
    }
    PartitionSpec::new(intervals, pots, v.inf_outside(m as f64 * a), alpha, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSearch {
    pub a_values: Vec<f64>,
    /// None grows M by doubling until no mass reaches the exterior.
    pub m_values: Option<Vec<usize>>,
}

impl Default for PartitionSearch {
    fn default() -> Self {
        Self {
            a_values: logspace(0.01, 10.0, 40),
            m_values: None,
        }
    }
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

fn best_for_a(v: &TrapPotential, a: f64, ms: Option<&[usize]>, alpha: f64, n: u64) -> Result<(f64, usize)> {
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut consider = |m: usize| -> Result<PartitionSolution> {
        let spec = symmetric_partition(v, a, m, alpha, n)?;
        let sol = solve_partition(&spec)?;
        if sol.value > best.0 {
            best = (sol.value, m);
        }
        Ok(sol)
    };
    match ms {
        Some(list) => {
            for &m in list {
                consider(m)?;
            }
        }
        None => {
            let mut m = 1;
            loop {
                let sol = consider(m)?;
                let outside = v.inf_outside(m as f64 * a);
                if (sol.exterior == 0.0 && sol.lambda < outside) || 2 * m > MAX_AUTO_INTERVALS {
                    break;
                }
                m *= 2;
            }
        }
    }
    Ok(best)
}

/// sup of the partition minimum over the symmetric uniform family on the search grid.
pub fn optimize_partition(v: &TrapPotential, alpha: f64, n: u64, search: &PartitionSearch) -> Result<BoundReport> {
    v.validate()?;
    if search.a_values.is_empty() || search.m_values.as_ref().is_some_and(|m| m.is_empty()) {
        return Err(Error::InvalidInput("empty partition search grid".into()));
    }
    if search.a_values.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidInput("interval widths must be positive".into()));
    }
    if search.m_values.as_ref().is_some_and(|m| m.contains(&0)) {
        return Err(Error::InvalidInput("M must be ≥ 1".into()));
    }
    let results: Vec<Result<(f64, usize)>> = search
        .a_values
        .par_iter()
        .map(|a| best_for_a(v, *a, search.m_values.as_deref(), alpha, n))
        .collect();
    let mut best: Option<(f64, f64, usize)> = None;
    for (a, r) in search.a_values.iter().zip(results) {
        let (value, m) = r?;
        let better = match best {
            None => true,
            Some((bv, ba, bm)) => value > bv || (value == bv && (*a < ba || (*a == ba && m < bm))),
        };
        if better {
            best = Some((value, *a, m));
        }
    }
    let (value, a, m) = best.expect("nonempty grid");
    let spec = symmetric_partition(v, a, m, alpha, n)?;
    let sol = solve_partition(&spec)?;
    let mut report = BoundReport::new(value, Some(StatisticsParams::calogero_sutherland(alpha)?))?
        .with_constant("C_H", ConstantsRegistry::C_H)
        .with_diagnostic("xi_H", sol.xi_h)
        .with_diagnostic("a", a)
        .with_diagnostic("M", m)
        .with_diagnostic("lambda", sol.lambda)
        .with_diagnostic("exterior_occupation", sol.exterior)
        .with_diagnostic("occupations", sol.occupations);
    if let TrapPotential::Harmonic { omega } = v {
        report = report.with_diagnostic("exact_energy", cs_harmonic_energy(*omega, alpha, n));
    }
    Ok(report)
}

/// ½ωN(1 + α(N−1)).
pub fn cs_harmonic_energy(omega: f64, alpha: f64, n: u64) -> f64 {
    let nf = n as f64;
    0.5 * omega * nf * (1.0 + alpha * (nf - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawConstant {
    pub mu: f64,
    pub limit: f64,
    pub limit_from_i_j: f64,
    pub i_gamma: f64,
    pub i_quadrature: f64,
    pub j_gamma: f64,
    pub j_quadrature: f64,
}

fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
}

/// lim C(μ, N) in closed Γ form, with I(μ) and J(μ) by Γ functions and by quadrature.
pub fn powerlaw_asymptotic_constant(mu: f64) -> Result<PowerLawConstant> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidInput(format!("μ must be positive, got {mu}")));
    }
    let inv = 1.0 / mu;
    let sqrt_pi = PI.sqrt();
    let i_gamma = 0.5 * sqrt_pi * gamma_ratio(1.0 + inv, 1.5 + inv)?;
    let j_gamma = 0.5 * sqrt_pi * (mu + 2.0) / (2.0 * mu * mu) * gamma_ratio(inv, 2.5 + inv)?;
    let tol = 1e-14;
    let i_quadrature = double_exponential::integrate(|x| (1.0 - x.powf(mu)).max(0.0).sqrt(), 0.0, 1.0, tol).integral;
    let j_quadrature = double_exponential::integrate(
        |x| {
            let u = (1.0 - x.powf(mu)).max(0.0);
            u.powf(1.5) / 3.0 + x.powf(mu) * u.sqrt()
        },
        0.0,
        1.0,
        tol,
    )
    .integral;
    let p = 2.0 * mu / (mu + 2.0);
    let q = (3.0 * mu + 2.0) / (mu + 2.0);
    let limit = (3f64.sqrt() / (4.0 * (2.0 * PI).sqrt())).powf(p) * (mu + 2.0) / (2.0 * mu * mu)
        * gamma_ratio(inv, 2.5 + inv)?
        * gamma_ratio(1.5 + inv, 1.0 + inv)?.powf(q);
    let limit_from_i_j = (8.0 * (2.0f64 / 3.0).sqrt()).powf(-p) * j_gamma / i_gamma.powf(q);
    Ok(PowerLawConstant {
        mu,
        limit,
        limit_from_i_j,
        i_gamma,
        i_quadrature,
        j_gamma,
        j_quadrature,
    })
}

/// C(μ)(ξ_H(α)c)^{2μ/(μ+2)} N^{(3μ+2)/(μ+2)} for V = c^μ|x|^μ, valid only asymptotically.
pub fn powerlaw_bound(mu: f64, c: f64, alpha: f64, n: u64) -> Result<BoundReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("c must be positive, got {c}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::Inapplicable(format!(
            "the power-law bound requires α ≥ 1, got {alpha}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidInput("N must be ≥ 1".into()));
    }
    let k = powerlaw_asymptotic_constant(mu)?;
    let xi = xi_h(alpha)?;
    let nf = n as f64;
    let xc = xi * c;
    let value = k.limit * xc.powf(2.0 * mu / (mu + 2.0)) * nf.powf((3.0 * mu + 2.0) / (mu + 2.0));
    let ratio_n = nf / xc.powf(2.0 / mu);
    let ratio_xcn = xc * nf;
    let valid = ratio_n > ASYMPTOTIC_RATIO && ratio_xcn > ASYMPTOTIC_RATIO;
    Ok(
        BoundReport::new(value, Some(StatisticsParams::calogero_sutherland(alpha)?))?
            .with_constant("C_mu", k.limit)
            .with_diagnostic("xi_H", xi)
            .with_diagnostic("ratio_N_over_scale", ratio_n)
            .with_diagnostic("ratio_xi_c_N", ratio_xcn)
            .with_diagnostic("asymptotic_regime", valid)
            .with_diagnostic(
                "regime",
                if valid {
                    "asymptotic regime reached"
                } else {
                    "asymptotic regime not reached"
                },
            )
            .with_diagnostic("I_gamma", k.i_gamma)
            .with_diagnostic("I_quadrature", k.i_quadrature)
            .with_diagnostic("J_gamma", k.j_gamma)
            .with_diagnostic("J_quadrature", k.j_quadrature),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use quadrature::clenshaw_curtis;

    #[test]
    fn trap_examples() {
        for n in [2u64, 10, 100, 1000] {
            let s = TrapSpec::new(1.0, n, 1.3, PI).unwrap();
            let r = harmonic_trap_bound(&s).unwrap();
            let expect = 8f64.sqrt() / 3.0 * 1.3 * (n as f64).powf(1.5);
            assert!((r.value - expect).abs() <= 1e-12 * expect);
            assert!((r.diagnostic("profile_mass_quadrature").unwrap() - n as f64).abs() <= 1e-9 * n as f64);
            assert!((r.diagnostic("energy_quadrature").unwrap() - r.value).abs() <= 1e-9 * r.value);
        }
        let s = TrapSpec::new(0.0, 30, 2.0, 1e-4).unwrap();
        let r = harmonic_trap_bound(&s).unwrap();
        assert_eq!(r.diagnostic("C_alpha_N"), Some(0.0));
        let expect = (8e-4 / PI).sqrt() / 3.0 * 2.0 * 30.0;
        assert!((r.value - expect).abs() <= 1e-12 * expect);
        assert!((r.diagnostic("profile_mass_quadrature").unwrap() - 30.0).abs() <= 1e-9 * 30.0);
        let third = TrapSpec::new(0.0, 50, 1.0, 0.5)
            .unwrap()
            .with_fraction(Fraction::new(1, 3).unwrap());
        let r = harmonic_trap_bound(&third).unwrap();
        assert!((r.diagnostic("C_alpha_N").unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(TrapSpec::new(1.0, 5, 1.0, 4.0).is_err());
    }

    #[test]
    fn angular_momentum_examples() {
        let s = TrapSpec::new(0.0, 7, 2.0, 1.0).unwrap().with_angular_momentum(0);
        assert_eq!(angular_momentum_bound(&s).unwrap(), 14.0);
        let s = TrapSpec::new(1.0, 4, 1.0, 1.0).unwrap().with_angular_momentum(0);
        assert_eq!(angular_momentum_bound(&s).unwrap(), 10.0);
        let s = TrapSpec::new(1.0, 4, 1.5, 1.0).unwrap().with_angular_momentum(-6);
        assert_eq!(angular_momentum_bound(&s).unwrap(), 6.0);
        assert!(angular_momentum_bound(&TrapSpec::new(1.0, 4, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn stability_default_b_substitution() {
        let reg = ConstantsRegistry::default();
        let cp = reg.c_a_prime();
        for (z, nu) in [(1.0, 1u64), (2.0, 3), (5.5, 2)] {
            let s = StabilitySpec::new(0.7, z, nu, 3, 4).unwrap();
            let b = s.default_b();
            let lhs = stability_bracket(&s, cp, b);
            let rhs = 5.0 + 16.0 / (nu as f64).powi(4) + (288.0 * PI * cp / (2.0 * z + 1.0)).ln().max(0.0);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
        let s = StabilitySpec::new(1.0, 1.0, 1, 10, 10).unwrap();
        let r = stability_bound(&s, &reg).unwrap();
        assert!(r.value < 0.0 && r.value.is_finite());
        assert!(stability_value(&s, cp, 0.0).is_err());
        assert!(StabilitySpec::new(1.0, 0.5, 1, 1, 1).is_err());
    }

    #[test]
    fn stability_scales_with_particle_count() {
        let reg = ConstantsRegistry::default();
        let a = stability_bound(&StabilitySpec::new(1.0, 1.0, 1, 10, 10).unwrap(), &reg).unwrap();
        let b = stability_bound(&StabilitySpec::new(1.0, 1.0, 1, 100, 100).unwrap(), &reg).unwrap();
        let pa = a.diagnostic("per_particle").unwrap();
        let pb = b.diagnostic("per_particle").unwrap();
        assert!((pa - pb).abs() <= 1e-12 * pa.abs());
    }

    proptest! {
        #[test]
        fn stability_linear(m in 0.1f64..5.0, z in 1.0f64..10.0, nu in 1u64..6, k in 0u64..200, n in 1u64..200, b in 0.01f64..100.0) {
            let reg = ConstantsRegistry::new(0.3).unwrap();
            let cp = reg.c_a_prime();
            let s = |k, n| StabilitySpec { m, z, nu, k, n, b: None };
            let v = |k, n| stability_value(&s(k, n), cp, b).unwrap();
            let lin = v(k, 0) + v(0, n) - v(0, 0);
            prop_assert!((v(k, n) - lin).abs() <= 1e-12 * v(k, n).abs());
        }

        #[test]
        fn stability_optimum_not_worse(m in 0.1f64..5.0, z in 1.0f64..10.0, nu in 1u64..6, k in 0u64..50, n in 1u64..50) {
            let r = stability_bound(&StabilitySpec::new(m, z, nu, k, n).unwrap(), &ConstantsRegistry::default()).unwrap();
            prop_assert!(r.diagnostic("value_optimized_b").unwrap() >= r.diagnostic("value_default_b").unwrap());
        }

        #[test]
        fn local_energy_midpoint_convex(x in 0.0f64..20.0, y in 0.0f64..20.0) {
            let mid = local_energy(0.5 * (x + y));
            prop_assert!(mid <= 0.5 * (local_energy(x) + local_energy(y)) + 1e-12);
        }

        #[test]
        fn dual_matches_brute_force(
            l1 in 0.3f64..3.0, l2 in 0.3f64..3.0, v1 in -2.0f64..2.0, v2 in -2.0f64..2.0,
            ext in prop_oneof![Just(f64::INFINITY), 0.0f64..20.0], alpha in 1.0f64..4.0, n in 2u64..15
        ) {
            let spec = PartitionSpec::new(vec![(0.0, l1), (l1, l1 + l2)], vec![v1, v2], ext, alpha, n).unwrap();
            let sol = solve_partition(&spec).unwrap();
            let brute = cs_confined_energy_brute_force(&spec, 400).unwrap();
            prop_assert!((sol.value - brute).abs() <= 1e-6 * brute.abs().max(1.0), "{} vs {}", sol.value, brute);
            prop_assert!((sol.value - sol.dual_value).abs() <= 1e-9 * sol.value.abs().max(1.0));
            let total: f64 = sol.occupations.iter().sum::<f64>() + sol.exterior;
            prop_assert!((total - n as f64).abs() <= 1e-9 * n as f64);
        }
    }

    #[test]
    fn local_energy_crossover() {
        let rc = rho_c();
        assert!((rc - 5.068).abs() < 1e-3);
        assert!((rc * rc * rc / 32.0 - (rc - 1.0)).abs() < 1e-14);
        assert_eq!(local_energy(0.5), 0.0);
        assert_eq!(local_energy(1.0), 0.0);
        assert_eq!(local_energy(4.0), 3.0);
        assert_eq!(local_energy(8.0), 16.0);
        for k in 0..100 {
            let r = rc + 0.1 * k as f64;
            assert_eq!(local_energy(r), r * r * r / 32.0);
        }
    }

    #[test]
    fn confined_examples() {
        let spec = PartitionSpec::new(vec![(0.0, 2.0)], vec![0.0], f64::INFINITY, 2.0, 4).unwrap();
        let xi = xi_h(2.0).unwrap();
        let r = cs_confined_energy(&spec).unwrap();
        assert!((r.value - xi * xi / 4.0 * 3.0).abs() < 1e-12);
        let spec = PartitionSpec::new(vec![(0.0, 1.0), (2.0, 3.0)], vec![0.5, 0.5], f64::INFINITY, 1.0, 12).unwrap();
        let sol = solve_partition(&spec).unwrap();
        assert!((sol.occupations[0] - 6.0).abs() < 1e-9 && (sol.occupations[1] - 6.0).abs() < 1e-9);
        assert!(PartitionSpec::new(vec![(0.0, 2.0), (1.0, 3.0)], vec![0.0, 0.0], 1.0, 1.0, 3).is_err());
        assert!(matches!(
            PartitionSpec::new(vec![(0.0, 1.0)], vec![0.0], 1.0, 0.5, 3),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn confined_matches_brute_force_grid() {
        for n in [3u64, 7, 12] {
            for (ext, v2) in [(f64::INFINITY, 0.3), (2.0, -0.5), (0.1, 1.0)] {
                let spec = PartitionSpec::new(vec![(-1.0, 0.0), (0.0, 1.5)], vec![0.0, v2], ext, 1.5, n).unwrap();
                let a = solve_partition(&spec).unwrap().value;
                let b = cs_confined_energy_brute_force(&spec, 1000).unwrap();
                assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "N = {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn harmonic_partition_is_below_exact() {
        let v = TrapPotential::Harmonic { omega: 1.0 };
        for alpha in [1.0, 2.0] {
            for n in [10u64, 50] {
                let r = optimize_partition(&v, alpha, n, &PartitionSearch::default()).unwrap();
                assert!(r.value > 0.0);
                assert!(r.value <= cs_harmonic_energy(1.0, alpha, n));
            }
        }
    }

    #[test]
    fn larger_grid_never_decreases() {
        let v = TrapPotential::PowerLaw { c: 1.0, mu: 1.0 };
        let small = PartitionSearch {
            a_values: vec![0.5, 1.0],
            m_values: Some(vec![2, 4]),
        };
        let large = PartitionSearch {
            a_values: vec![0.25, 0.5, 1.0, 2.0],
            m_values: Some(vec![1, 2, 4, 8]),
        };
        let a = optimize_partition(&v, 1.5, 20, &small).unwrap().value;
        let b = optimize_partition(&v, 1.5, 20, &large).unwrap().value;
        assert!(b >= a);
        assert!(optimize_partition(
            &v,
            1.5,
            20,
            &PartitionSearch {
                a_values: vec![],
                m_values: None
            }
        )
        .is_err());
    }

    #[test]
    fn sampled_potential_infima() {
        let p = Potential1D::new(-1.5, 1.0, vec![3.0, 1.0, -2.0, 5.0]).unwrap();
        let v = TrapPotential::Sampled(p);
        assert_eq!(v.inf_on(-2.0, -1.1), 3.0);
        assert_eq!(v.inf_on(-1.0, -0.5), 3.0f64.min(1.0));
        assert_eq!(v.inf_on(0.2, 0.7), -2.0);
        assert_eq!(v.inf_on(1.2, 9.0), 5.0);
        assert_eq!(v.inf_on(-9.0, -5.0), 3.0);
        assert_eq!(v.inf_outside(1.2), 3.0);
        assert_eq!(v.inf_outside(0.5), -2.0);
        let h = TrapPotential::Harmonic { omega: 2.0 };
        assert_eq!(h.inf_on(-1.0, 3.0), 0.0);
        assert_eq!(h.inf_on(-3.0, -1.0), 2.0);
    }

    #[test]
    fn powerlaw_gamma_vs_quadrature() {
        for mu in [0.5, 1.0, 2.0, 4.0] {
            let k = powerlaw_asymptotic_constant(mu).unwrap();
            assert!((k.i_gamma - k.i_quadrature).abs() <= 1e-8, "I({mu})");
            assert!((k.j_gamma - k.j_quadrature).abs() <= 1e-8, "J({mu})");
            let cc = clenshaw_curtis::integrate(|x| (1.0 - x.powf(mu)).sqrt(), 0.0, 1.0, 1e-10).integral;
            assert!((cc - k.i_gamma).abs() <= 1e-6);
            assert!((k.limit - k.limit_from_i_j).abs() <= 1e-12 * k.limit);
        }
        let k2 = powerlaw_asymptotic_constant(2.0).unwrap();
        assert!((k2.i_gamma - PI / 4.0).abs() < 1e-15);
        let omega = 1.7;
        let c = omega / 2f64.sqrt();
        let coeff = k2.limit * c / omega;
        assert!((coeff - 3f64.sqrt() / (8.0 * PI)).abs() <= 1e-10);
    }

    #[test]
    fn powerlaw_bound_flags_and_scaling() {
        let r = powerlaw_bound(2.0, 1.0, 1.0, 1_000_000).unwrap();
        assert_eq!(r.flag("asymptotic_regime"), Some(true));
        let xi = xi_h(1.0).unwrap();
        let n = (10.0 / xi).round() as u64;
        let c = 10.0 / (xi * n as f64);
        let low = powerlaw_bound(2.0, c, 1.0, n).unwrap();
        assert!((low.diagnostic("ratio_xi_c_N").unwrap() - 10.0).abs() < 1e-9);
        assert_eq!(low.flag("asymptotic_regime"), Some(false));
        for mu in [0.5, 1.0, 2.0, 3.0] {
            let a = powerlaw_bound(mu, 0.8, 2.0, 1000).unwrap().value;
            let b = powerlaw_bound(mu, 0.8, 2.0, 2000).unwrap().value;
            let e = (3.0 * mu + 2.0) / (mu + 2.0);
            assert!((b / a - 2f64.powf(e)).abs() <= 1e-12 * 2f64.powf(e));
        }
        let omega = 1.0;
        let r = powerlaw_bound(2.0, omega / 2f64.sqrt(), 3.0, 1000).unwrap();
        let expect = 3f64.sqrt() / (8.0 * PI) * xi_h(3.0).unwrap() * omega * 1e6;
        assert!((r.value - expect).abs() <= 1e-10 * expect);
    }
}
