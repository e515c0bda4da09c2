//! Brute-force eigenvalue solvers for the two-body relative problems and the radial Coulomb
//! annulus, plus the evaluator for the counterexample that needs the leaf-averaged density.

use crate::error::{Error, Result};
use crate::exclusion::{xi_h, ConstantsRegistry, XI_H_MAX_ALPHA};
use crate::special::{find_root, CompensatedSum, RootBracket};
use serde::Serialize;

pub const MIN_GRID: usize = 64;
pub const MIN_ANNULUS_GRID: usize = 256;
/// Relative residual ‖Au − λBu‖ / (‖A‖∞‖u‖) accepted from the tridiagonal solver.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenResult {
    pub lambda_min: f64,
    pub grid_size: usize,
    pub residual: f64,
}

/// Quadratic forms Σ e_i(u_{i+1} − u_i)² + Σ q_i u_i² over Σ m_i u_i² on a line of nodes.
#[derive(Debug, Clone)]
pub(crate) struct TridiagonalPencil {
    edge: Vec<f64>,
    pot: Vec<f64>,
    mass: Vec<f64>,
}

impl TridiagonalPencil {
    fn new(edge: Vec<f64>, pot: Vec<f64>, mass: Vec<f64>) -> Self {
        debug_assert_eq!(edge.len() + 1, pot.len());
        debug_assert_eq!(pot.len(), mass.len());
        Self { edge, pot, mass }
    }

    fn len(&self) -> usize {
        self.mass.len()
    }

    fn diag(&self, i: usize) -> f64 {
        let left = if i > 0 { self.edge[i - 1] } else { 0.0 };
        let right = if i + 1 < self.len() { self.edge[i] } else { 0.0 };
        left + right + self.pot[i]
    }

    fn energy(&self, u: &[f64]) -> f64 {
        let mut s = CompensatedSum::default();
        for (i, e) in self.edge.iter().enumerate() {
            let d = u[i + 1] - u[i];
            s.add(e * d * d);
        }
        for (q, v) in self.pot.iter().zip(u) {
            s.add(q * v * v);
        }
        s.value()
    }

    fn mass_norm(&self, u: &[f64]) -> f64 {
        let mut s = CompensatedSum::default();
        for (m, v) in self.mass.iter().zip(u) {
            s.add(m * v * v);
        }
        s.value()
    }

    fn rayleigh(&self, u: &[f64]) -> f64 {
        self.energy(u) / self.mass_norm(u)
    }

    /// Number of generalized eigenvalues below σ (inertia of A − σB).
    fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut d = self.diag(0) - sigma * self.mass[0];
        for i in 0..self.len() {
            if i > 0 {
                let b = self.edge[i - 1];
                d = self.diag(i) - sigma * self.mass[i] - b * b / d;
            }
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Solves (A − σB)x = rhs by the Thomas algorithm.
    fn shifted_solve(&self, sigma: f64, rhs: &mut [f64]) {
        let n = self.len();
        let mut piv = vec![0.0; n];
        piv[0] = self.diag(0) - sigma * self.mass[0];
        for i in 1..n {
            let b = -self.edge[i - 1];
            let l = b / piv[i - 1];
            piv[i] = self.diag(i) - sigma * self.mass[i] - l * b;
            rhs[i] -= l * rhs[i - 1];
        }
        rhs[n - 1] /= piv[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] + self.edge[i] * rhs[i + 1]) / piv[i];
        }
    }

    fn relative_residual(&self, u: &[f64], lambda: f64) -> f64 {
        let n = self.len();
        let mut r2 = 0.0;
        let mut u2 = 0.0;
        let mut norm_a = 0.0_f64;
        for i in 0..n {
            let mut au = self.diag(i) * u[i];
            let mut row = self.diag(i).abs();
            if i > 0 {
                au -= self.edge[i - 1] * u[i - 1];
                row += self.edge[i - 1].abs();
            }
            if i + 1 < n {
                au -= self.edge[i] * u[i + 1];
                row += self.edge[i].abs();
            }
            let r = au - lambda * self.mass[i] * u[i];
            r2 += r * r;
            u2 += u[i] * u[i];
            norm_a = norm_a.max(row + lambda.abs() * self.mass[i]);
        }
        r2.sqrt() / (norm_a * u2.sqrt())
    }

    /// Lowest generalized eigenvalue: Sturm bisection to a bracket, then shifted inverse
    /// iteration and the Rayleigh quotient of the energy form.
    fn lowest(&self) -> Result<(f64, Vec<f64>, f64)> {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut scale = 0.0_f64;
        for i in 0..n {
            let left = if i > 0 {
                self.edge[i - 1].abs() / (self.mass[i] * self.mass[i - 1]).sqrt()
            } else {
                0.0
            };
            let right = if i + 1 < n {
                self.edge[i].abs() / (self.mass[i] * self.mass[i + 1]).sqrt()
            } else {
                0.0
            };
            let c = self.diag(i) / self.mass[i];
            lo = lo.min(c - left - right);
            scale = scale.max(c.abs() + left + right);
        }
        let ones = vec![1.0; n];
        let mut hi = self.rayleigh(&ones);
        let pad = 1e-12 * scale.max(1.0);
        lo -= pad;
        hi += pad;
        while self.count_below(hi) == 0 {
            hi += (hi - lo).max(pad);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if self.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-10 * (lo.abs() + hi.abs()) + 1e-15 * scale {
                break;
            }
        }
        let sigma = lo - (hi - lo) - 1e-15 * scale;
        let mut x = ones;
        for _ in 0..6 {
            let mut rhs: Vec<f64> = x.iter().zip(&self.mass).map(|(v, m)| v * m).collect();
            self.shifted_solve(sigma, &mut rhs);
            let norm = rhs.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::SearchFailure("inverse iteration broke down".into()));
            }
            x = rhs.into_iter().map(|v| v / norm).collect();
        }
        let lambda = self.rayleigh(&x);
        let residual = self.relative_residual(&x, lambda);
        if !(residual <= EIGEN_TOLERANCE) {
            return Err(Error::SearchFailure(format!(
                "eigen residual {residual} exceeds {EIGEN_TOLERANCE}"
            )));
        }
        Ok((lambda, x, residual))
    }
}

fn trapezoid_weights(n_nodes: usize) -> impl Iterator<Item = f64> {
    (0..n_nodes).map(move |i| if i == 0 || i + 1 == n_nodes { 0.5 } else { 1.0 })
}

/// Even-sector ground state of −d²/dr² + 2ηδ₀ on (−l, l) with Neumann ends:
/// −u″ = λu on (0, l), u′(0) = ηu(0), u′(l) = 0, on n uniform intervals.
pub fn ll_neumann_ground_energy(eta: f64, l: f64, n: usize) -> Result<EigenResult> {
    if n < MIN_GRID {
        return Err(Error::InvalidInput(format!("grid size must be ≥ {MIN_GRID}, got {n}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidInput(format!("half-length must be positive, got {l}")));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidInput(format!("η must be finite and ≥ 0, got {eta}")));
    }
    let h = l / n as f64;
    let edge = vec![1.0 / h; n];
    let mut pot = vec![0.0; n + 1];
    pot[0] = eta;
    let mass = trapezoid_weights(n + 1).map(|w| w * h).collect();
    let (lambda, _, residual) = TridiagonalPencil::new(edge, pot, mass).lowest()?;
    Ok(EigenResult {
        lambda_min: lambda.max(0.0),
        grid_size: n,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingParams {
    /// RK4 steps in t = ln r between r₀ and l.
    pub steps: usize,
    /// r₀ / l, where the power-series start hands over to the integrator.
    pub start_fraction: f64,
    /// Scan step in s = √λ·l.
    pub scan_step: f64,
}

impl Default for ShootingParams {
    fn default() -> Self {
        Self {
            steps: 20_000,
            start_fraction: 1e-3,
            scan_step: 0.05,
        }
    }
}

/// Neumann defect α·w(l) + l·w′(l) of the regular solution u = r^α w with λ = s²/l².
fn cs_shoot(alpha: f64, s: f64, p: &ShootingParams) -> f64 {
    // Scale-free form: l = 1, λ = s².
    let lambda = s * s;
    let r0 = p.start_fraction;
    let mut w = 0.0;
    let mut rw = 0.0;
    let mut a = 1.0;
    let r2 = r0 * r0;
    let mut pow = 1.0;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            a *= -lambda / (2.0 * kf * (2.0 * kf + 2.0 * alpha - 1.0));
            pow *= r2;
        }
        let t = a * pow;
        w += t;
        rw += 2.0 * k as f64 * t;
        if k > 2 && t.abs() < 1e-18 * w.abs() {
            break;
        }
    }
    let t0 = r0.ln();
    let dt = -t0 / p.steps as f64;
    let c = 1.0 - 2.0 * alpha;
    let rhs = |t: f64, y: f64, q: f64| {
        let r = t.exp();
        (q, c * q - lambda * r * r * y)
    };
    let (mut y, mut q) = (w, rw);
    for i in 0..p.steps {
        let t = t0 + dt * i as f64;
        let (k1y, k1q) = rhs(t, y, q);
        let (k2y, k2q) = rhs(t + 0.5 * dt, y + 0.5 * dt * k1y, q + 0.5 * dt * k1q);
        let (k3y, k3q) = rhs(t + 0.5 * dt, y + 0.5 * dt * k2y, q + 0.5 * dt * k2q);
        let (k4y, k4q) = rhs(t + dt, y + dt * k3y, q + dt * k3q);
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    }
    alpha * y + q
}

/// Lowest Neumann eigenvalue of −u″ + α(α−1)r⁻²u on (0, l) on the regular branch u ~ r^α,
/// by shooting in s = √λ·l.
pub fn cs_neumann_ground_energy(alpha: f64, l: f64, params: &ShootingParams) -> Result<EigenResult> {
    if !(0.6..=XI_H_MAX_ALPHA).contains(&alpha) {
        return Err(Error::InvalidInput(format!(
            "α must lie in [0.6, {XI_H_MAX_ALPHA}], got {alpha}"
        )));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidInput(format!("length must be positive, got {l}")));
    }
    if params.steps < MIN_GRID
        || !(params.start_fraction > 0.0 && params.start_fraction < 0.1)
        || !(params.scan_step > 0.0)
    {
        return Err(Error::InvalidInput(format!("invalid shooting parameters {params:?}")));
    }
    let g = |s: f64| cs_shoot(alpha, s, params);
    let s_max = 3.0 * (alpha + 10.0);
    let mut a = 0.0;
    let mut ga = g(a);
    while a < s_max {
        let b = a + params.scan_step;
        let gb = g(b);
        if ga * gb < 0.0 {
            let s = find_root(g, RootBracket::new(a, b, ga, gb)?, 1e-13)?;
            let y_scale = alpha.abs() + 1.0;
            return Ok(EigenResult {
                lambda_min: s * s / (l * l),
                grid_size: params.steps,
                residual: g(s).abs() / y_scale,
            });
        }
        a = b;
        ga = gb;
    }
    Err(Error::SearchFailure(format!(
        "shooting found no Neumann root for α = {alpha} below s = {s_max}"
    )))
}

/// Lowest eigenvalue of −μ(v″ + v′/r) − v/r = λv on [δ, ε] with Neumann ends, from the
/// weighted form ∫(μv′² − v²/r) r dr over ∫v² r dr on n uniform intervals.
pub fn radial_coulomb_annulus_ground(mu: f64, eps: f64, delta: f64, n: usize) -> Result<EigenResult> {
    if n < MIN_ANNULUS_GRID {
        return Err(Error::InvalidInput(format!(
            "grid size must be ≥ {MIN_ANNULUS_GRID}, got {n}"
        )));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidInput(format!("μ must be positive, got {mu}")));
    }
    if !(delta > 0.0 && delta < eps && eps.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 < δ < ε, got δ = {delta}, ε = {eps}"
        )));
    }
    let h = (eps - delta) / n as f64;
    let r = |i: usize| delta + h * i as f64;
    let edge = (0..n).map(|i| mu * (r(i) + 0.5 * h) / h).collect();
    let w: Vec<f64> = trapezoid_weights(n + 1).collect();
    let pot = w.iter().map(|wi| -h * wi).collect();
    let mass = w.iter().enumerate().map(|(i, wi)| h * wi * r(i)).collect();
    let (lambda, _, residual) = TridiagonalPencil::new(edge, pot, mass).lowest()?;
    Ok(EigenResult {
        lambda_min: lambda,
        grid_size: n,
        residual,
    })
}

/// A nonnegative profile on [−1, 1] sampled on a uniform grid, with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    h: f64,
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

fn trapezoid(h: f64, v: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = v.collect();
    let n = vals.len();
    let mut s = CompensatedSum::default();
    for (i, x) in vals.iter().enumerate() {
        s.add(if i == 0 || i + 1 == n { 0.5 * x } else { *x });
    }
    h * s.value()
}

impl Bump {
    /// c·exp(−1/(1−x²)) normalized in L² by the same trapezoid rule used downstream.
    pub fn standard(points: usize) -> Result<Self> {
        if points < 3 {
            return Err(Error::InvalidInput("a bump needs at least 3 samples".into()));
        }
        let h = 2.0 / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| -1.0 + h * i as f64).collect();
        let raw: Vec<f64> = xs
            .iter()
            .map(|&x| {
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            })
            .collect();
        let draw: Vec<f64> = xs
            .iter()
            .zip(&raw)
            .map(|(&x, &p)| {
                if x.abs() < 1.0 {
                    p * (-2.0 * x / (1.0 - x * x).powi(2))
                } else {
                    0.0
                }
            })
            .collect();
        let c = 1.0 / trapezoid(h, raw.iter().map(|p| p * p)).sqrt();
        Ok(Self {
            h,
            phi: raw.iter().map(|p| c * p).collect(),
            dphi: draw.iter().map(|p| c * p).collect(),
        })
    }

    /// Uniform samples on [−1, 1] including both endpoints; φ′ by central differences.
    pub fn from_samples(phi: Vec<f64>) -> Result<Self> {
        let n = phi.len();
        if n < 3 {
            return Err(Error::InvalidInput("a bump needs at least 3 samples".into()));
        }
        let h = 2.0 / (n - 1) as f64;
        let mut dphi = vec![0.0; n];
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { phi[i - 1] };
            let right = if i + 1 == n { 0.0 } else { phi[i + 1] };
            dphi[i] = (right - left) / (2.0 * h);
        }
        Ok(Self { h, phi, dphi })
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        trapezoid(self.h, self.phi.iter().map(|p| p * p))
    }

    pub fn dirichlet_energy(&self) -> f64 {
        trapezoid(self.h, self.dphi.iter().map(|p| p * p))
    }

    pub fn sixth_moment(&self) -> f64 {
        trapezoid(self.h, self.phi.iter().map(|p| p.powi(6)))
    }

    fn validate(&self) -> Result<()> {
        if self.phi.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput("bump must be finite and nonnegative".into()));
        }
        let tail = self.phi[0].max(self.phi[self.len() - 1]);
        if tail > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "bump must vanish at ±1, endpoint value {tail}"
            )));
        }
        let norm = self.l2_norm_sq();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidInput(format!("bump must satisfy ∫φ² = 1, got {norm}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleGap {
    pub lhs_upper: f64,
    pub rhs: f64,
    pub dirichlet_energy: f64,
    pub sixth_moment: f64,
    pub xi_h: f64,
}

impl CounterexampleGap {
    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs_upper
    }
}

/// Upper bound on the kinetic energy of the product trial state with all N particles in one
/// bump of width ε, against the density-functional right-hand side C_H ξ_H² ∫ρ³.
pub fn counterexample_gap(n: u64, alpha: f64, epsilon: f64, bump: &Bump) -> Result<CounterexampleGap> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("N must be ≥ 2, got {n}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::InvalidInput(format!("α must be ≥ 1, got {alpha}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(Error::InvalidInput(format!("ε must lie in (0, 1/3), got {epsilon}")));
    }
    bump.validate()?;
    let nf = n as f64;
    let d = bump.dirichlet_energy();
    let six = bump.sixth_moment();
    let xi = xi_h(alpha)?;
    let lhs_upper = nf * d / (epsilon * epsilon) + 4.5 * alpha * (alpha - 1.0) * nf * (nf - 1.0);
    let rhs = nf * ConstantsRegistry::C_H * xi * xi * six / (epsilon * epsilon);
    Ok(CounterexampleGap {
        lhs_upper,
        rhs,
        dirichlet_energy: d,
        sixth_moment: six,
        xi_h: xi,
    })
}

/// ε = ½·√(C_H∫φ⁶ / (9(N−1))), so that ε⁻²N C_H∫φ⁶ = 36N(N−1) > 9N(N−1); capped below 1/3.
pub fn counterexample_default_epsilon(n: u64, bump: &Bump) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("N must be ≥ 2, got {n}")));
    }
    let e = 0.5 * (ConstantsRegistry::C_H * bump.sixth_moment() / (9.0 * (n - 1) as f64)).sqrt();
    Ok(e.min(0.3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaStar {
    pub alpha_star: f64,
    /// Upper end of the searched range, min(alpha_max, largest supported α).
    pub alpha_searched_max: f64,
    /// rhs > lhs at every sampled α above α* in the searched range.
    pub dominates_beyond: bool,
    pub at_star: CounterexampleGap,
}

/// First α ≥ 1 at which the right-hand side overtakes the trial-state energy.
pub fn counterexample_alpha_star(n: u64, epsilon: f64, bump: &Bump, alpha_max: f64) -> Result<AlphaStar> {
    if !(alpha_max > 1.0) {
        return Err(Error::InvalidInput(format!("alpha_max must exceed 1, got {alpha_max}")));
    }
    let top = alpha_max.min(XI_H_MAX_ALPHA);
    let gap = |a: f64| counterexample_gap(n, a, epsilon, bump).map(|g| g.gap());
    let steps = ((top - 1.0) / 0.25).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| (1.0 + 0.25 * k as f64).min(top)).collect();
    let values = grid.iter().map(|&a| gap(a)).collect::<Result<Vec<f64>>>()?;
    let first = (1..grid.len()).find(|&k| values[k - 1] <= 0.0 && values[k] > 0.0);
    let star = match (values[0] > 0.0, first) {
        (true, _) => 1.0,
        (false, Some(k)) => {
            if values[k - 1] == 0.0 {
                grid[k - 1]
            } else {
                let f = |a: f64| gap(a).unwrap_or(f64::NAN);
                find_root(
                    f,
                    RootBracket::new(grid[k - 1], grid[k], values[k - 1], values[k])?,
                    1e-10,
                )?
            }
        }
        (false, None) => {
            return Err(Error::SearchFailure(format!(
                "right-hand side never exceeds the trial energy for α ≤ {top}"
            )))
        }
    };
    let dominates_beyond = grid
        .iter()
        .zip(&values)
        .filter(|(a, _)| **a > star)
        .all(|(_, v)| *v > 0.0);
    Ok(AlphaStar {
        alpha_star: star,
        alpha_searched_max: top,
        dominates_beyond,
        at_star: counterexample_gap(n, star, epsilon, bump)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exclusion::xi_s;
    use std::f64::consts::PI;

    #[test]
    fn ll_bosons_have_zero_energy() {
        let r = ll_neumann_ground_energy(0.0, 1.0, 200).unwrap();
        assert!(r.lambda_min.abs() < 1e-12);
    }

    #[test]
    fn ll_dirichlet_limit() {
        let r = ll_neumann_ground_energy(1e8, 1.0, 100_000).unwrap();
        assert!((r.lambda_min - PI * PI / 4.0).abs() < 1e-2);
    }

    #[test]
    fn ll_matches_xi_s() {
        let r = ll_neumann_ground_energy(1.0, 1.0, 100_000).unwrap();
        let x = xi_s(1.0).unwrap();
        assert!((r.lambda_min - x * x).abs() <= 1e-3 * x * x);
        assert!(r.residual <= EIGEN_TOLERANCE);
    }

    #[test]
    fn ll_depends_only_on_eta_l() {
        let a = ll_neumann_ground_energy(2.0, 1.0, 4096).unwrap();
        let b = ll_neumann_ground_energy(1.0, 2.0, 4096).unwrap();
        assert!((a.lambda_min * 1.0 - b.lambda_min * 4.0).abs() < 1e-6);
    }

    #[test]
    fn ll_second_order_convergence() {
        let x = xi_s(1.0).unwrap().powi(2);
        let e1 = (ll_neumann_ground_energy(1.0, 1.0, 200).unwrap().lambda_min - x).abs();
        let e2 = (ll_neumann_ground_energy(1.0, 1.0, 400).unwrap().lambda_min - x).abs();
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn ll_rejects_bad_grid() {
        assert!(ll_neumann_ground_energy(1.0, 1.0, 10).is_err());
        assert!(ll_neumann_ground_energy(1.0, 0.0, 100).is_err());
    }

    #[test]
    fn cs_examples() {
        let p = ShootingParams::default();
        let r = cs_neumann_ground_energy(1.0, 1.0, &p).unwrap();
        assert!((r.lambda_min - PI * PI / 4.0).abs() < 1e-8);
        let r = cs_neumann_ground_energy(1.0, 2.0, &p).unwrap();
        assert!((r.lambda_min - PI * PI / 16.0).abs() < 1e-8);
        let r = cs_neumann_ground_energy(2.0, 1.0, &p).unwrap();
        assert!(r.lambda_min >= PI * PI / 4.0 + 2.0);
        assert!(cs_neumann_ground_energy(0.5, 1.0, &p).is_err());
    }

    #[test]
    fn cs_scale_invariance() {
        let p = ShootingParams::default();
        let a = cs_neumann_ground_energy(2.5, 1.0, &p).unwrap().lambda_min;
        let b = cs_neumann_ground_energy(2.5, 3.0, &p).unwrap().lambda_min * 9.0;
        assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn cs_matches_xi_h() {
        let p = ShootingParams::default();
        for alpha in [0.6, 1.5, 3.0, 20.0] {
            let r = cs_neumann_ground_energy(alpha, 1.0, &p).unwrap();
            let x = xi_h(alpha).unwrap().powi(2);
            assert!((r.lambda_min - x).abs() <= 1e-6 * x, "α = {alpha}");
        }
    }

    #[test]
    fn annulus_examples() {
        let r = radial_coulomb_annulus_ground(1e6, 1.0, 1e-3, 2048).unwrap();
        assert!(r.lambda_min >= -(1e-6 + 2.0) * 1.01);
        let r = radial_coulomb_annulus_ground(1.0, 1.0, 0.5, 1024).unwrap();
        assert!(r.lambda_min >= -3.0);
        let r = radial_coulomb_annulus_ground(1e9, 2.0, 0.01, 1024).unwrap();
        assert!(r.lambda_min >= -(1.0 + 1e-9) * 1.01);
        // Constant mode in the stiff limit: −∫dr / ∫r dr = −2/(ε + δ).
        assert!((r.lambda_min + 2.0 / 2.01).abs() < 1e-6);
    }

    #[test]
    fn annulus_bound_uniform_in_delta() {
        for &mu in &[0.01, 0.1, 1.0, 10.0] {
            for &eps in &[0.1, 1.0, 5.0] {
                let bound = -(1.0 / mu + 2.0 / eps);
                for k in 1..=6 {
                    let delta = eps * 10f64.powi(-k);
                    let r = radial_coulomb_annulus_ground(mu, eps, delta, 4096).unwrap();
                    assert!(
                        r.lambda_min >= bound - 1e-2 * bound.abs(),
                        "μ={mu} ε={eps} δ={delta}: {} < {bound}",
                        r.lambda_min
                    );
                }
            }
        }
    }

    #[test]
    fn annulus_rejects_bad_geometry() {
        assert!(radial_coulomb_annulus_ground(1.0, 1.0, 1.0, 512).is_err());
        assert!(radial_coulomb_annulus_ground(1.0, 1.0, 0.1, 100).is_err());
        assert!(radial_coulomb_annulus_ground(0.0, 1.0, 0.1, 512).is_err());
    }

    #[test]
    fn standard_bump_is_normalized() {
        let b = Bump::standard(4001).unwrap();
        assert!((b.l2_norm_sq() - 1.0).abs() < 1e-12);
        assert!(b.dirichlet_energy() > 0.0 && b.sixth_moment() > 0.0);
        // Independent derivative route: central differences of the samples.
        let fd = Bump::from_samples(b.phi.clone()).unwrap();
        assert!((fd.dirichlet_energy() - b.dirichlet_energy()).abs() < 1e-4 * b.dirichlet_energy());
    }

    #[test]
    fn counterexample_examples() {
        let b = Bump::standard(4001).unwrap();
        let g = counterexample_gap(3, 1.0, 0.1, &b).unwrap();
        assert!(g.lhs_upper.is_finite() && g.lhs_upper > 0.0);
        assert!(g.rhs.is_finite() && g.rhs > 0.0);
        let g1 = counterexample_gap(2, 1.0, 0.3, &b).unwrap();
        let g2 = counterexample_gap(2, 1.0, 0.15, &b).unwrap();
        // α = 1 removes the pair term, leaving only the ε⁻² kinetic part.
        assert!((g2.lhs_upper / g1.lhs_upper - 4.0).abs() < 0.04);
        assert!(counterexample_gap(3, 1.0, 0.34, &b).is_err());
        let bad = Bump::from_samples(vec![0.0, 2.0, 0.0]).unwrap();
        assert!(counterexample_gap(3, 1.0, 0.1, &bad).is_err());
    }

    #[test]
    fn counterexample_threshold_exists() {
        let b = Bump::standard(4001).unwrap();
        let eps = counterexample_default_epsilon(3, &b).unwrap();
        let s = counterexample_alpha_star(3, eps, &b, 100.0).unwrap();
        assert!(s.alpha_star.is_finite() && s.alpha_star > 1.0);
        assert!(s.dominates_beyond);
        assert!(s.at_star.gap().abs() < 1e-6 * s.at_star.rhs);
        let above = counterexample_gap(3, s.alpha_star + 1.0, eps, &b).unwrap();
        assert!(above.rhs > above.lhs_upper);
    }
}
