//! Exclusion strengths ξ_S and ξ_H, their closed-form approximations, the anyon constant
//! C_{α,N}, and the registry of fixed constants.

use crate::error::{domain, Error, Result};
use crate::special::{find_root, first_bessel_zero, first_root_by_scan, jv, jv_prime, RootBracket};
use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

pub const XI_H_MAX_ALPHA: f64 = 50.0;
const XI_S_ASYMPTOTIC_Y: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatisticsKind {
    LiebLiniger,
    CalogeroSutherland,
    Anyon,
}

/// Reduced fraction μ/ν with ν ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub mu: i64,
    pub nu: i64,
}

impl Fraction {
    pub fn new(mu: i64, nu: i64) -> Result<Self> {
        if nu < 1 {
            return Err(Error::InvalidInput(format!("denominator must be positive, got {nu}")));
        }
        if mu.unsigned_abs().gcd(&nu.unsigned_abs()) != 1 {
            return Err(Error::InvalidInput(format!("{mu}/{nu} is not in lowest terms")));
        }
        Ok(Self { mu, nu })
    }

    pub fn value(&self) -> f64 {
        self.mu as f64 / self.nu as f64
    }

    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new_raw(self.mu, self.nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatisticsParams {
    pub kind: StatisticsKind,
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
    pub fraction: Option<Fraction>,
}

impl StatisticsParams {
    pub fn lieb_liniger(eta: f64) -> Result<Self> {
        if !(eta >= 0.0) {
            return Err(Error::InvalidInput(format!("η must be ≥ 0, got {eta}")));
        }
        Ok(Self {
            kind: StatisticsKind::LiebLiniger,
            eta: Some(eta),
            alpha: None,
            fraction: None,
        })
    }

    pub fn calogero_sutherland(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("α must be finite and ≥ 0, got {alpha}")));
        }
        Ok(Self {
            kind: StatisticsKind::CalogeroSutherland,
            eta: None,
            alpha: Some(alpha),
            fraction: None,
        })
    }

    pub fn anyon(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("α must be finite, got {alpha}")));
        }
        Ok(Self {
            kind: StatisticsKind::Anyon,
            eta: None,
            alpha: Some(alpha),
            fraction: None,
        })
    }

    pub fn anyon_fraction(mu: i64, nu: i64) -> Result<Self> {
        let fraction = Fraction::new(mu, nu)?;
        Ok(Self {
            kind: StatisticsKind::Anyon,
            eta: None,
            alpha: Some(fraction.value()),
            fraction: Some(fraction),
        })
    }
}

/// Fixed constants plus the user-selected anyon constant C_A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsRegistry {
    c_a: f64,
}

impl Default for ConstantsRegistry {
    fn default() -> Self {
        Self { c_a: Self::C_A_LOWER }
    }
}

impl ConstantsRegistry {
    pub const C_S_LOWER: f64 = 1.0 / 30720.0;
    pub const C_S_UPPER: f64 = 2.0 / 3.0;
    pub const C_H: f64 = 1.0 / 32.0;
    pub const C_H_UPPER: f64 = 2.0 / 3.0;
    pub const C_A_LOWER: f64 = 1e-4;
    pub const C_A_UPPER: f64 = PI;
    pub const C_1: f64 = 2.0 / PI;
    pub const C_1_PRIME: f64 = PI * PI / 60.0;
    pub const C_OMEGA_DISK: f64 = 0.169;
    pub const C_OMEGA_SQUARE: f64 = 0.112;

    /// Proof constants of the Lieb-Liniger density bound; C_S = min{c₁, c₂′, 4c₃/π²} = c₁.
    pub const LT_C1: f64 = 1.0 / 2048.0 / 15.0;
    pub const LT_C2: f64 = 11.0 / 30.0;
    pub const LT_C2_PRIME: f64 = 11.0 / 4096.0 / 15.0;
    pub const LT_C3: f64 = PI * PI * Self::LT_C1;
    /// Multiplicity constant of the A₁ intervals.
    pub const LT_C: f64 = 128.0;

    pub fn new(c_a: f64) -> Result<Self> {
        if !(Self::C_A_LOWER..=Self::C_A_UPPER).contains(&c_a) {
            return Err(Error::InvalidInput(format!(
                "C_A must lie in [{}, π], got {c_a}",
                Self::C_A_LOWER
            )));
        }
        Ok(Self { c_a })
    }

    pub fn c_a(&self) -> f64 {
        self.c_a
    }

    pub fn c_a_prime(&self) -> f64 {
        1.0 / (4.0 * self.c_a)
    }

    pub fn c_s(&self) -> f64 {
        Self::C_S_LOWER
    }

    /// C_S′ = (2/3)(3C_S)^{-1/2}.
    pub fn c_s_prime(&self) -> f64 {
        2.0 / 3.0 / (3.0 * Self::C_S_LOWER).sqrt()
    }

    /// Neumann counting constant C_d = d·2^d/π^d.
    pub fn c_d(d: u32) -> f64 {
        let d = d as f64;
        d * (2.0 / PI).powf(d)
    }

    /// C_d′ = (π²/4)·d^{2−2/d}/((d+2)(d+4)).
    pub fn c_d_prime(d: u32) -> f64 {
        let df = d as f64;
        PI * PI / 4.0 * df.powf(2.0 - 2.0 / df) / ((df + 2.0) * (df + 4.0))
    }
}

/// Smallest nonnegative root of ξ tan ξ = y; ξ_S(+∞) = π/2.
pub fn xi_s(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return domain(format!("ξ_S requires y ≥ 0, got {y}"));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == f64::INFINITY {
        return Ok(FRAC_PI_2);
    }
    if y > XI_S_ASYMPTOTIC_Y {
        return Ok(FRAC_PI_2 - FRAC_PI_2 / y);
    }
    let f = |t: f64| t * t.sin() - y * t.cos();
    let bracket = RootBracket::new(0.0, FRAC_PI_2, -y, f(FRAC_PI_2))?;
    find_root(f, bracket, 1e-15)
}

/// arctan √(y + 4y²/π²).
pub fn xi_s_approx(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return domain(format!("ξ_S approximation requires y ≥ 0, got {y}"));
    }
    if y == f64::INFINITY {
        return Ok(FRAC_PI_2);
    }
    Ok((y + 4.0 * y * y / (PI * PI)).sqrt().atan())
}

/// Smallest positive root of J_{α−1/2}(ξ) + 2ξJ′_{α−1/2}(ξ), with ξ_H(0) = 0.
pub fn xi_h(alpha: f64) -> Result<f64> {
    if !(0.0..=XI_H_MAX_ALPHA).contains(&alpha) {
        return domain(format!("ξ_H requires α in [0, {XI_H_MAX_ALPHA}], got {alpha}"));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let nu = alpha - 0.5;
    let zero = first_bessel_zero(nu)?;
    let f = |t: f64| jv(nu, t) + 2.0 * t * jv_prime(nu, t);
    let delta = 1e-8;
    let mut lo = delta;
    // J_ν(δ) underflows for large ν; move right until the leading power is representable.
    while !(f(lo) > 0.0) {
        lo *= 2.0;
        if lo >= 0.5 * zero {
            return Err(Error::SearchFailure(format!("no positive start for ξ_H({alpha})")));
        }
    }
    first_root_by_scan(f, lo, zero - delta, 400, 1e-14)
}

/// √(α + (π²/4 − 1)α²) for α in [0, 1].
pub fn xi_h_approx_small(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("small-α approximation requires α in [0, 1], got {alpha}"));
    }
    Ok((alpha + (PI * PI / 4.0 - 1.0) * alpha * alpha).sqrt())
}

/// √(π²/4 + α(α−1)) for α ≥ 1.
pub fn xi_h_lower(alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return domain(format!("large-α lower bound requires α ≥ 1, got {alpha}"));
    }
    Ok((PI * PI / 4.0 + alpha * (alpha - 1.0)).sqrt())
}

/// C_{α,N} = min over p in 0..=N−2 of the distance from (2p+1)α to the nearest even integer.
pub fn c_alpha_n(alpha: f64, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("C_(α,N) requires N ≥ 2, got {n}")));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidInput(format!("α must be finite, got {alpha}")));
    }
    let mut best = f64::INFINITY;
    for p in 0..=(n - 2) {
        let v = (2 * p + 1) as f64 * alpha;
        let d = (v - 2.0 * (v / 2.0).round()).abs();
        best = best.min(d);
        if best == 0.0 {
            break;
        }
    }
    Ok(best)
}

/// Exact rational C_{α,N} for α = μ/ν. The residue of (2p+1)μ mod 2ν has period ν in p.
pub fn c_alpha_n_exact(alpha: Fraction, n: u64) -> Result<Ratio<i64>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("C_(α,N) requires N ≥ 2, got {n}")));
    }
    let two_nu = 2 * alpha.nu;
    let last = (n - 2).min(alpha.nu as u64 - 1) as i64;
    let mut best = two_nu;
    for p in 0..=last {
        let r = ((2 * p + 1) * alpha.mu).rem_euclid(two_nu);
        best = best.min(r.min(two_nu - r));
        if best == 0 {
            break;
        }
    }
    Ok(Ratio::new(best, alpha.nu))
}

/// lim_{N→∞} C_{μ/ν,N}: 1/ν when μ is odd, 0 otherwise.
pub fn c_alpha_limit(mu: i64, nu: i64) -> Result<f64> {
    let f = Fraction::new(mu, nu)?;
    Ok(if f.mu.rem_euclid(2) == 1 {
        1.0 / f.nu as f64
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bisect_xi_tan(y: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2 - 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.tan() < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn registry_values() {
        assert_eq!(ConstantsRegistry::C_S_LOWER, 2f64.powi(-11) / 15.0);
        assert_eq!(ConstantsRegistry::LT_C1, ConstantsRegistry::C_S_LOWER);
        assert!(ConstantsRegistry::C_S_LOWER >= 3e-5);
        let c1_route = 2.0 / (PI * PI) * ConstantsRegistry::C_1_PRIME / 1024.0;
        assert!((c1_route - ConstantsRegistry::LT_C1).abs() < 1e-18);
        let c2_route = -2.0 / (PI * PI) * 4.0 * ConstantsRegistry::C_1_PRIME + 0.5;
        assert!((c2_route - ConstantsRegistry::LT_C2).abs() < 1e-15);
        let c2p = ConstantsRegistry::LT_C2 / (16.0 * ConstantsRegistry::LT_C);
        assert!((c2p - ConstantsRegistry::LT_C2_PRIME).abs() < 1e-18);
        let c3_route = 0.5 * ConstantsRegistry::C_1_PRIME / 256.0;
        assert!((c3_route - ConstantsRegistry::LT_C3).abs() < 1e-17);
        let c_s = ConstantsRegistry::LT_C1
            .min(ConstantsRegistry::LT_C2_PRIME)
            .min(4.0 * ConstantsRegistry::LT_C3 / (PI * PI));
        assert_eq!(c_s, ConstantsRegistry::C_S_LOWER);
        assert!((ConstantsRegistry::c_d_prime(1) - PI * PI / 60.0).abs() < 1e-15);
        assert!((ConstantsRegistry::c_d_prime(2) - PI * PI / 48.0).abs() < 1e-15);
        assert!((ConstantsRegistry::c_d_prime(1) - ConstantsRegistry::C_1_PRIME).abs() < 1e-15);
        assert!((ConstantsRegistry::c_d(1) - ConstantsRegistry::C_1).abs() < 1e-15);
        assert!((ConstantsRegistry::c_d(2) - 8.0 / (PI * PI)).abs() < 1e-15);
        for d in 1..6 {
            let df = d as f64;
            let via_c_d = df * df * ConstantsRegistry::c_d(d).powf(-2.0 / df) / ((df + 2.0) * (df + 4.0));
            assert!((via_c_d - ConstantsRegistry::c_d_prime(d)).abs() < 1e-14);
        }
        let r = ConstantsRegistry::default();
        assert_eq!(r.c_a(), 1e-4);
        assert_eq!(r.c_a_prime(), 2500.0);
        assert!(ConstantsRegistry::new(PI).is_ok());
        assert!(ConstantsRegistry::new(4.0).is_err());
        assert!(ConstantsRegistry::new(1e-5).is_err());
    }

    #[test]
    fn xi_s_examples() {
        assert_eq!(xi_s(0.0).unwrap(), 0.0);
        assert_eq!(xi_s(f64::INFINITY).unwrap(), FRAC_PI_2);
        let oracle = bisect_xi_tan(1.0);
        assert!((xi_s(1.0).unwrap() - oracle).abs() < 1e-12);
        assert!((xi_s(1.0).unwrap() - 0.860_333_589_019_379_8).abs() < 1e-12);
        assert!(xi_s(-1.0).is_err());
        assert!(xi_s(f64::NAN).is_err());
        let big = xi_s(1e13).unwrap();
        assert!(big < FRAC_PI_2 && FRAC_PI_2 - big < 1e-12);
        let below = xi_s(1e12).unwrap();
        assert!((below - (FRAC_PI_2 - FRAC_PI_2 / 1e12)).abs() < 1e-12);
    }

    #[test]
    fn xi_s_approx_examples() {
        assert_eq!(xi_s_approx(0.0).unwrap(), 0.0);
        assert!((xi_s_approx(1e9).unwrap() - FRAC_PI_2).abs() < 1e-4);
        assert_eq!(xi_s_approx(1.0).unwrap(), (1.0 + 4.0 / (PI * PI)).sqrt().atan());
    }

    #[test]
    fn xi_h_examples() {
        assert_eq!(xi_h(0.0).unwrap(), 0.0);
        assert!((xi_h(1.0).unwrap() - FRAC_PI_2).abs() < 1e-12);
        let r = xi_h(2.0).unwrap();
        assert!(r >= xi_h_lower(2.0).unwrap());
        assert!(r < first_bessel_zero(1.5).unwrap());
        assert!(xi_h(-0.1).is_err());
        assert!(xi_h(50.5).is_err());
    }

    #[test]
    fn xi_h_closed_form_at_three_halves() {
        // ν = 1: F = J₁ + 2ξJ₁′ = 2ξJ₀ − J₁; independent route through libm.
        let f = |t: f64| 2.0 * t * libm::j0(t) - libm::j1(t);
        let (mut lo, mut hi) = (1.0, 2.4);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((xi_h(1.5).unwrap() - lo).abs() < 1e-11);
    }

    #[test]
    fn xi_h_reference_values() {
        // mpmath roots of J_{α−1/2} + 2ξJ′_{α−1/2}.
        let cases = [
            (0.5, 0.9407705639497375),
            (2.0, 2.7437072699922673),
            (5.0, 6.0619493629823715),
            (10.0, 11.39100823370299),
            (20.0, 21.817482327392216),
            (50.0, 52.57266370834829),
        ];
        for (a, r) in cases {
            assert!((xi_h(a).unwrap() - r).abs() < 1e-10, "α = {a}");
        }
    }

    #[test]
    fn xi_h_approximations() {
        assert_eq!(xi_h_approx_small(0.0).unwrap(), 0.0);
        assert!((xi_h_approx_small(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(
            xi_h_approx_small(0.5).unwrap(),
            (0.5 + (PI * PI / 4.0 - 1.0) / 4.0).sqrt()
        );
        assert!(xi_h_approx_small(1.1).is_err());
        assert!((xi_h_lower(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(xi_h_lower(2.0).unwrap(), (PI * PI / 4.0 + 2.0).sqrt());
        assert_eq!(xi_h_lower(10.0).unwrap(), (PI * PI / 4.0 + 90.0).sqrt());
        assert!(xi_h_lower(0.9).is_err());
    }

    fn brute_c_alpha(alpha: f64, n: u64) -> f64 {
        let mut best = f64::INFINITY;
        for p in 0..=(n - 2) {
            let v = (2 * p + 1) as f64 * alpha;
            let qc = (v / 2.0).floor() as i64;
            for q in (qc - 3)..=(qc + 3) {
                best = best.min((v - 2.0 * q as f64).abs());
            }
        }
        best
    }

    #[test]
    fn c_alpha_examples() {
        for n in 2..20 {
            assert_eq!(c_alpha_n(1.0, n).unwrap(), 1.0);
        }
        assert!((c_alpha_n(1.0 / 3.0, 5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(c_alpha_n(2.0 / 3.0, 3).unwrap().abs() < 1e-15);
        assert!(c_alpha_n(0.5, 1).is_err());
        let third = Fraction::new(1, 3).unwrap();
        assert_eq!(c_alpha_n_exact(third, 5).unwrap(), Ratio::new(1, 3));
        assert_eq!(
            c_alpha_n_exact(Fraction::new(2, 3).unwrap(), 3).unwrap(),
            Ratio::from(0)
        );
        assert_eq!(
            c_alpha_n_exact(Fraction::new(2, 3).unwrap(), 2).unwrap(),
            Ratio::new(2, 3)
        );
    }

    #[test]
    fn c_alpha_limits() {
        assert_eq!(c_alpha_limit(1, 3).unwrap(), 1.0 / 3.0);
        assert_eq!(c_alpha_limit(2, 3).unwrap(), 0.0);
        assert_eq!(c_alpha_limit(1, 1).unwrap(), 1.0);
        assert_eq!(c_alpha_limit(-1, 3).unwrap(), 1.0 / 3.0);
        assert!(c_alpha_limit(2, 4).is_err());
        assert!(c_alpha_limit(1, 0).is_err());
    }

    #[test]
    fn odd_fractions_reach_their_limit() {
        for nu in 1..=20i64 {
            for mu in (-41..=41i64).filter(|m| m.rem_euclid(2) == 1) {
                if let Ok(f) = Fraction::new(mu, nu) {
                    assert_eq!(c_alpha_n_exact(f, 1000).unwrap(), Ratio::new(1, nu));
                }
            }
        }
    }

    #[test]
    fn statistics_params_validation() {
        assert!(StatisticsParams::lieb_liniger(-1.0).is_err());
        assert!(StatisticsParams::lieb_liniger(f64::INFINITY).is_ok());
        assert!(StatisticsParams::calogero_sutherland(-0.5).is_err());
        let a = StatisticsParams::anyon_fraction(1, 3).unwrap();
        assert_eq!(a.alpha, Some(1.0 / 3.0));
        assert!(StatisticsParams::anyon_fraction(3, 9).is_err());
    }

    proptest! {
        #[test]
        fn xi_s_solves_equation(y in 1e-6f64..1e6) {
            let x = xi_s(y).unwrap();
            prop_assert!((0.0..FRAC_PI_2).contains(&x));
            prop_assert!((x * x.tan() - y).abs() <= 1e-9 * y.max(1.0) * (1.0 + y));
        }

        #[test]
        fn xi_s_monotone(y in 0.0f64..1e4, dy in 0.0f64..10.0) {
            prop_assert!(xi_s(y + dy).unwrap() >= xi_s(y).unwrap() - 1e-15);
        }

        #[test]
        fn c_alpha_matches_q_loop(alpha in -5.0f64..5.0, n in 2u64..40) {
            prop_assert!((c_alpha_n(alpha, n).unwrap() - brute_c_alpha(alpha, n)).abs() < 1e-12);
        }

        #[test]
        fn c_alpha_nonincreasing_in_n(alpha in -5.0f64..5.0, n in 2u64..200) {
            prop_assert!(c_alpha_n(alpha, n + 1).unwrap() <= c_alpha_n(alpha, n).unwrap());
        }

        #[test]
        fn c_alpha_period_two(alpha in -5.0f64..5.0, n in 2u64..200) {
            let a = c_alpha_n(alpha + 2.0, n).unwrap();
            let b = c_alpha_n(alpha, n).unwrap();
            prop_assert!((a - b).abs() < 1e-11);
        }

        #[test]
        fn c_alpha_exact_agrees_with_float(mu in -60i64..60, nu in 1i64..30, n in 2u64..100) {
            if let Ok(f) = Fraction::new(mu, nu) {
                let e = c_alpha_n_exact(f, n).unwrap();
                let v = *e.numer() as f64 / *e.denom() as f64;
                prop_assert!((c_alpha_n(f.value(), n).unwrap() - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn xi_h_above_lower_bound() {
        for k in 0..50 {
            let a = 1.0 + 49.0 * k as f64 / 49.0;
            assert!(xi_h(a).unwrap() >= xi_h_lower(a).unwrap(), "α = {a}");
        }
    }

    #[test]
    fn schroedinger_properties() {
        let ys: Vec<f64> = (0..1000).map(|k| 0.01 * k as f64).collect();
        let sq: Vec<f64> = ys.iter().map(|&y| xi_s(y).unwrap().powi(2)).collect();
        for w in sq.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        for i in 0..ys.len() {
            for j in ((i + 2)..ys.len()).step_by(2) {
                let mid = xi_s(0.5 * (ys[i] + ys[j])).unwrap().powi(2);
                assert!(mid >= 0.5 * (sq[i] + sq[j]) - 1e-9);
            }
        }
        for eta in [0.1, 1.0, 10.0] {
            let g = |x: f64| xi_s(eta / x).unwrap().powi(2) * x.powi(3);
            let xs: Vec<f64> = (1..=1000).map(|k| 0.01 * k as f64).collect();
            let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
            for w in gs.windows(2) {
                assert!(w[1] >= w[0] - 1e-9);
            }
            for i in (0..xs.len()).step_by(7) {
                for j in ((i + 2)..xs.len()).step_by(6) {
                    let mid = g(0.5 * (xs[i] + xs[j]));
                    assert!(mid <= 0.5 * (gs[i] + gs[j]) + 1e-9);
                }
            }
            let base = xi_s(eta).unwrap().powi(2);
            for k in 0..1000 {
                let x = 1.0 + 0.05 * k as f64;
                assert!(xi_s(eta / x).unwrap().powi(2) * x >= base - 1e-9);
            }
        }
    }
}
