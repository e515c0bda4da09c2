//! Gamma and real-order Bessel functions, plus a safeguarded bracketing root finder.

use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

pub const BESSEL_MIN_ORDER: f64 = -0.5;
pub const BESSEL_MAX_ORDER: f64 = 60.0;
pub const BESSEL_MAX_ARG: f64 = 200.0;
pub const GAMMA_MAX_ARG: f64 = 100.0;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// Γ(x) for x in (0, 100].
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= GAMMA_MAX_ARG) {
        return domain(format!("gamma_fn requires x in (0, {GAMMA_MAX_ARG}], got {x}"));
    }
    Ok(gamma_unchecked(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("ln_gamma requires finite x > 0, got {x}"));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x <= GAMMA_MAX_ARG {
        return gamma_unchecked(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_bessel_domain(order: f64, x: f64) -> Result<()> {
    if !(BESSEL_MIN_ORDER..=BESSEL_MAX_ORDER).contains(&order) {
        return domain(format!(
            "Bessel order must lie in [{BESSEL_MIN_ORDER}, {BESSEL_MAX_ORDER}], got {order}"
        ));
    }
    if !(0.0..=BESSEL_MAX_ARG).contains(&x) {
        return domain(format!("Bessel argument must lie in [0, {BESSEL_MAX_ARG}], got {x}"));
    }
    Ok(())
}

/// J_ν(x) for ν in [-1/2, 60] and x in [0, 200].
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    check_bessel_domain(order, x)?;
    if x == 0.0 && order < 0.0 {
        return domain(format!("J_{order}(0) is unbounded"));
    }
    Ok(jv(order, x))
}

/// J′_ν(x) = (ν/x)J_ν(x) − J_{ν+1}(x); at x = 0 only ν ≥ 1 is accepted.
pub fn bessel_j_prime(order: f64, x: f64) -> Result<f64> {
    check_bessel_domain(order, x)?;
    if x == 0.0 {
        return if order == 1.0 {
            Ok(0.5)
        } else if order > 1.0 {
            Ok(0.0)
        } else {
            domain(format!("J′_{order} at x = 0 requires order ≥ 1"))
        };
    }
    Ok(jv_prime(order, x))
}

pub(crate) fn jv_prime(nu: f64, x: f64) -> f64 {
    nu / x * jv(nu, x) - jv(nu + 1.0, x)
}

pub(crate) fn jv(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if x <= 2.0 || x * x <= 4.0 * (nu + 1.0) {
        jv_series(nu, x)
    } else {
        jv_miller(nu, x)
    }
}

fn jv_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let lead = if nu == 0.0 {
        1.0
    } else {
        (nu * h.ln() - ln_gamma_unchecked(nu + 1.0)).exp()
    };
    let mut acc = CompensatedSum::default();
    acc.add(1.0);
    let mut term = 1.0_f64;
    let mut largest = 1.0_f64;
    for k in 1..2000 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        acc.add(term);
        largest = largest.max(term.abs());
        if kf * (kf + nu) > h * h && term.abs() <= 1e-18 * largest {
            break;
        }
    }
    lead * acc.value()
}

fn jv_miller(nu: f64, x: f64) -> f64 {
    let (nu0, n) = if nu < 0.0 {
        (nu, 0usize)
    } else {
        let f = nu.floor();
        (nu - f, f as usize)
    };
    let big = x.max(nu);
    let m = (big + 15.0 * big.cbrt() + 30.0).ceil() as usize;

    // Neumann coefficients for (x/2)^ν0 = Σ_k c_k J_{ν0+2k}(x).
    let kmax = m / 2 + 1;
    let mut coef = Vec::with_capacity(kmax + 1);
    coef.push(gamma_unchecked(nu0 + 1.0));
    let mut g = gamma_unchecked(nu0 + 1.0);
    for k in 1..=kmax {
        let kf = k as f64;
        if k > 1 {
            g *= (nu0 + kf - 1.0) / kf;
        }
        coef.push((nu0 + 2.0 * kf) * g);
    }

    let mut j_next = 0.0_f64;
    let mut j_cur = 1e-30_f64;
    let mut sum = CompensatedSum::default();
    let mut target = 0.0_f64;
    if m.is_multiple_of(2) {
        sum.add(coef[m / 2] * j_cur);
    }
    for i in (1..=m).rev() {
        let j_prev = 2.0 * (nu0 + i as f64) / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = i - 1;
        if idx == n {
            target = j_cur;
        }
        if idx % 2 == 0 {
            sum.add(coef[idx / 2] * j_cur);
        }
        if j_cur.abs() > 1e250 {
            const S: f64 = 1e-250;
            j_cur *= S;
            j_next *= S;
            target *= S;
            let v = sum.value() * S;
            sum = CompensatedSum::default();
            sum.add(v);
        }
    }
    target * (0.5 * x).powf(nu0) / sum.value()
}

/// Smallest positive zero of J_ν.
pub fn first_bessel_zero(order: f64) -> Result<f64> {
    check_bessel_domain(order, 0.0)?;
    let limit = 3.0 * (order + 10.0);
    let step = 0.1;
    let mut a = order.max(0.05);
    let mut fa = jv(order, a);
    while a < limit {
        let b = (a + step).min(BESSEL_MAX_ARG);
        let fb = jv(order, b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa * fb < 0.0 {
            return find_root(|t| jv(order, t), RootBracket::new(a, b, fa, fb)?, 1e-14);
        }
        a = b;
        fa = fb;
    }
    Err(Error::SearchFailure(format!(
        "no sign change of J_{order} found below {limit}"
    )))
}

/// An interval whose endpoint values have strictly opposite signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        let opposite = (f_lo < 0.0 && f_hi > 0.0) || (f_lo > 0.0 && f_hi < 0.0);
        if !(lo < hi) || !opposite || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidBracket { lo, hi, f_lo, f_hi });
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, f(lo), f(hi))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }
    pub fn hi(&self) -> f64 {
        self.hi
    }
    pub fn f_lo(&self) -> f64 {
        self.f_lo
    }
    pub fn f_hi(&self) -> f64 {
        self.f_hi
    }
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Outcome of [`solve_bracket`]: the root and, unless f vanished exactly, the final bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolution {
    pub root: f64,
    pub bracket: Option<RootBracket>,
    pub iterations: usize,
}

/// Root of f in the bracket, to bracket width ≤ tol.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: RootBracket, tol: f64) -> Result<f64> {
    solve_bracket(f, bracket, tol).map(|s| s.root)
}

/// Alternates clipped false-position and bisection steps, so the width at least halves every
/// two iterations. The returned root is the final endpoint with smaller |f|.
pub fn solve_bracket<F: Fn(f64) -> f64>(f: F, bracket: RootBracket, tol: f64) -> Result<RootSolution> {
    let RootBracket {
        mut lo,
        mut hi,
        mut f_lo,
        mut f_hi,
    } = RootBracket::new(bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi)?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be nonnegative, got {tol}")));
    }
    let mut it = 0;
    while hi - lo > tol && it < 2000 {
        let w = hi - lo;
        let mut x = if it % 2 == 0 {
            lo - f_lo * w / (f_hi - f_lo)
        } else {
            lo + 0.5 * w
        };
        let margin = 0.01 * w;
        if !(x > lo + margin && x < hi - margin) {
            x = lo + 0.5 * w;
        }
        if !(x > lo && x < hi) {
            break;
        }
        let fx = f(x);
        it += 1;
        if fx == 0.0 {
            return Ok(RootSolution {
                root: x,
                bracket: None,
                iterations: it,
            });
        }
        if fx.is_nan() {
            return Err(Error::SearchFailure(format!("f({x}) is NaN")));
        }
        if (fx < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    let root = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
    Ok(RootSolution {
        root,
        bracket: Some(RootBracket { lo, hi, f_lo, f_hi }),
        iterations: it,
    })
}

/// Scans [a, b] with n uniform steps for the first sign change of f and refines it.
pub(crate) fn first_root_by_scan<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, tol: f64) -> Result<f64> {
    let h = (b - a) / n as f64;
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=n {
        let x1 = if i == n { b } else { a + h * i as f64 };
        let f1 = f(x1);
        if f0 == 0.0 {
            return Ok(x0);
        }
        if f0 * f1 < 0.0 {
            return find_root(&f, RootBracket::new(x0, x1, f0, f1)?, tol);
        }
        if f1 == 0.0 {
            return Ok(x1);
        }
        x0 = x1;
        f0 = f1;
    }
    Err(Error::SearchFailure(format!("no sign change on [{a}, {b}]")))
}
