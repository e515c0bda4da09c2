//! Thermodynamic gas bounds, potential-form Lieb-Thirring bounds and exactly solvable
//! reference energies.

use crate::error::{Error, Result};
use crate::exclusion::{c_alpha_n, c_alpha_n_exact, xi_h, xi_s, ConstantsRegistry, StatisticsKind, StatisticsParams};
use crate::report::BoundReport;
use crate::special::CompensatedSum;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;

/// Largest N for which C_{α,N} is evaluated by the direct loop when α is not a fraction.
pub const C_ALPHA_FLOAT_MAX_N: u64 = 100_000_000;
/// LL reference energies use the small-t asymptote below this t and the large-t one above
/// [`LL_LARGE_T`].
pub const LL_SMALL_T: f64 = 1e-2;
pub const LL_LARGE_T: f64 = 1e3;

/// Homogeneous gas of N particles on a segment of length L (1D) or a square of area L² (2D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasSpec {
    pub statistics: StatisticsParams,
    pub rhobar: f64,
    pub n: u64,
    pub extent: f64,
    pub gamma: f64,
}

impl GasSpec {
    pub fn new(statistics: StatisticsParams, rhobar: f64, n: u64, extent: f64, gamma: f64) -> Result<Self> {
        if !(rhobar > 0.0 && rhobar.is_finite()) {
            return Err(Error::InvalidInput(format!("ρ̄ must be positive, got {rhobar}")));
        }
        if n < 1 {
            return Err(Error::InvalidInput("N must be ≥ 1".into()));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidInput(format!("extent must be positive, got {extent}")));
        }
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!("γ must be ≥ 1, got {gamma}")));
        }
        let nf = n as f64;
        if (rhobar * extent - nf).abs() > 1e-9 * nf {
            return Err(Error::InvalidInput(format!(
                "ρ̄·extent = {} differs from N = {n}",
                rhobar * extent
            )));
        }
        Ok(Self {
            statistics,
            rhobar,
            n,
            extent,
            gamma,
        })
    }

    /// Spec with extent N/ρ̄.
    pub fn from_density(statistics: StatisticsParams, rhobar: f64, n: u64, gamma: f64) -> Result<Self> {
        Self::new(statistics, rhobar, n, n as f64 / rhobar, gamma)
    }

    pub fn dimension(&self) -> u32 {
        match self.statistics.kind {
            StatisticsKind::Anyon => 2,
            _ => 1,
        }
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximizes f on [lo, hi] by a log-spaced scan followed by golden section around the best node.
pub(crate) fn maximize_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, nodes: usize) -> (f64, f64) {
    let (l0, l1) = (lo.ln(), hi.ln());
    let at = |k: usize| (l0 + (l1 - l0) * k as f64 / (nodes - 1) as f64).exp();
    let mut best = 0;
    let mut fbest = f64::NEG_INFINITY;
    for k in 0..nodes {
        let v = f(at(k));
        if v > fbest {
            fbest = v;
            best = k;
        }
    }
    let a = at(best.saturating_sub(1));
    let b = at((best + 1).min(nodes - 1));
    let (x, v) = golden_max(&f, a, b, 1e-12);
    if v >= fbest {
        (x, v)
    } else {
        (at(best), fbest)
    }
}

fn anyon_g(gamma: f64, n: f64) -> f64 {
    let q = 1.0 + 2.0 * gamma / n.sqrt();
    1.0 / (PI * gamma * gamma) - q * q / (PI * PI * gamma.powi(4))
}

/// c_N = sup over γ > 0 of 1/(πγ²) − (1 + 2γ/√N)²/(π²γ⁴).
pub fn anyon_cn(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("c_N requires N ≥ 2, got {n}")));
    }
    let nf = n as f64;
    Ok(maximize_log(|g| anyon_g(g, nf), 1e-3, 1e3, 400).1)
}

pub(crate) fn alpha_constant(stats: &StatisticsParams, n: u64) -> Result<f64> {
    if let Some(f) = stats.fraction {
        let r = c_alpha_n_exact(f, n)?;
        return Ok(*r.numer() as f64 / *r.denom() as f64);
    }
    let alpha = stats
        .alpha
        .ok_or_else(|| Error::InvalidInput("anyon statistics need α".into()))?;
    if n > C_ALPHA_FLOAT_MAX_N {
        return Err(Error::InvalidInput(format!(
            "N = {n} is too large for a floating α; give α as a reduced fraction"
        )));
    }
    c_alpha_n(alpha, n)
}

fn expect_kind(spec: &GasSpec, kind: StatisticsKind) -> Result<()> {
    if spec.statistics.kind != kind {
        return Err(Error::InvalidInput(format!(
            "expected {kind:?} statistics, got {:?}",
            spec.statistics.kind
        )));
    }
    Ok(())
}

/// max of (c_Ω/2)c_N C²_{α,N} N²/L² and the Dirichlet boson bound Nπ²/L², for T_A on a square.
pub fn anyon_gas_bound(spec: &GasSpec) -> Result<BoundReport> {
    expect_kind(spec, StatisticsKind::Anyon)?;
    let l2 = spec.extent;
    let nf = spec.n as f64;
    let dirichlet = nf * PI * PI / l2;
    let c_omega = ConstantsRegistry::C_OMEGA_DISK;
    let (exclusion, c_n, c_alpha) = if spec.n >= 2 {
        let c_n = anyon_cn(spec.n)?;
        let c = alpha_constant(&spec.statistics, spec.n)?;
        (0.5 * c_omega * c_n * c * c * nf * nf / l2, c_n, c)
    } else {
        (0.0, 0.0, 0.0)
    };
    let exclusion_wins = exclusion > dirichlet;
    let value = exclusion.max(dirichlet);
    let mut r = BoundReport::new(value, Some(spec.statistics))?
        .with_constant("c_Omega", c_omega)
        .with_diagnostic("branch", if exclusion_wins { "exclusion" } else { "dirichlet" })
        .with_diagnostic("exclusion_value", exclusion)
        .with_diagnostic("dirichlet_value", dirichlet)
        .with_diagnostic("per_area", value / l2)
        .with_diagnostic("rhobar", spec.rhobar);
    if spec.n >= 2 {
        r = r
            .with_diagnostic("c_N", c_n)
            .with_diagnostic("C_alpha_N", c_alpha)
            .with_diagnostic("coefficient", 0.5 * c_omega * c_n);
    }
    Ok(r)
}

/// C_S ξ_S(2η/(γρ̄))² ρ̄³ per unit length.
pub fn ll_gas_bound(spec: &GasSpec) -> Result<BoundReport> {
    expect_kind(spec, StatisticsKind::LiebLiniger)?;
    let eta = spec
        .statistics
        .eta
        .ok_or_else(|| Error::InvalidInput("LL statistics need η".into()))?;
    let arg = 2.0 * eta / (spec.gamma * spec.rhobar);
    let xi = xi_s(arg)?;
    let c_s = ConstantsRegistry::C_S_LOWER;
    let value = c_s * xi * xi * spec.rhobar.powi(3);
    Ok(BoundReport::new(value, Some(spec.statistics))?
        .with_constant("C_S", c_s)
        .with_diagnostic("xi_S", xi)
        .with_diagnostic("xi_S_argument", arg)
        .with_diagnostic("total", value * spec.extent)
        .with_diagnostic("gamma", spec.gamma))
}

/// (1/32) ξ_H(α)² ρ̄³ per unit length.
pub fn cs_gas_bound(alpha: f64, rhobar: f64) -> Result<BoundReport> {
    if !(alpha >= 1.0) {
        return Err(Error::Inapplicable(format!(
            "the gas bound requires α ≥ 1, got {alpha}"
        )));
    }
    if !(rhobar > 0.0 && rhobar.is_finite()) {
        return Err(Error::InvalidInput(format!("ρ̄ must be positive, got {rhobar}")));
    }
    let stats = StatisticsParams::calogero_sutherland(alpha)?;
    let xi = xi_h(alpha)?;
    let c_h = ConstantsRegistry::C_H;
    let value = c_h * xi * xi * rhobar.powi(3);
    let exact = reference_energy(&ReferenceModel::CalogeroSutherland { alpha, rhobar })?.value;
    Ok(BoundReport::new(value, Some(stats))?
        .with_constant("C_H", c_h)
        .with_diagnostic("xi_H", xi)
        .with_diagnostic("exact_energy", exact)
        .with_diagnostic("ratio_to_exact", value / exact))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ReferenceModel {
    Fermion2D { rhobar: f64 },
    CalogeroSutherland { alpha: f64, rhobar: f64 },
    LiebLinigerAsymptotic { eta: f64, rhobar: f64, strict: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Exact,
    SmallT,
    LargeT,
    Envelope,
}

/// Energy per unit length or area. For Lieb-Liniger, `value` is an asymptote or, between the
/// two regimes, the envelope min{t, π²/3}·ρ̄³/2, which lies above the true energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceEnergy {
    pub value: f64,
    pub regime: Regime,
    pub small_t: Option<f64>,
    pub large_t: Option<f64>,
}

pub fn reference_energy(model: &ReferenceModel) -> Result<ReferenceEnergy> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
        }
    };
    match *model {
        ReferenceModel::Fermion2D { rhobar } => {
            positive("ρ̄", rhobar)?;
            Ok(ReferenceEnergy {
                value: PI * rhobar * rhobar,
                regime: Regime::Exact,
                small_t: None,
                large_t: None,
            })
        }
        ReferenceModel::CalogeroSutherland { alpha, rhobar } => {
            positive("ρ̄", rhobar)?;
            let value = PI * PI / 6.0 * alpha * alpha * rhobar.powi(3);
            Ok(ReferenceEnergy {
                value,
                regime: Regime::Exact,
                small_t: None,
                large_t: None,
            })
        }
        ReferenceModel::LiebLinigerAsymptotic { eta, rhobar, strict } => {
            positive("ρ̄", rhobar)?;
            if !(eta >= 0.0) {
                return Err(Error::InvalidInput(format!("η must be ≥ 0, got {eta}")));
            }
            let t = 2.0 * eta / rhobar;
            let r3 = rhobar.powi(3);
            let small = if t.is_finite() { Some(0.5 * t * r3) } else { None };
            let large = Some(0.5 * PI * PI / 3.0 * r3);
            let (value, regime) = if t <= LL_SMALL_T {
                (0.5 * t * r3, Regime::SmallT)
            } else if t >= LL_LARGE_T {
                (0.5 * PI * PI / 3.0 * r3, Regime::LargeT)
            } else if strict {
                return Err(Error::AsymptoticsOnly(format!(
                    "t = 2η/ρ̄ = {t} lies between the asymptotic regimes [{LL_SMALL_T}, {LL_LARGE_T}]"
                )));
            } else {
                (0.5 * t.min(PI * PI / 3.0) * r3, Regime::Envelope)
            };
            Ok(ReferenceEnergy {
                value,
                regime,
                small_t: small,
                large_t: large,
            })
        }
    }
}

/// Potential sampled at uniform cell centers of a segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential1D {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

/// Potential sampled on a uniform rectangular grid; `values[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SampledPotential {
    OneD(Potential1D),
    TwoD(Potential2D),
}

impl Potential1D {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid grid x0 = {x0}, dx = {dx}")));
        }
        if values.is_empty() || values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::InvalidInput("potential needs finite or +∞ samples".into()));
        }
        Ok(Self { x0, dx, values })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// ∫|V₋|^p by the midpoint rule.
    pub fn negative_part_integral(&self, p: f64) -> f64 {
        let mut s = CompensatedSum::default();
        for v in &self.values {
            if *v < 0.0 {
                s.add((-v).powf(p));
            }
        }
        self.dx * s.value()
    }
}

impl Potential2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || values.len() != nx * ny {
            return Err(Error::InvalidInput(format!(
                "grid {nx}×{ny} does not match {} samples",
                values.len()
            )));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid grid spacing {dx}, {dy}")));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::InvalidInput("potential needs finite or +∞ samples".into()));
        }
        Ok(Self { nx, ny, dx, dy, values })
    }

    pub fn negative_part_integral(&self, p: f64) -> f64 {
        let mut s = CompensatedSum::default();
        for v in &self.values {
            if *v < 0.0 {
                s.add((-v).powf(p));
            }
        }
        self.dx * self.dy * s.value()
    }
}

fn parse_f64(field: &str, row: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("row {row}: `{field}`: {e}")))
}

fn uniform_axis(sorted: &[f64], name: &str) -> Result<f64> {
    if sorted.len() < 2 {
        return Ok(1.0);
    }
    let n = sorted.len();
    let d = (sorted[n - 1] - sorted[0]) / (n - 1) as f64;
    for w in sorted.windows(2) {
        if ((w[1] - w[0]) - d).abs() > 1e-6 * d {
            return Err(Error::Parse(format!("{name} coordinates are not uniformly spaced")));
        }
    }
    Ok(d)
}

/// CSV with header `x,V` or `x,y,V`. 2D rows may come in any order but must fill the grid once.
pub fn potential_from_csv<R: Read>(reader: R) -> Result<SampledPotential> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
        let vals = rec.iter().map(|f| parse_f64(f, i + 1)).collect::<Result<Vec<_>>>()?;
        if vals.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse(format!("row {}: NaN", i + 1)));
        }
        rows.push(vals);
    }
    match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "V"] => {
            let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            if xs.len() < 2 {
                return Err(Error::Parse("need at least two rows".into()));
            }
            if xs.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Parse("x must be strictly increasing".into()));
            }
            let dx = uniform_axis(&xs, "x")?;
            Potential1D::new(xs[0], dx, rows.iter().map(|r| r[1]).collect())
                .map(SampledPotential::OneD)
                .map_err(|e| Error::Parse(e.to_string()))
        }
        ["x", "y", "V"] => {
            if rows.is_empty() {
                return Err(Error::Parse("no rows".into()));
            }
            let axis = |k: usize| {
                let mut v: Vec<f64> = rows.iter().map(|r| r[k]).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            };
            let xs = axis(0);
            let ys = axis(1);
            let dx = uniform_axis(&xs, "x")?;
            let dy = uniform_axis(&ys, "y")?;
            let (nx, ny) = (xs.len(), ys.len());
            if rows.len() != nx * ny {
                return Err(Error::Parse(format!(
                    "{} rows do not fill a {nx}×{ny} grid",
                    rows.len()
                )));
            }
            let mut grid: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for r in &rows {
                let ix = ((r[0] - xs[0]) / dx).round() as usize;
                let iy = ((r[1] - ys[0]) / dy).round() as usize;
                if grid.insert((iy, ix), r[2]).is_some() {
                    return Err(Error::Parse(format!("duplicate grid point ({}, {})", r[0], r[1])));
                }
            }
            Potential2D::new(nx, ny, dx, dy, grid.into_values().collect())
                .map(SampledPotential::TwoD)
                .map_err(|e| Error::Parse(e.to_string()))
        }
        other => Err(Error::Parse(format!(
            "expected header `x,V` or `x,y,V`, got `{}`",
            other.join(",")
        ))),
    }
}

/// −C_S′/ξ_S(2η/(γρ̄)) ∫|V₋|^{3/2}.
pub fn ll_potential_bound(v: &Potential1D, eta: f64, gamma: f64, rhobar: f64) -> Result<BoundReport> {
    let spec = GasSpec::from_density(StatisticsParams::lieb_liniger(eta)?, rhobar, 1, gamma)?;
    if eta == 0.0 {
        return Err(Error::Vacuous("η = 0 gives ξ_S = 0 and no finite bound".into()));
    }
    let gas = ll_gas_bound(&spec)?;
    let xi = gas.diagnostic("xi_S").expect("gas report carries ξ_S");
    if !(xi > 0.0) {
        return Err(Error::Vacuous(format!("ξ_S(2η/(γρ̄)) = {xi} vanishes numerically")));
    }
    let registry = ConstantsRegistry::default();
    let c_sp = registry.c_s_prime();
    let integral = v.negative_part_integral(1.5);
    Ok(BoundReport::new(-c_sp / xi * integral, Some(spec.statistics))?
        .with_constant("C_S", ConstantsRegistry::C_S_LOWER)
        .with_constant("C_S_prime", c_sp)
        .with_diagnostic("xi_S", xi)
        .with_diagnostic("integral_V_minus_3_2", integral))
}

/// −(1/(4C_A)) C_{α,N}^{−2} ∫|V₋|².
pub fn anyon_potential_bound(
    v: &Potential2D,
    stats: &StatisticsParams,
    n: u64,
    registry: &ConstantsRegistry,
) -> Result<BoundReport> {
    if stats.kind != StatisticsKind::Anyon {
        return Err(Error::InvalidInput(
            "anyon potential bound needs anyon statistics".into(),
        ));
    }
    let c = alpha_constant(stats, n)?;
    if c == 0.0 {
        return Err(Error::Vacuous(format!(
            "C_(α,N) = 0 for α = {:?}, N = {n}",
            stats.alpha
        )));
    }
    let integral = v.negative_part_integral(2.0);
    Ok(
        BoundReport::new(-registry.c_a_prime() / (c * c) * integral, Some(*stats))?
            .with_constant("C_A", registry.c_a())
            .with_constant("C_A_prime", registry.c_a_prime())
            .with_diagnostic("C_alpha_N", c)
            .with_diagnostic("integral_V_minus_2", integral),
    )
}
