use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use exclusion_bounds::applications::{
    harmonic_trap_bound, logspace, optimize_partition, powerlaw_bound, stability_bound, PartitionSearch, StabilitySpec,
    TrapPotential, TrapSpec,
};
use exclusion_bounds::density::{cs_density_bound, ll_density_bound};
use exclusion_bounds::exclusion::{xi_h, xi_h_approx_small, xi_h_lower, xi_s, xi_s_approx, XI_H_MAX_ALPHA};
use exclusion_bounds::oracle::{counterexample_alpha_star, counterexample_default_epsilon, Bump};
use exclusion_bounds::thermo::{
    anyon_gas_bound, anyon_potential_bound, cs_gas_bound, ll_gas_bound, ll_potential_bound, potential_from_csv,
    reference_energy, GasSpec, ReferenceModel, SampledPotential,
};
use exclusion_bounds::{
    BoundReport, ConstantsRegistry, DensityProfile, Error, Fraction, StatisticsKind, StatisticsParams,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_INAPPLICABLE: u8 = 4;

/// Rigorous lower bounds on ground-state energies of 1D and 2D gases with exclusion statistics.
#[derive(Debug, Parser, Serialize)]
#[command(name = "exclusion-bounds", version)]
struct Cli {
    /// Anyon constant C_A in [1e-4, π]; `pi` is accepted.
    #[arg(long = "CA", env = "EXCLUSION_BOUNDS_CA", value_parser = parse_ca, global = true)]
    ca: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// CSV of ξ_S or ξ_H against its closed-form approximation.
    Xi(XiArgs),
    /// Density-functional bound from a density file, or the homogeneous gas bound.
    Bound(BoundArgs),
    /// Homogeneous gas bound with a reference energy.
    Gas(GasArgs),
    /// Harmonic-trap bound for anyons.
    Trap(TrapArgs),
    /// Stability of anyonic matter with Coulomb interactions.
    Stability(StabilityArgs),
    /// Confined Calogero-Sutherland bound optimized over symmetric partitions.
    Confine(ConfineArgs),
    /// Asymptotic Calogero-Sutherland bound in a power-law trap.
    Powerlaw(PowerlawArgs),
    /// Trial state showing the density bound fails without the split-tree modification.
    Counterexample(CounterexampleArgs),
    /// Lieb-Thirring type bound for an external potential.
    Potential(PotentialArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
enum XiKind {
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "H", alias = "h")]
    H,
}

#[derive(Debug, Args, Serialize)]
struct XiArgs {
    #[arg(long, value_enum)]
    kind: XiKind,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    range: Vec<f64>,
    #[arg(long)]
    steps: usize,
    /// Also write a line plot.
    #[arg(long)]
    #[serde(skip)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
struct KindFlags {
    /// Lieb-Liniger (δ-interaction) bosons.
    #[arg(long)]
    ll: bool,
    /// Calogero-Sutherland (inverse-square) particles.
    #[arg(long)]
    cs: bool,
    /// Anyons in the plane.
    #[arg(long)]
    anyon: bool,
}

#[derive(Debug, Args, Serialize)]
struct StatisticsArgs {
    #[command(flatten)]
    kind: KindFlags,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Anyon statistics as a reduced fraction μ/ν.
    #[arg(long, value_parser = parse_fraction, conflicts_with = "alpha")]
    fraction: Option<Fraction>,
}

#[derive(Debug, Args, Serialize)]
struct GasFlags {
    #[arg(long)]
    rhobar: Option<f64>,
    #[arg(long = "N")]
    n: Option<u64>,
    /// Side length; defaults to the value fixed by N and ρ̄.
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    #[command(flatten)]
    stats: StatisticsArgs,
    /// CSV with header `x,rho` sampled at uniform cell centers.
    #[arg(long)]
    density: Option<PathBuf>,
    /// Reference interval Q₀ for the split tree; defaults to the support of the density.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    q0: Option<Vec<f64>>,
    #[command(flatten)]
    gas: GasFlags,
}

#[derive(Debug, Args, Serialize)]
struct GasArgs {
    #[command(flatten)]
    stats: StatisticsArgs,
    #[command(flatten)]
    gas: GasFlags,
    /// Fail instead of using the envelope between the Lieb-Liniger asymptotic regimes.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args, Serialize)]
struct TrapArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "fraction")]
    alpha: Option<f64>,
    #[arg(long, value_parser = parse_fraction, conflicts_with = "alpha")]
    fraction: Option<Fraction>,
    #[arg(long = "N")]
    n: u64,
    #[arg(long)]
    omega: f64,
    /// Angular momentum for the additional bound ω(N + |L + αN(N−1)/2|).
    #[arg(long = "L", allow_negative_numbers = true)]
    l_angular: Option<i64>,
}

#[derive(Debug, Args, Serialize)]
struct StabilityArgs {
    #[arg(long)]
    m: f64,
    #[arg(long = "Z")]
    z: f64,
    #[arg(long)]
    nu: u64,
    #[arg(long = "K")]
    k: u64,
    #[arg(long = "N")]
    n: u64,
    /// Free parameter of the bound; defaults to ν²m(2Z+1).
    #[arg(long)]
    b: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
#[group(id = "trap_potential", required = true, multiple = false)]
struct TrapFlags {
    /// V = ω²x²/2.
    #[arg(long, value_name = "OMEGA")]
    harmonic: Option<f64>,
    /// V = c^μ|x|^μ.
    #[arg(long, num_args = 2, value_names = ["C", "MU"])]
    powerlaw: Option<Vec<f64>>,
    /// CSV with header `x,V`, read as constant on each sample cell.
    #[arg(long)]
    potential: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ConfineArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long = "N")]
    n: u64,
    #[command(flatten)]
    trap: TrapFlags,
    #[arg(long, default_value_t = 0.01)]
    a_min: f64,
    #[arg(long, default_value_t = 10.0)]
    a_max: f64,
    #[arg(long, default_value_t = 40)]
    a_steps: usize,
    /// Interval counts per side; chosen automatically when absent.
    #[arg(long = "M", value_delimiter = ',')]
    m: Option<Vec<usize>>,
}

#[derive(Debug, Args, Serialize)]
struct PowerlawArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    c: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long = "N")]
    n: u64,
}

#[derive(Debug, Args, Serialize)]
struct CounterexampleArgs {
    #[arg(long = "N")]
    n: u64,
    #[arg(long, default_value_t = XI_H_MAX_ALPHA)]
    alpha_max: f64,
    /// Bump width; defaults to the choice that makes the right-hand side dominate.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Samples of the bump on [−1, 1].
    #[arg(long, default_value_t = 4001)]
    points: usize,
}

#[derive(Debug, Args, Serialize)]
struct PotentialArgs {
    #[command(flatten)]
    stats: StatisticsArgs,
    /// CSV with header `x,V` (1D) or `x,y,V` (2D).
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    rhobar: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long = "N")]
    n: Option<u64>,
}

fn parse_ca(s: &str) -> Result<f64, String> {
    let v = if s.trim().eq_ignore_ascii_case("pi") {
        std::f64::consts::PI
    } else {
        s.trim().parse::<f64>().map_err(|e| format!("{e}"))?
    };
    ConstantsRegistry::new(v)
        .map(|r| r.c_a())
        .map_err(|_| format!("C_A must lie in the allowed range [1e-4, π], got {v}"))
}

fn parse_fraction(s: &str) -> Result<Fraction, String> {
    let (mu, nu) = s.split_once('/').ok_or_else(|| format!("expected μ/ν, got `{s}`"))?;
    let mu = mu.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let nu = nu.trim().parse::<i64>().map_err(|e| e.to_string())?;
    Fraction::new(mu, nu).map_err(|e| e.to_string())
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidInput(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidInput(_) => EXIT_USAGE,
                Error::Parse(_) => EXIT_PARSE,
                Error::Inapplicable(_) | Error::Vacuous(_) | Error::AsymptoticsOnly(_) => EXIT_INAPPLICABLE,
                _ => EXIT_FAILURE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_PARSE;
        }
    }
    EXIT_FAILURE
}

fn registry(cli: &Cli) -> ConstantsRegistry {
    cli.ca
        .map(|c| ConstantsRegistry::new(c).expect("validated by the parser"))
        .unwrap_or_default()
}

fn statistics(args: &StatisticsArgs) -> anyhow::Result<StatisticsParams> {
    let k = &args.kind;
    if k.ll {
        let eta = args.eta.ok_or_else(|| usage("--ll needs --eta"))?;
        return Ok(StatisticsParams::lieb_liniger(eta)?);
    }
    if k.cs {
        let alpha = args.alpha.ok_or_else(|| usage("--cs needs --alpha"))?;
        if alpha < 1.0 {
            return Err(Error::Inapplicable(format!("Calogero-Sutherland bounds require α ≥ 1, got {alpha}")).into());
        }
        return Ok(StatisticsParams::calogero_sutherland(alpha)?);
    }
    match (args.fraction, args.alpha) {
        (Some(f), _) => Ok(StatisticsParams::anyon_fraction(f.mu, f.nu)?),
        (None, Some(a)) => Ok(StatisticsParams::anyon(a)?),
        (None, None) => Err(usage("--anyon needs --alpha or --fraction")),
    }
}

fn read_file(path: &Path, files: &mut Vec<Vec<u8>>) -> anyhow::Result<Vec<u8>> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    files.push(bytes.clone());
    Ok(bytes)
}

fn gas_report(stats: StatisticsParams, gas: &GasFlags, strict: bool) -> anyhow::Result<BoundReport> {
    let rhobar = gas.rhobar.ok_or_else(|| usage("gas bounds need --rhobar"))?;
    let n = gas.n.ok_or_else(|| usage("gas bounds need --N"))?;
    let spec = match gas.l {
        Some(l) if stats.kind == StatisticsKind::Anyon => GasSpec::new(stats, rhobar, n, l * l, gas.gamma)?,
        Some(l) => GasSpec::new(stats, rhobar, n, l, gas.gamma)?,
        None => GasSpec::from_density(stats, rhobar, n, gas.gamma)?,
    };
    let (report, model) = match stats.kind {
        StatisticsKind::LiebLiniger => (
            ll_gas_bound(&spec)?,
            ReferenceModel::LiebLinigerAsymptotic {
                eta: stats.eta.unwrap_or(0.0),
                rhobar,
                strict,
            },
        ),
        StatisticsKind::CalogeroSutherland => {
            let alpha = stats.alpha.unwrap_or(1.0);
            (
                cs_gas_bound(alpha, rhobar)?,
                ReferenceModel::CalogeroSutherland { alpha, rhobar },
            )
        }
        StatisticsKind::Anyon => (anyon_gas_bound(&spec)?, ReferenceModel::Fermion2D { rhobar }),
    };
    let reference = reference_energy(&model)?;
    Ok(report
        .with_diagnostic("reference_energy", reference.value)
        .with_diagnostic("reference_regime", format!("{:?}", reference.regime))
        .with_diagnostic("extent", spec.extent))
}

fn run_bound(args: &BoundArgs, files: &mut Vec<Vec<u8>>) -> anyhow::Result<BoundReport> {
    let stats = statistics(&args.stats)?;
    let Some(path) = &args.density else {
        return gas_report(stats, &args.gas, false);
    };
    let bytes = read_file(path, files)?;
    let rho = DensityProfile::from_csv(bytes.as_slice())?;
    match stats.kind {
        StatisticsKind::LiebLiniger => Ok(ll_density_bound(&rho, stats.eta.unwrap_or(0.0))?),
        StatisticsKind::CalogeroSutherland => {
            let q0 = match &args.q0 {
                Some(q) => (q[0], q[1]),
                None => (rho.x0(), rho.x1()),
            };
            Ok(cs_density_bound(&rho, stats.alpha.unwrap_or(1.0), q0)?)
        }
        StatisticsKind::Anyon => Err(usage("density files are one-dimensional; use --ll or --cs")),
    }
}

fn run_trap(args: &TrapArgs, reg: &ConstantsRegistry) -> anyhow::Result<BoundReport> {
    let alpha = args.fraction.map(|f| f.value()).or(args.alpha).unwrap_or(0.0);
    let mut spec = TrapSpec::new(alpha, args.n, args.omega, reg.c_a())?;
    if let Some(f) = args.fraction {
        spec = spec.with_fraction(f);
    }
    if let Some(l) = args.l_angular {
        spec = spec.with_angular_momentum(l);
    }
    Ok(harmonic_trap_bound(&spec)?)
}

fn run_stability(args: &StabilityArgs, reg: &ConstantsRegistry) -> anyhow::Result<BoundReport> {
    let mut spec = StabilitySpec::new(args.m, args.z, args.nu, args.k, args.n)?;
    if let Some(b) = args.b {
        spec = spec.with_b(b);
    }
    Ok(stability_bound(&spec, reg)?)
}

fn run_confine(args: &ConfineArgs, files: &mut Vec<Vec<u8>>) -> anyhow::Result<BoundReport> {
    let t = &args.trap;
    let v = if let Some(omega) = t.harmonic {
        TrapPotential::Harmonic { omega }
    } else if let Some(p) = &t.powerlaw {
        TrapPotential::PowerLaw { c: p[0], mu: p[1] }
    } else if let Some(path) = &t.potential {
        let bytes = read_file(path, files)?;
        match potential_from_csv(bytes.as_slice())? {
            SampledPotential::OneD(p) => TrapPotential::Sampled(p),
            SampledPotential::TwoD(_) => return Err(usage("trap potentials must be one-dimensional")),
        }
    } else {
        return Err(usage("a trap potential is required"));
    };
    if !(args.a_min > 0.0 && args.a_max >= args.a_min && args.a_steps >= 1) {
        return Err(usage("need 0 < a-min ≤ a-max and a-steps ≥ 1"));
    }
    let search = PartitionSearch {
        a_values: logspace(args.a_min, args.a_max, args.a_steps),
        m_values: args.m.clone(),
    };
    Ok(optimize_partition(&v, args.alpha, args.n, &search)?)
}

fn run_counterexample(args: &CounterexampleArgs) -> anyhow::Result<BoundReport> {
    let bump = Bump::standard(args.points)?;
    let epsilon = match args.epsilon {
        Some(e) => e,
        None => counterexample_default_epsilon(args.n, &bump)?,
    };
    let star = counterexample_alpha_star(args.n, epsilon, &bump, args.alpha_max)?;
    Ok(BoundReport::new(star.alpha_star, None)?
        .with_constant("C_H", ConstantsRegistry::C_H)
        .with_diagnostic("alpha_star", star.alpha_star)
        .with_diagnostic("lhs_upper", star.at_star.lhs_upper)
        .with_diagnostic("rhs", star.at_star.rhs)
        .with_diagnostic("xi_H", star.at_star.xi_h)
        .with_diagnostic("epsilon", epsilon)
        .with_diagnostic("dirichlet_energy", star.at_star.dirichlet_energy)
        .with_diagnostic("sixth_moment", star.at_star.sixth_moment)
        .with_diagnostic("alpha_searched_max", star.alpha_searched_max)
        .with_diagnostic("dominates_beyond", star.dominates_beyond))
}

fn run_potential(
    args: &PotentialArgs,
    reg: &ConstantsRegistry,
    files: &mut Vec<Vec<u8>>,
) -> anyhow::Result<BoundReport> {
    let stats = statistics(&args.stats)?;
    let bytes = read_file(&args.file, files)?;
    match (stats.kind, potential_from_csv(bytes.as_slice())?) {
        (StatisticsKind::LiebLiniger, SampledPotential::OneD(v)) => {
            let rhobar = args.rhobar.ok_or_else(|| usage("--ll needs --rhobar"))?;
            Ok(ll_potential_bound(&v, stats.eta.unwrap_or(0.0), args.gamma, rhobar)?)
        }
        (StatisticsKind::Anyon, SampledPotential::TwoD(v)) => {
            let n = args.n.ok_or_else(|| usage("--anyon needs --N"))?;
            Ok(anyon_potential_bound(&v, &stats, n, reg)?)
        }
        (StatisticsKind::CalogeroSutherland, _) => {
            Err(Error::Inapplicable("no potential bound is available for Calogero-Sutherland statistics".into()).into())
        }
        _ => Err(usage(
            "potential dimension does not match the statistics (1D for --ll, 2D for --anyon)",
        )),
    }
}

fn xi_rows(args: &XiArgs) -> anyhow::Result<Vec<[f64; 3]>> {
    let (lo, hi) = (args.range[0], args.range[1]);
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        bail!(usage(format!("invalid range [{lo}, {hi}]")));
    }
    if lo < hi && args.steps == 0 {
        bail!(usage("--steps must be positive"));
    }
    let params: Vec<f64> = if lo == hi {
        vec![lo]
    } else {
        (0..=args.steps)
            .map(|k| {
                if k == args.steps {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / args.steps as f64
                }
            })
            .collect()
    };
    params
        .into_iter()
        .map(|p| {
            let row = match args.kind {
                XiKind::S => [p, xi_s(p)?, xi_s_approx(p)?],
                XiKind::H => {
                    let approx = if p <= 1.0 {
                        xi_h_approx_small(p)?
                    } else {
                        xi_h_lower(p)?
                    };
                    [p, xi_h(p)?, approx]
                }
            };
            Ok(row)
        })
        .collect::<exclusion_bounds::Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::Domain(m) => usage(m),
            other => other.into(),
        })
}

fn xi_csv(rows: &[[f64; 3]]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["param", "xi", "approx"])?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.into_inner().map_err(|e| anyhow!("{e}"))
}

fn xi_svg(rows: &[[f64; 3]], kind: XiKind) -> String {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let xmin = rows.first().map_or(0.0, |r| r[0]);
    let xmax = rows.last().map_or(1.0, |r| r[0]);
    let ymax = rows.iter().flat_map(|r| [r[1], r[2]]).fold(0.0, f64::max).max(1e-12);
    let span = if xmax > xmin { xmax - xmin } else { 1.0 };
    let line = |col: usize| {
        let mut s = String::new();
        for r in rows {
            let x = pad + (r[0] - xmin) / span * (w - 2.0 * pad);
            let y = h - pad - r[col] / ymax * (h - 2.0 * pad);
            let _ = write!(s, "{x:.3},{y:.3} ");
        }
        s.trim_end().to_string()
    };
    let label = match kind {
        XiKind::S => "xi_S",
        XiKind::H => "xi_H",
    };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n\
         <text x=\"{pad}\" y=\"20\">{label} (solid) and approximation (dashed)</text>\n\
         <polyline fill=\"none\" stroke=\"black\" points=\"{}\"/>\n\
         <polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\" points=\"{}\"/>\n\
         </svg>\n",
        line(1),
        line(2)
    )
}

fn digest(cli: &Cli, files: &[Vec<u8>]) -> anyhow::Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cli)?);
    for f in files {
        h.update((f.len() as u64).to_le_bytes());
        h.update(f);
    }
    Ok(h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

fn render(command: &str, report: &BoundReport, digest: String) -> anyhow::Result<Vec<u8>> {
    let mut v = serde_json::to_value(report)?;
    let obj = v.as_object_mut().expect("reports serialize to objects");
    obj.insert("command".into(), command.into());
    obj.insert("inputs_digest".into(), digest.into());
    let mut out = serde_json::to_vec_pretty(&v)?;
    out.push(b'\n');
    Ok(out)
}

fn emit(cli: &Cli, bytes: &[u8]) -> anyhow::Result<()> {
    match &cli.output {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            Ok(out.flush()?)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let reg = registry(cli);
    let mut files = Vec::new();
    let (name, report) = match &cli.command {
        Command::Xi(args) => {
            let rows = xi_rows(args)?;
            if let Some(p) = &args.svg {
                std::fs::write(p, xi_svg(&rows, args.kind)).with_context(|| format!("writing {}", p.display()))?;
            }
            return emit(cli, &xi_csv(&rows)?);
        }
        Command::Bound(a) => ("bound", run_bound(a, &mut files)?),
        Command::Gas(a) => ("gas", gas_report(statistics(&a.stats)?, &a.gas, a.strict)?),
        Command::Trap(a) => ("trap", run_trap(a, &reg)?),
        Command::Stability(a) => ("stability", run_stability(a, &reg)?),
        Command::Confine(a) => ("confine", run_confine(a, &mut files)?),
        Command::Powerlaw(a) => ("powerlaw", powerlaw_bound(a.mu, a.c, a.alpha, a.n)?),
        Command::Counterexample(a) => ("counterexample", run_counterexample(a)?),
        Command::Potential(a) => ("potential", run_potential(a, &reg, &mut files)?),
    };
    let d = digest(cli, &files)?;
    emit(cli, &render(name, &report, d)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
