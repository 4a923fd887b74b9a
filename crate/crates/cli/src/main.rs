//! `zas`: classification reports, tables, sweeps and the verification suite.

mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use zas_core::geometry::{
    adm_mass, check_penrose, check_zas_inequality, classify_zas, omae_radius, slice_report, Omae, PenroseCheck,
    RadialProfile, SliceReport, Tolerances, ZasInequality, ZasReport,
};
use zas_core::models::{build, load_profile, ModelSpec};
use zas_core::sweep::{counterexample, counterexample_threshold, cylinder_sweep, table2, TABLE2_ALPHAS};
use zas_core::verify::{verify, Scope, VerifyConfig};
use zas_core::{Error, Execution};

use output::{flag, mass, num, opt, CsvTable, Emitter, Format};

#[derive(Parser, Debug)]
#[command(name = "zas", version, about = "Zero area singularities of spherically symmetric metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for output files; without it results go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma separated subset of csv, json, svg.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Vec<Format>,
    /// Quadrature tolerance override in [1e-12, 1e-3].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Number of points in a sweep.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct Input {
    /// Built-in model, e.g. `schwarzschild:m=-1`, `power-law:alpha=4/3`,
    /// `cylinder:mbar=1,L=4`, `sin-bump:eps=0.1`, `flat`.
    #[arg(long, conflicts_with = "profile")]
    model: Option<String>,
    /// JSON profile file.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the inner boundary as a zero area singularity.
    Classify(Input),
    /// Slice quantities, ADM mass, horizon and inequality checks.
    Report {
        #[command(flatten)]
        input: Input,
        /// Arclength radii of the reported spheres.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 1.0, 2.0, 5.0])]
        rho: Vec<f64>,
    },
    /// Capacity, mass and regularity of `A = 4πr^α` near the origin.
    Table2,
    /// ADM and ZAS mass of the cylinder model against the cylinder length.
    CylinderSweep {
        #[arg(long, default_value_t = 1.0)]
        mbar: f64,
        #[arg(long, default_value_t = 100.0)]
        l_max: f64,
    },
    /// Whether the harmonic factor with a minimal inner boundary vanishes.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 0.8, 0.85, 0.87, 0.9, 1.0])]
        eps: Vec<f64>,
    },
    /// Run the invariant suites.
    Verify {
        /// all, numeric_kernel, radial_geometry, conformal_toolkit or model_library.
        #[arg(long, default_value = "all")]
        scope: String,
    },
}

/// Exit status classes.
#[derive(Debug)]
enum Failure {
    Compute(String),
    Input(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Ctx {
    tol: Tolerances,
    seed: u64,
    steps: Option<usize>,
    exec: Execution,
}

fn resolve(input: &Input, ctx: &Ctx) -> Outcome<(String, RadialProfile)> {
    let (name, p) = match (&input.model, &input.profile) {
        (Some(m), None) => {
            let spec: ModelSpec = m.parse()?;
            (spec.to_string(), build(&spec)?.profile)
        }
        (None, Some(path)) => (path.display().to_string(), load_profile(path)?),
        _ => return Err(Failure::Input("give exactly one of --model or --profile".into())),
    };
    Ok((name, p.with_tolerances(ctx.tol)))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct ClassifyOutput {
    source: String,
    report: ZasReport,
}

fn cmd_classify(input: &Input, ctx: &Ctx, em: &Emitter) -> Outcome<()> {
    let (source, p) = resolve(input, ctx)?;
    let r = classify_zas(&p)?;
    let mut text = format!("source: {source}\n");
    text += &format!("capacity: {} ({})\n", num(r.capacity), r.capacity_sign);
    text += &format!("mass: {}\n", mass(r.mass));
    text += &format!(
        "origin exponent: {} ({})\n",
        num(r.origin_exponent),
        if r.exponent_declared { "declared" } else { "estimated" }
    );
    text += &format!("regular: {}\n", flag(r.regular));
    text += &format!(
        "harmonically regular: {}{}\n",
        flag(r.harmonically_regular),
        r.log_slope.map(|k| format!(" (log slope {k:e})")).unwrap_or_default()
    );
    text += &format!(
        "removable: {}{}\n",
        flag(r.removable),
        r.leading_coefficient
            .map(|c| format!(" (leading coefficient {c})"))
            .unwrap_or_default()
    );
    let table = CsvTable::new(
        &["source", "capacity", "capacity_sign", "mass", "origin_exponent", "regular", "harmonically_regular", "removable", "log_slope"],
        vec![vec![
            source.clone(),
            num(r.capacity),
            r.capacity_sign.to_string(),
            mass(r.mass),
            num(r.origin_exponent),
            r.regular.to_string(),
            r.harmonically_regular.to_string(),
            r.removable.to_string(),
            opt(r.log_slope),
        ]],
    );
    em.emit("classify", &text, Some(&table), &ClassifyOutput { source, report: r }, None)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
enum Checked<T> {
    Ok(T),
    Err(String),
}

impl<T> From<zas_core::Result<T>> for Checked<T> {
    fn from(r: zas_core::Result<T>) -> Self {
        match r {
            Ok(v) => Checked::Ok(v),
            Err(e) => Checked::Err(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct ProfileReport {
    source: String,
    slices: Vec<SliceReport>,
    adm_mass: f64,
    omae: Omae,
    penrose: Checked<PenroseCheck>,
    zas_inequality: Checked<ZasInequality>,
    zas: Checked<ZasReport>,
}

fn cmd_report(input: &Input, rho: &[f64], ctx: &Ctx, em: &Emitter) -> Outcome<()> {
    let (source, p) = resolve(input, ctx)?;
    let slices = rho
        .iter()
        .map(|&r| slice_report(&p, r))
        .collect::<zas_core::Result<Vec<_>>>()?;
    let report = ProfileReport {
        source,
        slices,
        adm_mass: adm_mass(&p)?,
        omae: omae_radius(&p)?,
        penrose: check_penrose(&p).into(),
        zas_inequality: check_zas_inequality(&p).into(),
        zas: classify_zas(&p).into(),
    };
    let mut text = format!("source: {}\nADM mass: {}\n", report.source, num(report.adm_mass));
    text += &format!(
        "outermost minimal sphere: s = {}, area = {}, H = {}\n",
        num(report.omae.s),
        num(report.omae.area),
        num(report.omae.mean_curvature)
    );
    text += &match &report.penrose {
        Checked::Ok(c) => format!("Penrose: holds {}, equality {}\n", flag(c.holds), flag(c.equality)),
        Checked::Err(e) => format!("Penrose: not checked ({e})\n"),
    };
    text += &match &report.zas_inequality {
        Checked::Ok(c) => format!(
            "ZAS inequality: m = {} vs m_ZAS = {}, holds {}, equality {}\n",
            num(c.adm),
            mass(c.zas_mass),
            flag(c.holds),
            flag(c.equality)
        ),
        Checked::Err(e) => format!("ZAS inequality: not checked ({e})\n"),
    };
    text += &format!("{:>10} {:>14} {:>14} {:>14} {:>14} {:>14}\n", "rho", "area", "H", "m_Hawking", "capacity", "m_reg");
    for s in &report.slices {
        text += &format!(
            "{:>10} {:>14.8} {:>14.8} {:>14.8} {:>14.8} {:>14.8}\n",
            num(s.rho),
            s.area,
            s.mean_curvature,
            s.hawking_mass,
            s.slice_capacity,
            s.slice_reg_mass
        );
    }
    let table = CsvTable::new(
        &["rho", "area", "mean_curvature", "hawking_mass", "capacity", "reg_mass"],
        report
            .slices
            .iter()
            .map(|s| {
                vec![
                    num(s.rho),
                    num(s.area),
                    num(s.mean_curvature),
                    num(s.hawking_mass),
                    num(s.slice_capacity),
                    num(s.slice_reg_mass),
                ]
            })
            .collect(),
    );
    em.emit("report", &text, Some(&table), &report, None)
}

fn cmd_table2(ctx: &Ctx, em: &Emitter) -> Outcome<()> {
    let rows = table2(&TABLE2_ALPHAS, ctx.exec)?;
    let mut text = format!(
        "{:>8} {:>10} {:>22} {:>8} {:>21} {:>10}\n",
        "alpha", "capacity", "mass", "regular", "harmonically regular", "removable"
    );
    for r in &rows {
        text += &format!(
            "{:>8.4} {:>10} {:>22} {:>8} {:>21} {:>10}\n",
            r.alpha,
            r.capacity_sign.to_string(),
            mass(r.mass),
            flag(r.regular),
            flag(r.harmonically_regular),
            flag(r.removable)
        );
    }
    let table = CsvTable::new(
        &["alpha", "capacity_sign", "capacity", "mass", "regular", "harmonically_regular", "removable"],
        rows.iter()
            .map(|r| {
                vec![
                    num(r.alpha),
                    r.capacity_sign.to_string(),
                    num(r.capacity),
                    mass(r.mass),
                    r.regular.to_string(),
                    r.harmonically_regular.to_string(),
                    r.removable.to_string(),
                ]
            })
            .collect(),
    );
    em.emit("table2", &text, Some(&table), &rows, None)
}

fn cmd_cylinder_sweep(mbar: f64, l_max: f64, ctx: &Ctx, em: &Emitter) -> Outcome<()> {
    let rows = cylinder_sweep(mbar, l_max, ctx.steps.unwrap_or(101), ctx.exec)?;
    let mut text = format!("{:>10} {:>14} {:>14} {:>6}\n", "L", "m", "m_ZAS", "m>=m_ZAS");
    for r in &rows {
        text += &format!(
            "{:>10.4} {:>14.8} {:>14} {:>6}\n",
            r.length,
            r.adm,
            mass(r.zas_mass),
            flag(r.holds)
        );
    }
    let table = CsvTable::new(
        &["L", "m", "m_ZAS", "holds", "equality"],
        rows.iter()
            .map(|r| vec![num(r.length), num(r.adm), mass(r.zas_mass), r.holds.to_string(), r.equality.to_string()])
            .collect(),
    );
    let chart = svg::line_chart(
        &format!("Cylinder model, mbar = {mbar}"),
        "L",
        "mass",
        &[
            svg::Series {
                label: "m",
                points: rows.iter().map(|r| (r.length, r.adm)).collect(),
            },
            svg::Series {
                label: "m_ZAS",
                points: rows.iter().map(|r| (r.length, r.zas_mass.value())).collect(),
            },
        ],
    );
    em.emit("cylinder_sweep", &text, Some(&table), &rows, Some(&chart))
}

fn cmd_counterexample(eps: &[f64], ctx: &Ctx, em: &Emitter) -> Outcome<()> {
    let rows = counterexample(eps, ctx.exec)?;
    let mut text = format!("threshold: eps = {:.6}\n", counterexample_threshold());
    text += &format!("{:>8} {:>12} {:>9} {:>12}\n", "eps", "u'(0)/u(0)", "vanishes", "first zero");
    for r in &rows {
        text += &format!(
            "{:>8.4} {:>12.6} {:>9} {:>12}\n",
            r.eps,
            r.ratio,
            flag(r.vanishes),
            r.first_zero.map(|z| format!("{z:.6}")).unwrap_or_else(|| "-".into())
        );
    }
    let table = CsvTable::new(
        &["eps", "ratio", "vanishes", "first_zero", "flux_available", "flux_to_zero"],
        rows.iter()
            .map(|r| {
                vec![
                    num(r.eps),
                    num(r.ratio),
                    r.vanishes.to_string(),
                    opt(r.first_zero),
                    num(r.flux_available),
                    num(r.flux_to_zero),
                ]
            })
            .collect(),
    );
    em.emit("counterexample", &text, Some(&table), &rows, None)
}

fn cmd_verify(scope: &str, ctx: &Ctx, em: &Emitter) -> Outcome<()> {
    let scope: Scope = scope.parse()?;
    let cfg = VerifyConfig {
        tol: ctx.tol,
        seed: ctx.seed,
        exec: ctx.exec,
    };
    let report = verify(scope, &cfg);
    let mut text = String::new();
    for c in &report.checks {
        text += &format!(
            "{} {}::{} residual {} gate {}{}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            num(c.residual),
            num(c.gate),
            c.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    text += &format!("{} checks, {failed} failed\n", report.checks.len());
    let table = CsvTable::new(
        &["suite", "name", "residual", "gate", "passed"],
        report
            .checks
            .iter()
            .map(|c| vec![c.suite.to_string(), c.name.clone(), num(c.residual), num(c.gate), c.passed.to_string()])
            .collect(),
    );
    em.emit("verify", &text, Some(&table), &report, None)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        if !(1e-12..=1e-3).contains(&t) {
            return Err(Failure::Input(format!("--tol {t} is outside [1e-12, 1e-3]")));
        }
        tol.quad = t;
    }
    if let Some(s) = cli.steps {
        if s < 2 {
            return Err(Failure::Input(format!("--steps {s} is below 2")));
        }
    }
    let ctx = Ctx {
        tol,
        seed: cli.seed,
        steps: cli.steps,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
    };
    let em = Emitter::new(cli.out.clone(), cli.format.clone())?;
    match &cli.command {
        Command::Classify(input) => cmd_classify(input, &ctx, &em),
        Command::Report { input, rho } => cmd_report(input, rho, &ctx, &em),
        Command::Table2 => cmd_table2(&ctx, &em),
        Command::CylinderSweep { mbar, l_max } => cmd_cylinder_sweep(*mbar, *l_max, &ctx, &em),
        Command::Counterexample { eps } => cmd_counterexample(eps, &ctx, &em),
        Command::Verify { scope } => cmd_verify(scope, &ctx, &em),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("invalid input: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(3)
        }
    }
}
