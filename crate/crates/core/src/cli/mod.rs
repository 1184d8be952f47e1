//! Command-line front end.

mod modelfile;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

pub use modelfile::{format_model, parse_model_file, parse_model_text, ModelFile};
pub use report::{Format, Report};

use crate::cohomology::{
    cohomology_basis, cohomology_table, formal_dimension, is_elliptic, same_class_up_to_scalar,
    toomer_oracle_with_bound, top_class_with_bound, EllipticStatus, ToomerResult,
};
use crate::differential::{PureModel, SullivanModel};
use crate::error::{Error, Result};
use crate::murillo::{coefficient_matrix, murillo_fundamental_class};
use crate::selftest;
use crate::spectral::{delta_cohomology, toomer_spectral_detailed, LiftOutcome, SpectralToomer};

#[derive(Debug, Parser)]
#[command(name = "sullivan", version, about = "Exact computations on Sullivan minimal models")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    pub format: Format,
    /// Highest degree scanned by the ellipticity test.
    #[arg(long, global = true)]
    pub max_degree: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToomerMethod {
    Oracle,
    Spectral,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generators, k, formal dimension.
    Info { model: PathBuf },
    /// Parse and validate a model file.
    Validate { model: PathBuf },
    /// Cohomology in one degree, or dimensions over a range.
    Cohomology {
        model: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        to: Option<u32>,
    },
    /// Ellipticity with its certificate.
    Elliptic { model: PathBuf },
    /// A representative of the fundamental class.
    TopClass { model: PathBuf },
    /// The fundamental class of a pure model by the determinant formula.
    Murillo { model: PathBuf },
    /// δ-cohomology of the word-length spectral sequence in one degree.
    DeltaCohomology {
        model: PathBuf,
        #[arg(long)]
        degree: u32,
    },
    /// The Toomer invariant e₀.
    Toomer {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = ToomerMethod::Both)]
        method: ToomerMethod,
    },
    /// Everything above, best effort.
    Report { model: PathBuf },
    /// Randomized identity checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = selftest::DEFAULT_CASES)]
        cases: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Validate { .. } => "validate",
            Command::Cohomology { .. } => "cohomology",
            Command::Elliptic { .. } => "elliptic",
            Command::TopClass { .. } => "top-class",
            Command::Murillo { .. } => "murillo",
            Command::DeltaCohomology { .. } => "delta-cohomology",
            Command::Toomer { .. } => "toomer",
            Command::Report { .. } => "report",
            Command::Selftest { .. } => "selftest",
        }
    }

    fn model_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Info { model }
            | Command::Validate { model }
            | Command::Cohomology { model, .. }
            | Command::Elliptic { model }
            | Command::TopClass { model }
            | Command::Murillo { model }
            | Command::DeltaCohomology { model, .. }
            | Command::Toomer { model, .. }
            | Command::Report { model } => Some(model),
            Command::Selftest { .. } => None,
        }
    }
}

/// Runs one command. A returned report may still carry a failure, which
/// decides the exit status after the report is printed.
pub fn run(cli: &Cli) -> Result<Report> {
    let mut report = Report::new(cli.command.name());
    let file = match cli.command.model_path() {
        Some(path) => {
            let file = parse_model_file(path)?;
            let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into());
            report.put("input.file", name);
            Some(file)
        }
        None => None,
    };
    let bound = cli.max_degree;
    match (&cli.command, file.as_ref().map(|f| &f.model)) {
        (Command::Info { .. }, Some(m)) => info(&mut report, m),
        (Command::Validate { .. }, Some(m)) => {
            report.put("validate.ok", true);
            report.put("validate.generators", m.algebra().len());
            report.put("validate.k", k_text(m));
        }
        (Command::Cohomology { degree, to, .. }, Some(m)) => cohomology(&mut report, m, *degree, *to)?,
        (Command::Elliptic { .. }, Some(m)) => {
            let _ = elliptic(&mut report, m, bound);
        }
        (Command::TopClass { .. }, Some(m)) => {
            let t = report.time("top_class", || top_class_with_bound(m, bound))?;
            report.put("top_class.degree", t.degree);
            report.put("top_class.representative", m.algebra().format(t.representative()));
        }
        (Command::Murillo { .. }, Some(m)) => murillo(&mut report, m)?,
        (Command::DeltaCohomology { degree, .. }, Some(m)) => {
            let h = report.time("delta", || delta_cohomology(m, *degree))?;
            delta_summary(&mut report, m, &h);
        }
        (Command::Toomer { method, .. }, Some(m)) => toomer(&mut report, m, *method, bound)?,
        (Command::Report { .. }, Some(m)) => full_report(&mut report, m, bound)?,
        (Command::Selftest { seed, cases }, _) => {
            let r = report.time("selftest", || selftest::run(*seed, *cases));
            report.put("selftest.seed", r.seed);
            for c in &r.checks {
                let key = c.name.replace(' ', "_");
                report.put(format!("selftest.{key}.cases"), c.cases);
                report.put(format!("selftest.{key}.failures"), c.failures.len());
                for (i, f) in c.failures.iter().take(5).enumerate() {
                    report.put(format!("selftest.{key}.failure.{i}"), f);
                }
            }
            report.put("selftest.passed", r.passed());
            if !r.passed() {
                report.fail(Error::Internal("selftest found failures".into()));
            }
        }
        (_, None) => return Err(Error::Usage("a model file is required".into())),
    }
    Ok(report)
}

fn k_text(m: &SullivanModel) -> String {
    m.k().map_or_else(|| "none".into(), |k| k.to_string())
}

fn info(report: &mut Report, m: &SullivanModel) {
    let alg = m.algebra();
    let names: Vec<&str> = alg.generators().iter().map(|g| g.name.as_str()).collect();
    let degrees: Vec<String> = alg.generators().iter().map(|g| g.degree.to_string()).collect();
    report.put("model.generators", names.join(" "));
    report.put("model.degrees", degrees.join(" "));
    for g in alg.generators() {
        report.put(format!("model.d.{}", g.name), alg.format(m.differential().image(g.index)));
    }
    report.put("model.k", k_text(m));
    report.put("model.formal_dimension", formal_dimension(m));
    report.put("model.dim_even", m.dim_even());
    report.put("model.dim_odd", m.dim_odd());
    report.put("model.pure", m.is_pure());
    if let Some(k) = m.k() {
        report.put("model.lechuga_murillo", (k - 2) * m.dim_even() + m.dim_odd());
    }
}

fn cohomology(report: &mut Report, m: &SullivanModel, degree: u32, to: Option<u32>) -> Result<()> {
    match to {
        Some(top) if top < degree => Err(Error::Usage(format!("--to {top} is below --degree {degree}"))),
        Some(top) => {
            let table = report.time("cohomology", || cohomology_table(m, degree..=top));
            for (n, dim) in table {
                report.put(format!("cohomology.dim.{n}"), dim);
            }
            Ok(())
        }
        None => {
            let space = report.time("cohomology", || cohomology_basis(m, degree));
            report.put(format!("cohomology.dim.{degree}"), space.dimension());
            for (i, r) in space.representatives.iter().enumerate() {
                report.put(format!("cohomology.basis.{degree}.{i}"), m.algebra().format(r));
            }
            Ok(())
        }
    }
}

/// Reports the certificate; the result says whether the model is elliptic.
fn elliptic(report: &mut Report, m: &SullivanModel, bound: Option<u32>) -> Result<()> {
    let e = report.time("elliptic", || is_elliptic(m, bound));
    report.put("elliptic.formal_dimension", e.formal_dimension);
    report.put("elliptic.scan_bound", e.bound);
    match &e.status {
        EllipticStatus::Elliptic { window_start } => {
            report.put("elliptic.status", "elliptic");
            report.put("elliptic.vanishes_from", window_start);
        }
        EllipticStatus::NotElliptic { degrees_above_n } => {
            report.put("elliptic.status", "not elliptic");
            report.put("elliptic.nonzero_above_n", join(degrees_above_n));
        }
        EllipticStatus::Inconclusive => report.put("elliptic.status", "inconclusive"),
    }
    let degrees: Vec<u32> = e.nonzero_quotient.iter().map(|(n, _)| *n).collect();
    report.put("elliptic.quotient_degrees", join(&degrees));
    e.require()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn murillo(report: &mut Report, m: &SullivanModel) -> Result<()> {
    let pure = PureModel::new(m.clone())?;
    let alg = m.algebra();
    let a = coefficient_matrix(&pure);
    for r in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|c| alg.format(a.entry(r, c))).collect();
        report.put(format!("murillo.matrix.{}", alg.generator(a.odd[r]).name), format!("[{}]", row.join(", ")));
    }
    let omega = report.time("murillo", || murillo_fundamental_class(&pure))?;
    report.put("murillo.fundamental_class", alg.format(&omega));
    Ok(())
}

fn delta_summary(report: &mut Report, m: &SullivanModel, h: &crate::spectral::DeltaCohomology) {
    let alg = m.algebra();
    report.put("delta.degree", h.degree);
    report.put("delta.dimension", h.dimension());
    for f in &h.by_filtration {
        report.put(format!("delta.p.{}.dim", f.p), f.classes.len());
        for c in &f.classes {
            report.put(format!("delta.p.{}.class.{}", f.p, c.index), c.representative.display(alg));
        }
    }
}

fn put_toomer(report: &mut Report, m: &SullivanModel, key: &str, r: &ToomerResult) {
    report.put(format!("toomer.{key}.e0"), r.e0);
    report.put(format!("toomer.{key}.representative"), m.algebra().format(&r.representative));
    if let Some(w) = &r.witness {
        report.put(format!("toomer.{key}.witness.p"), w.filtration);
        report.put(format!("toomer.{key}.witness.parity"), if w.odd { "odd" } else { "even" });
    }
}

fn toomer(report: &mut Report, m: &SullivanModel, method: ToomerMethod, bound: Option<u32>) -> Result<()> {
    let oracle = match method {
        ToomerMethod::Spectral => None,
        _ => Some(report.time("toomer.oracle", || toomer_oracle_with_bound(m, bound))?),
    };
    let spectral = match method {
        ToomerMethod::Oracle => None,
        _ => Some(report.time("toomer.spectral", || toomer_spectral_detailed(m, bound))?),
    };
    if let Some(o) = &oracle {
        put_toomer(report, m, "oracle", o);
    }
    if let Some(s) = &spectral {
        put_toomer(report, m, "spectral", &s.result);
    }
    if let (Some(o), Some(s)) = (&oracle, &spectral) {
        agreement(report, o.e0, s.result.e0);
    }
    Ok(())
}

fn agreement(report: &mut Report, oracle: usize, spectral: usize) {
    report.put("toomer.agree", oracle == spectral);
    if oracle != spectral {
        report.fail(Error::Disagreement { oracle, spectral });
    }
}

fn lift_traces(report: &mut Report, m: &SullivanModel, s: &SpectralToomer) {
    let alg = m.algebra();
    for (i, c) in s.candidates.iter().enumerate() {
        let t = &c.trace;
        let key = format!("lift.{i}");
        report.put(format!("{key}.p"), c.class.p);
        report.put(format!("{key}.depth"), c.depth);
        report.put(format!("{key}.combined"), c.combined);
        report.put(format!("{key}.start"), alg.format(&t.start));
        report.put(format!("{key}.l"), t.l);
        report.put(format!("{key}.t_bound"), t.t_bound);
        for (j, step) in t.steps.iter().enumerate() {
            report.put(format!("{key}.step.{j}.obstruction"), step.obstruction.display(alg));
            report.put(format!("{key}.step.{j}.corrector"), alg.format(&step.corrector));
            report.put(format!("{key}.step.{j}.revised"), step.revised);
        }
        let outcome = match &t.outcome {
            LiftOutcome::Success(e) => format!("success {}", alg.format(e)),
            LiftOutcome::Died { step, obstruction } => {
                format!(
                    "died at step {step}: {} at p = {} is not a δ-boundary",
                    obstruction.display(alg),
                    obstruction.p
                )
            }
            LiftOutcome::Collapsed(_) => "collapsed".to_string(),
        };
        report.put(format!("{key}.outcome"), outcome);
    }
}

fn full_report(report: &mut Report, m: &SullivanModel, bound: Option<u32>) -> Result<()> {
    info(report, m);
    if let Err(e) = elliptic(report, m, bound) {
        report.put("report.stopped", e.to_string());
        return Ok(());
    }
    let n = formal_dimension(m) as u32;
    let table = report.time("cohomology", || cohomology_table(m, 0..=n));
    for (i, dim) in table {
        report.put(format!("cohomology.dim.{i}"), dim);
    }
    let top = report.time("top_class", || top_class_with_bound(m, bound))?;
    report.put("top_class.degree", top.degree);
    report.put("top_class.representative", m.algebra().format(top.representative()));

    if m.is_pure() {
        murillo(report, m)?;
        let omega = murillo_fundamental_class(&PureModel::new(m.clone())?)?;
        report.put("murillo.same_class", same_class_up_to_scalar(m, &omega, top.representative(), n));
    } else {
        report.put("murillo.skipped", "model is not pure");
    }

    let oracle = report.time("toomer.oracle", || toomer_oracle_with_bound(m, bound))?;
    put_toomer(report, m, "oracle", &oracle);
    if m.k() != Some(3) {
        report.put("toomer.spectral.skipped", format!("k = {}", k_text(m)));
        return Ok(());
    }
    let s = report.time("toomer.spectral", || toomer_spectral_detailed(m, bound))?;
    put_toomer(report, m, "spectral", &s.result);
    agreement(report, oracle.e0, s.result.e0);
    delta_summary(report, m, &s.delta);
    lift_traces(report, m, &s);
    Ok(())
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            report.set_total(started.elapsed());
            print!("{}", report.render(cli.format));
            match report.failure() {
                Some(e) => {
                    eprintln!("error: {e}");
                    e.kind().exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.kind().exit_code()
        }
    }
}
