use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use singpencil::birep::{solve_system, RootOptions, RootSet};
use singpencil::io::{self, PencilJson};
use singpencil::pencil::DEFAULT_HERM_TOL;
use singpencil::sign::{sign_characteristic, SignReport, DEFAULT_GROUP_TOL};
use singpencil::solver::{solve, ClassCounts, SolveOptions, Warning};
use singpencil::structures::{solve_structured, StructuredKind, StructuredPencil};
use singpencil::testgen::ThompsonSpec;
use singpencil::{ClassTol, ClassifiedSpectrum, EigenClass, Error, HermitianPencil, HomogEigenvalue, Method};

#[derive(Parser)]
#[command(name = "singpencil", version, about = "Eigenvalues of singular Hermitian pencils")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the eigenvalues of a singular pencil.
    Solve(SolveArgs),
    /// Sign characteristic of the real and infinite true eigenvalues.
    Signs(SolveArgs),
    /// Roots of two bivariate polynomials of degree at most 3.
    Roots2d(RootsArgs),
    /// Generate a pencil with known canonical structure.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug)]
struct KArg(Option<usize>);

impl FromStr for KArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(KArg(None));
        }
        s.parse()
            .map(|k| KArg(Some(k)))
            .map_err(|_| format!("k must be 'auto' or a nonnegative integer, got {s:?}"))
    }
}

#[derive(Clone, Copy, Debug)]
struct Structure(Option<StructuredKind>);

impl FromStr for Structure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "hermitian" {
            return Ok(Structure(None));
        }
        s.parse().map(|k| Structure(Some(k)))
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Pencil as one JSON file, or `A` in Matrix Market format when `B` is given.
    a: PathBuf,
    /// `B` in Matrix Market format.
    b: Option<PathBuf>,
    #[arg(long, default_value = "perturb")]
    method: Method,
    /// Rank deficiency, or `auto` for `n - normal rank`.
    #[arg(long, default_value = "auto")]
    k: KArg,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    tau: f64,
    /// Comma-separated prescribed eigenvalues (perturbation only).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    prescribed: Option<Vec<f64>>,
    #[arg(long, env = "SINGPENCIL_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    class_tol: ClassTol,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Append the sign characteristic.
    #[arg(long)]
    signs: bool,
    /// hermitian, even, odd, skew, palindromic or anti-palindromic.
    #[arg(long, default_value = "hermitian")]
    structure: Structure,
    /// Use a positive definite `D_B` and require `tau > 0`.
    #[arg(long)]
    definite: bool,
}

#[derive(Args)]
struct RootsArgs {
    /// Coefficient file with lines `i j a_ij`.
    #[arg(long)]
    p1: PathBuf,
    #[arg(long)]
    p2: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long, env = "SINGPENCIL_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PencilFormat {
    Json,
    Mm,
}

#[derive(Args)]
struct GenArgs {
    /// Canonical-form spec in JSON.
    #[arg(long)]
    spec: PathBuf,
    /// Output prefix; writes `<out>.json` (or `<out>_A.mtx`, `<out>_B.mtx`)
    /// and `<out>.truth.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = PencilFormat::Json)]
    format: PencilFormat,
}

#[derive(Serialize)]
struct Row {
    index: usize,
    eigenvalue: HomogEigenvalue,
    ux_norm: f64,
    uy_norm: f64,
    class: EigenClass,
}

#[derive(Serialize)]
struct SolveReport {
    command: &'static str,
    structure: String,
    method: Method,
    n: usize,
    k: usize,
    normal_rank: usize,
    tau: f64,
    seed: u64,
    definite: bool,
    class_tol: f64,
    class_tol_mode: &'static str,
    prescribed: Vec<HomogEigenvalue>,
    counts: ClassCounts,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    eigenvalues: Vec<Row>,
    warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    signs: Option<SignReport>,
}

/// Outcome of a command: text to print and whether soft warnings occurred.
struct Emitted {
    text: String,
    warned: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(&args, false),
        Command::Signs(args) => run_solve(&args, true),
        Command::Roots2d(args) => run_roots(&args),
        Command::Gen(args) => run_gen(&args),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.warned {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn validate(args: &SolveArgs) -> Result<(), Error> {
    if !(args.tau.is_finite() && args.tau != 0.0) || (args.definite && args.tau <= 0.0) {
        return Err(Error::BadTau(args.tau));
    }
    if args.prescribed.is_some() && args.method != Method::Perturb {
        return Err(Error::BadPrescribed(format!(
            "--prescribed applies to the perturbation method, not {}",
            args.method
        )));
    }
    Ok(())
}

fn run_solve(args: &SolveArgs, signs_only: bool) -> Result<Emitted, Error> {
    validate(args)?;
    let (a, b) = io::read_matrices(&args.a, args.b.as_deref())?;
    let opts = SolveOptions {
        method: args.method,
        k: args.k.0,
        tau: args.tau,
        prescribed: args.prescribed.clone(),
        seed: args.seed,
        class_tol: args.class_tol,
        definite: args.definite,
        ..Default::default()
    };
    // Signs are always those of the Hermitian pencil that was solved.
    let (solution, spectrum) = match args.structure.0 {
        None => {
            let p = HermitianPencil::new(a, b, DEFAULT_HERM_TOL)?;
            let sol = solve(&p, &opts)?;
            let spectrum = sol.spectrum.clone();
            (sol, spectrum)
        }
        Some(kind) => {
            let sp = StructuredPencil::new(kind, a, b, DEFAULT_HERM_TOL)?;
            let s = solve_structured(&sp, &opts)?;
            (s.hermitian, s.spectrum)
        }
    };
    let signs = if args.signs || signs_only {
        Some(sign_characteristic(&solution.regularized, &solution.spectrum, DEFAULT_GROUP_TOL)?)
    } else {
        None
    };
    let n = solution.regularized.n()
        - if args.method == Method::Augment { solution.k } else { 0 }
        + if args.method == Method::Project { solution.k } else { 0 };
    let report = SolveReport {
        command: if signs_only { "signs" } else { "solve" },
        structure: args.structure.0.map_or("hermitian".to_string(), |k| k.to_string()),
        method: args.method,
        n,
        k: solution.k,
        normal_rank: n - solution.k,
        tau: solution.tau,
        seed: solution.seed,
        definite: args.definite,
        class_tol: spectrum.class_tol,
        class_tol_mode: match args.class_tol {
            ClassTol::Auto => "auto",
            ClassTol::Fixed(_) => "fixed",
        },
        prescribed: solution.prescribed.clone(),
        counts: spectrum.counts,
        eigenvalues: if signs_only { Vec::new() } else { rows(&spectrum) },
        warnings: spectrum.warnings.clone(),
        signs,
    };
    let warned = !spectrum.is_clean() || report.signs.as_ref().is_some_and(|s| !s.warnings.is_empty());
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Table => solve_table(&report),
    };
    Ok(Emitted { text, warned })
}

fn rows(s: &ClassifiedSpectrum) -> Vec<Row> {
    s.entries
        .iter()
        .enumerate()
        .map(|(i, e)| Row {
            index: i + 1,
            eigenvalue: e.triplet.value,
            ux_norm: e.ux_norm,
            uy_norm: e.uy_norm,
            class: e.class,
        })
        .collect()
}

fn fmt4(v: &HomogEigenvalue) -> String {
    match v.value() {
        None => "inf".into(),
        Some(z) => format!("{:.4}{:+.4}i", z.re, z.im),
    }
}

fn solve_table(r: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} method={} structure={} n={} k={} tau={} seed={} class_tol={:.3e} ({})",
        r.command, r.method, r.structure, r.n, r.k, r.tau, r.seed, r.class_tol, r.class_tol_mode
    );
    if !r.prescribed.is_empty() {
        let p: Vec<String> = r.prescribed.iter().map(fmt4).collect();
        let _ = writeln!(out, "# prescribed {}", p.join(", "));
    }
    let c = &r.counts;
    let _ = writeln!(
        out,
        "# true={} prescribed={} random={}{}",
        c.n_true,
        c.n_prescribed,
        c.n_random,
        if c.n_extra > 0 { format!(" conjugate={}", c.n_extra) } else { String::new() }
    );
    if !r.eigenvalues.is_empty() {
        let _ = writeln!(out, "{:>4}  {:>22}  {:>10}  {:>10}  type", "j", "eigenvalue", "|U*x|", "|U*y|");
        for row in &r.eigenvalues {
            let _ = writeln!(
                out,
                "{:>4}  {:>22}  {:>10.2e}  {:>10.2e}  {}",
                row.index,
                fmt4(&row.eigenvalue),
                row.ux_norm,
                row.uy_norm,
                row.class
            );
        }
    }
    if let Some(s) = &r.signs {
        let _ = writeln!(out, "{:>22}  {:>4}  {:<8}  inertia", "eigenvalue", "mult", "signs");
        for e in &s.entries {
            let signs: String = e.signs.iter().map(|s| if s.value() > 0.0 { '+' } else { '-' }).collect();
            let inertia: Vec<String> = e.inertia_eigenvalues.iter().map(|x| format!("{x:.4}")).collect();
            let _ = writeln!(
                out,
                "{:>22}  {:>4}  {:<8}  {}",
                fmt4(&e.eigenvalue),
                e.multiplicity,
                signs,
                inertia.join(" ")
            );
        }
        for w in &s.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
    }
    for w in &r.warnings {
        let _ = writeln!(out, "# warning: {w}");
    }
    out
}

#[derive(Serialize)]
struct RootsReport<'a> {
    command: &'static str,
    seed: u64,
    #[serde(flatten)]
    set: &'a RootSet,
}

fn run_roots(args: &RootsArgs) -> Result<Emitted, Error> {
    let p1 = io::read_coefficients(&args.p1)?;
    let p2 = io::read_coefficients(&args.p2)?;
    let set = solve_system(
        &p1,
        &p2,
        &RootOptions {
            seed: args.seed,
            ..Default::default()
        },
    )?;
    let text = if args.json {
        let report = RootsReport {
            command: "roots2d",
            seed: args.seed,
            set: &set,
        };
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        let mut out = String::new();
        for r in &set.roots {
            let _ = writeln!(
                out,
                "({:.4}{:+.4}i, {:.4}{:+.4}i)",
                r.lambda[0], r.lambda[1], r.mu[0], r.mu[1]
            );
        }
        out
    };
    Ok(Emitted { text, warned: false })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_gen(args: &GenArgs) -> Result<Emitted, Error> {
    let spec: ThompsonSpec = serde_json::from_str(&fs::read_to_string(&args.spec)?)?;
    let (p, truth) = spec.assemble()?;
    let mut written = Vec::new();
    match args.format {
        PencilFormat::Json => {
            let path = with_suffix(&args.out, ".json");
            fs::write(&path, serde_json::to_string(&PencilJson::from_pencil(&p))?)?;
            written.push(path);
        }
        PencilFormat::Mm => {
            for (suffix, m) in [("_A.mtx", p.a()), ("_B.mtx", p.b())] {
                let path = with_suffix(&args.out, suffix);
                io::write_matrix_market(&path, m)?;
                written.push(path);
            }
        }
    }
    let truth_path = with_suffix(&args.out, ".truth.json");
    fs::write(&truth_path, serde_json::to_string_pretty(&truth)? + "\n")?;
    written.push(truth_path);
    let text = written.iter().map(|p| format!("{}\n", p.display())).collect();
    Ok(Emitted { text, warned: false })
}
