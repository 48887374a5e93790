use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conical::design::{verify, VerificationReport, DEFAULT_TOL, DEFAULT_UNITARY_SAMPLES};
use conical::io::{
    load_design_file, read_json, to_canonical_json, write_json, DecompositionFile, DesignFile,
    DesignMetadata, ProjectorFile, SearchResultFile,
};
use conical::polytope::validate_projector;
use conical::werner::{Family, Target};
use conical::{
    cp_search, mub_prime, mum_inball, random_rotate, sic_fixture, sim_inball,
    symmetric_decomposition, theorem3_design, ConicalDesign, Error, SearchConfig,
};

#[derive(Parser)]
#[command(name = "conical", version, about = "Conical 2-design toolkit")]
struct Cli {
    /// Worker threads for parallel search (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Sim,
    Mum,
    Mub,
    Sic,
    Theorem3,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Sim => "sim",
            Kind::Mum => "mum",
            Kind::Mub => "mub",
            Kind::Sic => "sic",
            Kind::Theorem3 => "theorem3",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Werner,
    Isotropic,
}

#[derive(Subcommand)]
enum Command {
    /// Build a design and write it as JSON
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        dim: usize,
        /// Contraction parameter for sim/mum (default 1/(d-1))
        #[arg(long)]
        kappa: Option<f64>,
        /// Element trace for sim/theorem3 (default: the POVM normalization d/m)
        #[arg(long)]
        trace: Option<f64>,
        /// Design projector for theorem3
        #[arg(long)]
        projector: Option<PathBuf>,
        /// Apply a seeded random rotation of the Bloch vectors
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check whether a design file is a conical 2-design
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_UNITARY_SAMPLES)]
        unitary_samples: usize,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Search for the largest contraction realizing a design projector
    Search {
        #[arg(long)]
        projector: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Symmetric decomposition of a separable Werner or isotropic state
    Decompose {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        dim: usize,
        /// p for Werner states, F for isotropic states
        #[arg(long)]
        param: f64,
        /// Homogeneous design to decompose with
        #[arg(long)]
        design: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse(_) => 3,
            Error::NotADesign(_) | Error::NoDecomposition(_) => 1,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

/// Parse-level failures of input files are I/O errors; everything else keeps its class.
fn input_error(path: &Path, e: Error) -> Failure {
    match e {
        Error::Io(_) | Error::Parse(_) | Error::NotHermitian { .. } | Error::Dimension(_) => {
            Failure::new(3, format!("{}: {e}", path.display()))
        }
        other => other.into(),
    }
}

fn load_projector(path: &Path) -> Result<ProjectorFile, Failure> {
    read_json(path).map_err(|e| input_error(path, e))
}

fn construct(
    kind: Kind,
    dim: usize,
    kappa: Option<f64>,
    trace: Option<f64>,
    projector: Option<&Path>,
    seed: Option<u64>,
    output: &Path,
) -> CmdResult {
    let mut metadata = DesignMetadata {
        generator: format!("conical construct --kind {}", kind.tag()),
        seed,
        ..Default::default()
    };
    let inball = 1.0 / (dim as f64 - 1.0);
    let design = match kind {
        Kind::Sim => {
            let kappa = kappa.unwrap_or(inball);
            let t = trace.unwrap_or(1.0 / dim as f64);
            metadata.parameters.insert("kappa".into(), kappa);
            metadata.parameters.insert("trace".into(), t);
            sim_inball(dim, kappa, t)?
        }
        Kind::Mum => {
            let kappa = kappa.unwrap_or(inball);
            metadata.parameters.insert("kappa".into(), kappa);
            mum_inball(dim, kappa)?
        }
        Kind::Mub => mub_prime(dim)?,
        Kind::Sic => sic_fixture(dim)?,
        Kind::Theorem3 => {
            let path = projector.ok_or_else(|| Failure::new(2, "theorem3 requires --projector"))?;
            let file = load_projector(path)?;
            if file.dimension != dim {
                return Err(Failure::new(
                    2,
                    format!("projector file is for d={}, --dim is {dim}", file.dimension),
                ));
            }
            let p = file.validate(DEFAULT_TOL)?;
            let t = trace.unwrap_or(dim as f64 / p.m() as f64);
            metadata.parameters.insert("trace".into(), t);
            theorem3_design(&p, t)?
        }
    };
    let design = match seed {
        Some(s) => random_rotate(&design, s)?,
        None => design,
    };
    let file = DesignFile::from_design(&design, Some(kind.tag()), metadata);
    write_json(output, &file)?;
    println!(
        "wrote {} operators (d={dim}, kind={}) to {}",
        design.len(),
        kind.tag(),
        output.display()
    );
    Ok(0)
}

fn print_report(r: &VerificationReport) {
    println!("design: {}", if r.is_design { "yes" } else { "no" });
    println!(
        "d = {}, m = {}, tol = {:e}",
        r.dimension, r.cardinality, r.tolerance
    );
    let v = &r.verdicts;
    let rs = &r.residuals;
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    println!("  (ii)  residual {:.3e} {}", rs.cond_ii, mark(v.cond_ii));
    println!("  (iii) residual {:.3e} {}", rs.cond_iii, mark(v.cond_iii));
    println!("  (iv)  residual {:.3e} {}", rs.cond_iv, mark(v.cond_iv));
    println!("  (v)   residual {:.3e} {}", rs.cond_v, mark(v.cond_v));
    if let Some(ok) = v.cond_i_sampled {
        println!(
            "  (i)   sampled residual {:.3e} {} ({} unitaries)",
            rs.cond_i_sampled,
            mark(ok),
            r.unitary_samples
        );
    }
    println!(
        "  spanning: {} (Gram rank {}), cardinality ok: {}",
        r.spanning, r.gram_rank, r.cardinality_ok
    );
    if let Some(p) = &r.parameters {
        println!(
            "k_s = {:.9}, k_a = {:.3e}, k_+ = {:.9}, k_- = {:.9}",
            p.k_s, p.k_a, p.k_plus, p.k_minus
        );
        println!("t = {:.9}, kappa = {:.9}", p.t, p.kappa);
    }
}

fn verify_cmd(file: &Path, tol: f64, samples: usize, json: bool) -> CmdResult {
    let parsed = load_design_file(file).map_err(|e| input_error(file, e))?;
    let design: ConicalDesign = match parsed.to_design() {
        Ok(d) => d,
        // positive semi-definiteness is part of the verdict
        Err(Error::Domain(msg)) => {
            println!("design: no ({msg})");
            return Ok(1);
        }
        Err(e) => return Err(input_error(file, e)),
    };
    let report = verify(&design, tol, samples);
    if json {
        print!("{}", to_canonical_json(&report)?);
    } else {
        print_report(&report);
    }
    Ok(if report.is_design { 0 } else { 1 })
}

fn search_cmd(
    projector: &Path,
    restarts: usize,
    iters: usize,
    seed: u64,
    output: &Path,
) -> CmdResult {
    let file = load_projector(projector)?;
    let p = validate_projector(&file.matrix()?, file.dimension, DEFAULT_TOL)?;
    let config = SearchConfig {
        restarts,
        max_iters: iters,
        seed,
        ..Default::default()
    };
    let result = cp_search(&p, &config)?;
    write_json(output, &SearchResultFile::from_result(&result))?;
    println!("best kappa = {:.12}", result.best_kappa);
    println!("floor = 1/(d-1) = {}", result.floor);
    println!("witness Gram residual = {:.3e}", result.witness_residual);
    Ok(0)
}

fn decompose_cmd(
    family: FamilyArg,
    dim: usize,
    param: f64,
    design: Option<&Path>,
    output: &Path,
) -> CmdResult {
    let family = match family {
        FamilyArg::Werner => Family::Werner,
        FamilyArg::Isotropic => Family::Isotropic,
    };
    let source = match design {
        Some(path) => {
            let file = load_design_file(path).map_err(|e| input_error(path, e))?;
            Some(file.to_design().map_err(|e| input_error(path, e))?)
        }
        None => None,
    };
    let target = Target::new(family, dim, param)?;
    let report = match symmetric_decomposition(&target, source.as_ref()) {
        Ok(r) => r,
        Err(Error::NoDecomposition(msg)) => {
            eprintln!("no symmetric decomposition exists: {msg}");
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    write_json(output, &DecompositionFile::from_report(&report))?;
    println!(
        "{} d={dim} parameter={param}: {} terms from {}, residual {:.3e}",
        family.as_str(),
        report.weights.len(),
        report.source,
        report.residual
    );
    println!(
        "homogeneous={} pure={} ideal={}",
        report.flags.homogeneous, report.flags.pure, report.flags.ideal
    );
    if family == Family::Isotropic {
        let kappa = conical::werner::kappa_for_fidelity(dim, param);
        println!(
            "F = {param} maps to kappa = {kappa:.12}, Werner p = {:.12}",
            conical::werner::werner_for_kappa(dim, kappa)
        );
    }
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(2, format!("cannot configure {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Construct {
            kind,
            dim,
            kappa,
            trace,
            projector,
            seed,
            output,
        } => construct(kind, dim, kappa, trace, projector.as_deref(), seed, &output),
        Command::Verify {
            file,
            tol,
            unitary_samples,
            json,
        } => verify_cmd(&file, tol, unitary_samples, json),
        Command::Search {
            projector,
            restarts,
            iters,
            seed,
            output,
        } => search_cmd(&projector, restarts, iters, seed, &output),
        Command::Decompose {
            family,
            dim,
            param,
            design,
            output,
        } => decompose_cmd(family, dim, param, design.as_deref(), &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
