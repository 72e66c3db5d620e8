use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use sidon_core::alpha_lab::{summarize, AlphaGrid, GridSummary, SweepRow, INV_BETA};
use sidon_core::finite::{gauss_construction_with, greedy_sidon, log_construction_with, Method};
use sidon_core::gaussian::{phi_of, two_squares};
use sidon_core::infinite::{construct, slope_at, Catalog, ConstructOptions, ConstructionParams, VERIFY_LIMIT_K};
use sidon_core::precision::{DyadicRational, Precision, DEFAULT_START_BITS, MAX_PRECISION_BITS};
use sidon_core::verifier::Witness;
use sidon_core::{BigUint, Error};

use crate::manifest::{manifest_path, RemovedElement, RunManifest, RunParams};
use crate::par;
use crate::setfile::{FormatError, SetFile};

pub const PRECISION_CAP_VAR: &str = "SIDON_PRECISION_CAP";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("not a Sidon set: {0}")]
    NotSidon(Witness),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotSidon(_) => 1,
            CliError::Core(Error::PrecisionCapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sidon", version, about = "Sidon sets from Gaussian prime angles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite Sidon set in [0, 2n] (log), [0, n] (gauss), or the first n greedy terms.
    GenFinite {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classes K_MIN..=k_max of the infinite construction at α = alpha_num/2^alpha_bits.
    GenInfinite {
        #[arg(long, default_value_t = 1)]
        alpha_num: u64,
        #[arg(long, default_value_t = 0)]
        alpha_bits: u32,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
        #[arg(long)]
        no_prune: bool,
        /// Skip the final Sidon check; required from k_max = 9 on.
        #[arg(long)]
        no_verify: bool,
        /// Search bad tuples without the angle prefilter.
        #[arg(long)]
        unfiltered: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exit 0 iff FILE holds a Sidon set; otherwise print a witness.
    Verify { file: PathBuf },
    /// T_KL and A_KL over a dyadic α grid, as CSV.
    Sweep {
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        #[arg(long, default_value_t = 5)]
        grid_bits: u32,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        /// Repeat on the doubled grid and report both averages.
        #[arg(long)]
        convergence: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decimal enclosure of φ_p = arctan(b/a)/π.
    Phi {
        p: u64,
        #[arg(long, default_value_t = 64)]
        bits: u32,
    },
    /// p = a^2 + b^2 with a > b > 0.
    Factor { p: u64 },
    /// S(x): elements of FILE that are at most x.
    Count {
        file: PathBuf,
        #[arg(long, value_parser = parse_biguint)]
        x: BigUint,
    },
    /// log₂ S(x) / log₂ x at x = 2^((K+2)²) for each class K of FILE.
    Slope {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
    },
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

/// Precision policy, with the cap taken from the environment if set.
pub fn precision_from_env() -> Result<Precision, CliError> {
    let cap = match std::env::var(PRECISION_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .map_err(|_| CliError::Usage(format!("{PRECISION_CAP_VAR} must be an integer, got `{v}`")))?,
        Err(_) => MAX_PRECISION_BITS,
    };
    Ok(Precision::new(DEFAULT_START_BITS.min(cap), cap)?)
}

fn base_params(precision: &Precision) -> RunParams {
    RunParams {
        precision_start_bits: precision.start_bits,
        precision_cap_bits: precision.cap_bits,
        ..RunParams::default()
    }
}

fn emit(set: &SetFile, out: Option<&Path>, manifest: &RunManifest) -> Result<(), CliError> {
    match out {
        Some(path) => {
            set.write_path(path)?;
            manifest.write_path(&manifest_path(path))?;
        }
        None => set.write_to(std::io::stdout().lock())?,
    }
    Ok(())
}

pub fn run(cli: Cli, argv: Vec<String>) -> Result<(), CliError> {
    let precision = precision_from_env()?;
    match cli.command {
        Command::GenFinite { method, n, out } => gen_finite(method, n, out.as_deref(), &precision, argv),
        Command::GenInfinite { alpha_num, alpha_bits, k_max, no_prune, no_verify, unfiltered, out } => {
            let opts = ConstructOptions { prune: !no_prune, filtered: !unfiltered };
            let gen = GenInfinite { alpha_num, alpha_bits, k_max, opts, verify: !no_verify };
            gen.run(out.as_deref(), &precision, argv)
        }
        Command::Verify { file } => verify(&file),
        Command::Sweep { k_max, grid_bits, stride, convergence, out } => {
            sweep(k_max, grid_bits, stride, convergence, out.as_deref(), &precision, argv)
        }
        Command::Phi { p, bits } => {
            let angle = phi_of(p, bits)?;
            let digits = (bits as u64 * 30103 / 100_000) as u32;
            let (lo, hi) = angle.enclosure().to_decimal(digits.max(1));
            println!("phi({p}) in [{lo}, {hi}]");
            Ok(())
        }
        Command::Factor { p } => {
            let d = two_squares(p)?;
            println!("{p} = {}^2 + {}^2", d.a(), d.b());
            Ok(())
        }
        Command::Count { file, x } => {
            let mut set = SetFile::read_path(&file)?.elements;
            set.sort();
            println!("{}", sidon_core::infinite::counting(&set, &x));
            Ok(())
        }
        Command::Slope { file, k_max } => {
            let mut set = SetFile::read_path(&file)?.elements;
            set.sort();
            println!("K,x_log2,S(x),slope");
            for k in sidon_core::infinite::K_MIN..=k_max {
                let row = slope_at(&set, k);
                let slope = row.slope.map_or_else(|| "-".to_owned(), |s| format!("{s:.4}"));
                println!("{k},{},{},{slope}", row.x_log2, row.count);
            }
            println!("asymptotic target {INV_BETA:.4}");
            Ok(())
        }
    }
}

fn gen_finite(
    method: Method,
    n: u64,
    out: Option<&Path>,
    precision: &Precision,
    argv: Vec<String>,
) -> Result<(), CliError> {
    let start = Instant::now();
    let set = match method {
        Method::Greedy => greedy_sidon(usize::try_from(n).map_err(|_| Error::OutOfRange(n))?)?,
        Method::Log => log_construction_with(n, precision)?,
        Method::Gauss => gauss_construction_with(n, precision)?,
    };
    let mut params = base_params(precision);
    params.method = Some(method.name().to_owned());
    params.n = Some(n);
    let mut manifest = RunManifest::new(argv, params);
    manifest.time("generate", start.elapsed());
    manifest.counts.elements = set.len();
    let file =
        SetFile::new(set.elements.iter().map(|&x| BigUint::from(x)).collect()).with("method", method).with("n", n);
    emit(&file, out, &manifest)
}

struct GenInfinite {
    alpha_num: u64,
    alpha_bits: u32,
    k_max: u32,
    opts: ConstructOptions,
    verify: bool,
}

impl GenInfinite {
    fn run(&self, out: Option<&Path>, precision: &Precision, argv: Vec<String>) -> Result<(), CliError> {
        if self.k_max < 3 {
            return Err(CliError::Usage(format!("k_max = {} but every class index K must exceed 2", self.k_max)));
        }
        if self.verify && self.k_max >= VERIFY_LIMIT_K {
            return Err(CliError::Usage(format!("k_max ≥ {VERIFY_LIMIT_K} needs --no-verify")));
        }
        let alpha = DyadicRational::alpha(self.alpha_num, self.alpha_bits)?;
        let cp = ConstructionParams::new(alpha, self.k_max)?.with_precision(*precision);
        let mut params = base_params(precision);
        params.alpha_num = Some(self.alpha_num);
        params.alpha_bits = Some(self.alpha_bits);
        params.k_max = Some(self.k_max);
        params.prune = Some(self.opts.prune);
        let (lo, hi) = cp.beta.to_decimal(30);
        params.beta = Some([lo, hi]);
        let mut manifest = RunManifest::new(argv, params);

        let t = Instant::now();
        let catalog = Catalog::build(&cp)?;
        manifest.time("catalog", t.elapsed());
        let t = Instant::now();
        let run = construct(&catalog, alpha, self.opts)?;
        manifest.time("construct", t.elapsed());
        manifest.counts.elements = run.elements.len();
        manifest.counts.candidates = Some(run.records.len());
        manifest.counts.duplicates = Some(run.duplicates.len());
        manifest.counts.bad_tuples = Some(run.bad_tuples.len());
        manifest.counts.removed = Some(run.removed.len());
        manifest.removed =
            run.removed.iter().map(|r| RemovedElement { p: r.p(), class: r.class(), a: r.a().to_string() }).collect();

        let mut failure = None;
        if self.verify {
            let t = Instant::now();
            let report = par::check_sidon(&run.elements);
            manifest.time("verify", t.elapsed());
            manifest.verified = Some(report.ok);
            // an unpruned set is allowed to fail
            if self.opts.prune {
                failure = report.witness;
            }
        }
        let file = SetFile::new(run.elements)
            .with("method", "infinite")
            .with("alpha", alpha)
            .with("k_max", self.k_max)
            .with("prune", self.opts.prune);
        emit(&file, out, &manifest)?;
        match failure {
            Some(w) => Err(CliError::NotSidon(w)),
            None => Ok(()),
        }
    }
}

fn verify(file: &Path) -> Result<(), CliError> {
    let set = SetFile::read_path(file)?;
    let report = par::check_sidon(&set.elements);
    match report.witness {
        Some(w) => Err(CliError::NotSidon(w)),
        None => {
            println!("Sidon: {} elements, {} pair sums checked", set.elements.len(), report.pairs_checked);
            Ok(())
        }
    }
}

#[derive(serde::Serialize)]
struct CsvRow {
    alpha_num: u64,
    alpha_bits: u32,
    #[serde(rename = "K")]
    k: u32,
    #[serde(rename = "L")]
    l: u32,
    #[serde(rename = "T_KL")]
    t_kl: u64,
    #[serde(rename = "A_KL")]
    a_kl: u64,
    bound_value: f64,
    ratio: f64,
    error: String,
}

pub fn write_sweep_csv(rows: &[SweepRow], w: impl Write) -> Result<(), CliError> {
    let mut csv = csv::Writer::from_writer(w);
    for r in rows {
        let bound = sidon_core::alpha_lab::bound_value(r.k, r.l);
        csv.serialize(CsvRow {
            alpha_num: r.alpha.numerator(),
            alpha_bits: r.alpha.denominator_log2(),
            k: r.k,
            l: r.l,
            t_kl: r.t_kl,
            a_kl: r.a_kl,
            bound_value: bound,
            ratio: r.t_kl as f64 / bound,
            error: r.error.as_ref().map(ToString::to_string).unwrap_or_default(),
        })
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    }
    csv.flush()?;
    Ok(())
}

fn print_summary(label: &str, summary: &[GridSummary]) {
    eprintln!("{label}");
    eprintln!("  K  L   mean T_KL      bound    ratio  max A_KL    trend  failed");
    for s in summary {
        eprintln!(
            "  {}  {}  {:>10.3}  {:>9.3e}  {:>7.3}  {:>8}  {:>7.3}  {}",
            s.k, s.l, s.mean_t, s.bound, s.ratio, s.max_a, s.trend, s.failed
        );
    }
}

fn sweep(
    k_max: u32,
    grid_bits: u32,
    stride: u64,
    convergence: bool,
    out: Option<&Path>,
    precision: &Precision,
    argv: Vec<String>,
) -> Result<(), CliError> {
    if k_max >= VERIFY_LIMIT_K {
        return Err(CliError::Usage(format!("sweep needs k_max < {VERIFY_LIMIT_K}")));
    }
    let cp = ConstructionParams::new(DyadicRational::ONE, k_max)?.with_precision(*precision);
    let grid = AlphaGrid::strided(grid_bits, stride)?;
    let mut params = base_params(precision);
    params.k_max = Some(k_max);
    params.grid_bits = Some(grid_bits);
    params.grid_stride = Some(stride);
    let mut manifest = RunManifest::new(argv, params);

    let t = Instant::now();
    let catalog = Catalog::build(&cp)?;
    manifest.time("catalog", t.elapsed());
    let t = Instant::now();
    let rows = par::sweep(&catalog, &grid);
    manifest.time("sweep", t.elapsed());
    manifest.counts.elements = catalog.len();
    manifest.counts.bad_tuples = Some(rows.iter().map(|r| r.a_kl as usize).sum());
    print_summary(&format!("grid 2^-{grid_bits}, {} points", grid.len()), &summarize(&rows));
    if convergence {
        let fine = grid.doubled()?;
        let t = Instant::now();
        let rows = par::sweep(&catalog, &fine);
        manifest.time("sweep_doubled", t.elapsed());
        print_summary(&format!("grid 2^-{}, {} points", fine.resolution_log2(), fine.len()), &summarize(&rows));
    }
    match out {
        Some(path) => {
            write_sweep_csv(&rows, std::fs::File::create(path)?)?;
            manifest.write_path(&manifest_path(path))?;
        }
        None => write_sweep_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}
