use clap::{Parser, Subcommand, ValueEnum};
use krylman_cli::doc::ResultDocument;
use krylman_cli::matfile;
use krylman_core::charpoly::{charpoly_kg_with_cutoff, oracle_charpoly};
use krylman_core::densemat::{DenseMatrix, DEFAULT_STRASSEN_CUTOFF};
use krylman_core::ffield::PrimeField;
use krylman_core::gen::random_instance;
use krylman_core::kalman::{kalman_kg_with_cutoff, kalman_luk, verify_kalman_form, KalmanForm};
use krylman_core::krylov::compressed_krylov_kg_with_cutoff;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const CUTOFF_ENV: &str = "KALMAN_STRASSEN_CUTOFF";

#[derive(Parser)]
#[command(name = "krylman", version, about = "Krylov, charpoly and Kalman decompositions over GF(p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Kg,
    Luk,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic polynomial of a square matrix, coefficients ascending.
    Charpoly {
        matrix: PathBuf,
        /// Reinterpret the entries over this prime instead of the file's.
        #[arg(long)]
        prime: Option<u64>,
        /// Cross-check against the evaluation-interpolation oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Kalman controllability decomposition of (A, B).
    Kalman {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Force the polycyclic H even when the pair is fully controllable.
        #[arg(long)]
        normalize: bool,
        /// Write the full result document (matrices included) to this path.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Rank and degree sequence of the compressed Krylov matrix of (A, B).
    Krylov {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Re-check a stored result document against the original (A, B).
    Verify {
        document: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Generate a seeded (A, B) with a prescribed controllable dimension.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 65521)]
        prime: u64,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        seed: u64,
        out_a: PathBuf,
        out_b: PathBuf,
    },
    /// Time both Kalman routes and the charpoly kernel on seeded instances.
    Bench {
        /// Comma-separated problem sizes, e.g. 64,128,256.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        cutoff: Option<usize>,
    },
}

enum CliError {
    /// Bad input or unusable arguments: exit 2.
    Usage(String),
    /// A computed or stored result failed verification: exit 1.
    Verification(String),
}

impl From<krylman_core::Error> for CliError {
    fn from(e: krylman_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<matfile::MatFileError> for CliError {
    fn from(e: matfile::MatFileError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn effective_cutoff(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var(CUTOFF_ENV) {
        Ok(s) => s
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{} must be a positive integer, got '{}'", CUTOFF_ENV, s))),
        Err(_) => Ok(DEFAULT_STRASSEN_CUTOFF),
    }
}

fn load(path: &Path) -> Result<DenseMatrix, CliError> {
    matfile::read_matrix(path)
        .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))
}

fn rebase(m: &DenseMatrix, prime: u64) -> Result<DenseMatrix, CliError> {
    let field = PrimeField::new(prime)?;
    let entries = (0..m.rows())
        .flat_map(|i| m.row(i).iter().map(|&v| field.reduce(v)).collect::<Vec<_>>())
        .collect();
    Ok(DenseMatrix::from_entries(m.rows(), m.cols(), field, entries)?)
}

fn degrees_string(degrees: &[usize]) -> String {
    let parts: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
    format!("({})", parts.join(","))
}

fn median_ms(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples[samples.len() / 2]
}

fn run_kalman(
    a: &DenseMatrix,
    b: &DenseMatrix,
    algorithm: Algorithm,
    normalize: bool,
    cutoff: usize,
) -> Result<KalmanForm, CliError> {
    Ok(match algorithm {
        Algorithm::Kg => kalman_kg_with_cutoff(a, b, normalize, cutoff)?,
        Algorithm::Luk => kalman_luk(a, b, normalize)?,
    })
}

fn cmd_charpoly(
    matrix: PathBuf,
    prime: Option<u64>,
    oracle: bool,
    cutoff: Option<usize>,
) -> Result<(), CliError> {
    let cutoff = effective_cutoff(cutoff)?;
    let mut a = load(&matrix)?;
    if let Some(p) = prime {
        a = rebase(&a, p)?;
    }
    let poly = charpoly_kg_with_cutoff(&a, cutoff)?;
    if oracle {
        let reference = oracle_charpoly(&a)?;
        if poly != reference {
            return Err(CliError::Verification(format!(
                "charpoly mismatch: computed [{}], oracle [{}]",
                poly, reference
            )));
        }
    }
    println!("{}", poly);
    Ok(())
}

fn cmd_kalman(
    a_path: PathBuf,
    b_path: PathBuf,
    algorithm: Algorithm,
    normalize: bool,
    emit: Option<PathBuf>,
    cutoff: Option<usize>,
) -> Result<(), CliError> {
    let cutoff = effective_cutoff(cutoff)?;
    let a = load(&a_path)?;
    let b = load(&b_path)?;

    let start = Instant::now();
    let kf = run_kalman(&a, &b, algorithm, normalize, cutoff)?;
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let report = verify_kalman_form(&a, &b, &kf)?;
    let verify_ms = start.elapsed().as_secs_f64() * 1e3;

    let degrees = match &kf.block_degrees {
        Some(d) => d.clone(),
        // Verbatim fully-controllable branch: report the Krylov degree
        // sequence of the pair instead.
        None => compressed_krylov_kg_with_cutoff(&a, &b, cutoff)?
            .degrees
            .iter()
            .copied()
            .filter(|&d| d > 0)
            .collect(),
    };
    println!("r={} degrees={}", kf.r, degrees_string(&degrees));

    if let Some(path) = emit {
        let mut timings = BTreeMap::new();
        timings.insert("solve_ms".to_string(), solve_ms);
        timings.insert("verify_ms".to_string(), verify_ms);
        let name = match algorithm {
            Algorithm::Kg => "kg",
            Algorithm::Luk => "luk",
        };
        let document = ResultDocument::from_form(
            name,
            &kf,
            a.rows(),
            b.cols(),
            a.field().modulus(),
            &report,
            timings,
            true,
        );
        let json = serde_json::to_string_pretty(&document)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        std::fs::write(&path, json)
            .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))?;
    }

    if !report.passed() {
        return Err(CliError::Verification(format!(
            "self-verification failed: {:?}",
            report
        )));
    }
    Ok(())
}

fn cmd_krylov(a_path: PathBuf, b_path: PathBuf, cutoff: Option<usize>) -> Result<(), CliError> {
    let cutoff = effective_cutoff(cutoff)?;
    let a = load(&a_path)?;
    let b = load(&b_path)?;
    let ck = compressed_krylov_kg_with_cutoff(&a, &b, cutoff)?;
    println!("r={} degrees={}", ck.r, degrees_string(&ck.degrees));
    Ok(())
}

fn cmd_verify(doc_path: PathBuf, a_path: PathBuf, b_path: PathBuf) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&doc_path)
        .map_err(|e| CliError::Usage(format!("{}: {}", doc_path.display(), e)))?;
    let document: ResultDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {}", doc_path.display(), e)))?;
    let a = load(&a_path)?;
    let b = load(&b_path)?;
    if a.rows() != document.n || b.cols() != document.m {
        return Err(CliError::Usage(format!(
            "document is for a {}x{} system with {} inputs, got {}x{} with {}",
            document.n,
            document.n,
            document.m,
            a.rows(),
            a.cols(),
            b.cols()
        )));
    }
    let kf = document.to_form(a.field()).map_err(CliError::Usage)?;
    let report = verify_kalman_form(&a, &b, &kf)?;
    if report.passed() {
        println!("verified: r={} algorithm={}", document.r, document.algorithm);
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "stored result does not verify: {:?}",
            report
        )))
    }
}

fn cmd_gen(
    n: usize,
    m: usize,
    prime: u64,
    rank: usize,
    seed: u64,
    out_a: PathBuf,
    out_b: PathBuf,
) -> Result<(), CliError> {
    let field = PrimeField::new(prime)?;
    let (a, b) = random_instance(field, n, m, rank, seed)?;
    matfile::write_matrix(&out_a, &a)
        .map_err(|e| CliError::Usage(format!("{}: {}", out_a.display(), e)))?;
    matfile::write_matrix(&out_b, &b)
        .map_err(|e| CliError::Usage(format!("{}: {}", out_b.display(), e)))?;
    println!("n={} m={} prime={} rank={} seed={}", n, m, prime, rank, seed);
    Ok(())
}

fn cmd_bench(sizes: Vec<usize>, reps: usize, csv: bool, cutoff: Option<usize>) -> Result<(), CliError> {
    if sizes.is_empty() || reps == 0 {
        return Err(CliError::Usage("bench needs at least one size and one rep".into()));
    }
    let cutoff = effective_cutoff(cutoff)?;
    let field = PrimeField::new(65521)?;
    if csv {
        println!("n,algorithm,median_ms");
    } else {
        println!("{:>6}  {:<10}  {:>12}", "n", "algorithm", "median_ms");
    }
    for &n in &sizes {
        let (a, b) = random_instance(field, n, 4.min(n), n / 2, 0xB5EED ^ n as u64)?;

        // Correctness gate before any timing counts.
        for (name, kf) in [
            ("kg", kalman_kg_with_cutoff(&a, &b, false, cutoff)?),
            ("luk", kalman_luk(&a, &b, false)?),
        ] {
            if !verify_kalman_form(&a, &b, &kf)?.passed() {
                return Err(CliError::Verification(format!(
                    "{} failed verification at n={}, refusing to time it",
                    name, n
                )));
            }
        }

        let mut rows: Vec<(&str, f64)> = Vec::new();
        let time = |name: &'static str, f: &dyn Fn() -> Result<(), CliError>| -> Result<(&'static str, f64), CliError> {
            let mut samples = Vec::with_capacity(reps);
            for _ in 0..reps {
                let start = Instant::now();
                f()?;
                samples.push(start.elapsed().as_secs_f64() * 1e3);
            }
            Ok((name, median_ms(&mut samples)))
        };
        rows.push(time("kalman-kg", &|| {
            kalman_kg_with_cutoff(&a, &b, false, cutoff).map(|_| ()).map_err(CliError::from)
        })?);
        rows.push(time("kalman-luk", &|| {
            kalman_luk(&a, &b, false).map(|_| ()).map_err(CliError::from)
        })?);
        rows.push(time("charpoly-kg", &|| {
            charpoly_kg_with_cutoff(&a, cutoff).map(|_| ()).map_err(CliError::from)
        })?);

        for (name, ms) in &rows {
            if csv {
                println!("{},{},{:.3}", n, name, ms);
            } else {
                println!("{:>6}  {:<10}  {:>12.3}", n, name, ms);
            }
        }
        if !csv {
            let winner = if rows[0].1 <= rows[1].1 { "kalman-kg" } else { "kalman-luk" };
            println!("{:>6}  fastest kalman route: {}", n, winner);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Charpoly { matrix, prime, oracle, cutoff } => cmd_charpoly(matrix, prime, oracle, cutoff),
        Command::Kalman { a, b, algorithm, normalize, emit, cutoff } => {
            cmd_kalman(a, b, algorithm, normalize, emit, cutoff)
        }
        Command::Krylov { a, b, cutoff } => cmd_krylov(a, b, cutoff),
        Command::Verify { document, a, b } => cmd_verify(document, a, b),
        Command::Gen { n, m, prime, rank, seed, out_a, out_b } => {
            cmd_gen(n, m, prime, rank, seed, out_a, out_b)
        }
        Command::Bench { sizes, reps, csv, cutoff } => cmd_bench(sizes, reps, csv, cutoff),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
