//! Command-line front end: classify a point of PG(7,q), enumerate the
//! orbits of the Segre-variety stabiliser, run the verification suite, or
//! inspect a shamrock.
//!
//! Exit codes are part of the interface:
//!   0  success (for `verify`: every check passed)
//!   1  a verification assertion failed (witness on stderr)
//!   2  malformed input (bad coordinates, bad field parameters, bad flags)
//!   3  the zero vector was given where a projective point is required
//!   4  resource guard (whole-space command beyond q = 7 without override,
//!      or the rank oracle beyond q = 3)
//!
//! JSON and CSV output is canonical (fixed key order, no timestamps) and
//! byte-identical across runs and thread counts; wall-clock chatter goes to
//! stderr. Text output is for humans and not a stable interface.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use segre_orbits::gf::{FieldDesc, GfError};
use segre_orbits::orbits::{
    classify_point, classify_space, orbit_partition_opts, verify_theorems_opts, OrbitLabel,
    OrbitOptions, OrbitsError,
};
use segre_orbits::rank::{pure_tensors, rank_oracle, tensor_rank, RankError};
use segre_orbits::report::write_space_csv;
use segre_orbits::segre::{segre_embed, shamrock, SegrePoint};
use segre_orbits::tensor::{flattening_ranks, hyperdeterminant, is_nonsingular, Tensor222};

#[derive(Parser)]
#[command(name = "segre-orbits", version, about = "Classify points of PG(7,q) under the stabiliser of the Segre variety S_{2,2,2}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one point: rank, flattening ranks, singularity, label
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        /// Eight comma-separated coordinates, index order a000..a111
        #[arg(long, value_delimiter = ',', allow_hyphen_values = false)]
        coords: Vec<u16>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tensor rank of one point, optionally cross-checked by the oracle
    Rank {
        #[command(flatten)]
        field: FieldArgs,
        /// Eight comma-separated coordinates, index order a000..a111
        #[arg(long, value_delimiter = ',')]
        coords: Vec<u16>,
        /// Also run the brute-force decomposition oracle (q <= 3)
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate the orbits of the whole space; emit a report or per-point table
    Orbits {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate, classify, and check the orbit structure; nonzero exit on failure
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Leaves and union of the shamrock at a variety point
    Shamrock {
        #[command(flatten)]
        field: FieldArgs,
        /// Three coordinate pairs, comma separated: a0,a1,b0,b1,c0,c1
        #[arg(long, value_delimiter = ',', default_value = "1,0,1,0,1,0")]
        point: Vec<u16>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// Field order q = p^e (prime power, q <= 16); factored automatically
    #[arg(long, conflicts_with_all = ["p", "e"])]
    q: Option<u16>,
    /// Prime characteristic (with --e)
    #[arg(long, requires = "e")]
    p: Option<u16>,
    /// Extension degree (with --p)
    #[arg(long, requires = "p")]
    e: Option<u32>,
}

#[derive(Args)]
struct SpaceArgs {
    /// Worker threads; output is identical for every value
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Lift the q <= 7 whole-space guard (hard cap q = 16); expect long runtimes
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> CliError {
        CliError { code, message: message.into() }
    }
}

impl From<GfError> for CliError {
    fn from(e: GfError) -> CliError {
        CliError::new(2, e.to_string())
    }
}

impl From<OrbitsError> for CliError {
    fn from(e: OrbitsError) -> CliError {
        let code = match e {
            OrbitsError::ResourceGuard(..) => 4,
            OrbitsError::ZeroTensor => 3,
            OrbitsError::SingularMatrix => 2,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<RankError> for CliError {
    fn from(e: RankError) -> CliError {
        let code = match e {
            RankError::OracleOrderTooLarge(_) => 4,
            RankError::NoDecomposition(_) => 1,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::new(1, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Classify { field, coords, output } => cmd_classify(&field, &coords, &output),
        Command::Rank { field, coords, oracle, output } => {
            cmd_rank(&field, &coords, oracle, &output)
        }
        Command::Orbits { field, space, output } => cmd_orbits(&field, &space, &output),
        Command::Verify { field, space, output } => cmd_verify(&field, &space, &output),
        Command::Shamrock { field, point, output } => cmd_shamrock(&field, &point, &output),
    }
}

impl FieldArgs {
    fn build(&self) -> Result<FieldDesc, CliError> {
        match (self.q, self.p, self.e) {
            (Some(q), None, None) => Ok(FieldDesc::with_order(q)?),
            (None, Some(p), Some(e)) => Ok(FieldDesc::new(p, e)?),
            _ => Err(CliError::new(2, "select the field with --q or with --p and --e")),
        }
    }
}

fn parse_tensor(f: &FieldDesc, coords: &[u16]) -> Result<Tensor222, CliError> {
    if coords.len() != 8 {
        return Err(CliError::new(2, format!("--coords needs 8 values, got {}", coords.len())));
    }
    let mut v = [0u16; 8];
    v.copy_from_slice(coords);
    let t = Tensor222::from_values(f, v)?;
    if t.is_zero() {
        return Err(CliError::new(3, "the zero vector is not a projective point"));
    }
    Ok(t)
}

fn emit(output: &OutputArgs, body: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassifyReport {
    q: u16,
    coords: String,
    rank: u8,
    flattening_ranks: [u8; 3],
    singular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    hyperdeterminant: Option<u16>,
    label: OrbitLabel,
}

fn cmd_classify(field: &FieldArgs, coords: &[u16], output: &OutputArgs) -> Result<(), CliError> {
    let f = field.build()?;
    let t = parse_tensor(&f, coords)?;
    let pure = pure_tensors(&f);
    let label = classify_point(&f, &pure, &t)?;
    let point = t.to_point(&f).expect("nonzero");
    let hyper = (f.p() != 2).then(|| hyperdeterminant(&f, &t).value() as u16);
    let report = ClassifyReport {
        q: f.order(),
        coords: point.to_string(),
        rank: tensor_rank(&f, &pure, &t),
        flattening_ranks: flattening_ranks(&f, &t),
        singular: !is_nonsingular(&f, &t),
        hyperdeterminant: hyper,
        label,
    };
    match output.format {
        Format::Json => emit(output, &(serde_json::to_string_pretty(&report).unwrap() + "\n")),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "q: {}", report.q);
            let _ = writeln!(s, "point: {}", report.coords);
            let _ = writeln!(s, "rank: {}", report.rank);
            let _ = writeln!(
                s,
                "flattening ranks: {},{},{}",
                report.flattening_ranks[0], report.flattening_ranks[1], report.flattening_ranks[2]
            );
            let _ = writeln!(s, "singular: {}", report.singular);
            if let Some(h) = report.hyperdeterminant {
                let _ = writeln!(s, "hyperdeterminant: {h}");
            }
            let _ = writeln!(s, "label: {}", report.label);
            emit(output, &s)
        }
        Format::Csv => Err(CliError::new(2, "csv output applies to whole-space commands")),
    }
}

#[derive(Serialize)]
struct RankReport {
    q: u16,
    coords: String,
    rank: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<u8>,
}

fn cmd_rank(
    field: &FieldArgs,
    coords: &[u16],
    oracle: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let f = field.build()?;
    let t = parse_tensor(&f, coords)?;
    let pure = pure_tensors(&f);
    let rank = tensor_rank(&f, &pure, &t);
    let oracle_rank = if oracle { Some(rank_oracle(&f, &pure, &t)?) } else { None };
    if let Some(o) = oracle_rank {
        if o != rank {
            return Err(CliError::new(
                1,
                format!("rank mismatch: secant search says {rank}, oracle says {o}"),
            ));
        }
    }
    let report = RankReport {
        q: f.order(),
        coords: t.to_point(&f).expect("nonzero").to_string(),
        rank,
        oracle: oracle_rank,
    };
    match output.format {
        Format::Json => emit(output, &(serde_json::to_string_pretty(&report).unwrap() + "\n")),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "q: {}", report.q);
            let _ = writeln!(s, "point: {}", report.coords);
            let _ = writeln!(s, "rank: {}", report.rank);
            if let Some(o) = report.oracle {
                let _ = writeln!(s, "oracle: {o} (agrees)");
            }
            emit(output, &s)
        }
        Format::Csv => Err(CliError::new(2, "csv output applies to whole-space commands")),
    }
}

fn orbit_options(space: &SpaceArgs) -> OrbitOptions {
    OrbitOptions { threads: space.threads.max(1), allow_large: space.allow_large }
}

fn cmd_orbits(field: &FieldArgs, space: &SpaceArgs, output: &OutputArgs) -> Result<(), CliError> {
    let f = field.build()?;
    let opts = orbit_options(space);
    let started = Instant::now();
    match output.format {
        Format::Csv => {
            let partition = orbit_partition_opts(&f, opts)?;
            let cls = classify_space(&f, opts)?;
            let mut buf = Vec::new();
            write_space_csv(&mut buf, &f, &cls, &partition)
                .map_err(|e| CliError::new(1, e.to_string()))?;
            let body = String::from_utf8(buf).expect("csv is utf8");
            emit(output, &body)?;
            meta_line(&f, space, started);
            Ok(())
        }
        Format::Json => {
            let outcome = verify_theorems_opts(&f, opts)?;
            emit(output, &outcome.report.to_canonical_json())?;
            meta_line(&f, space, started);
            Ok(())
        }
        Format::Text => {
            let outcome = verify_theorems_opts(&f, opts)?;
            emit(output, &summary_table(&outcome.report))?;
            meta_line(&f, space, started);
            Ok(())
        }
    }
}

fn cmd_verify(field: &FieldArgs, space: &SpaceArgs, output: &OutputArgs) -> Result<(), CliError> {
    let f = field.build()?;
    let opts = orbit_options(space);
    let started = Instant::now();
    let outcome = verify_theorems_opts(&f, opts)?;
    let report = &outcome.report;

    match output.format {
        Format::Json => emit(output, &report.to_canonical_json())?,
        Format::Text => {
            let mut s = summary_table(report);
            let v = &report.verified;
            let _ = writeln!(s, "five orbits: {}", v.five_orbits);
            let _ = writeln!(s, "four singular orbits: {}", v.four_singular);
            let _ = writeln!(s, "classifier matches enumeration: {}", v.classifier_matches);
            emit(output, &s)?;
            // The canonical report still lands in --out for text runs.
            if let Some(path) = &output.out {
                fs::write(path, report.to_canonical_json())?;
            }
        }
        Format::Csv => {
            return Err(CliError::new(2, "csv output applies to the orbits command"));
        }
    }
    meta_line(&f, space, started);

    if outcome.all_verified() {
        Ok(())
    } else {
        for line in &outcome.failures {
            eprintln!("witness: {line}");
        }
        Err(CliError::new(1, "verification failed"))
    }
}

fn summary_table(report: &segre_orbits::report::OrbitReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "q: {}   points: {}", report.q, report.points);
    let _ = writeln!(s, "label  size      rank  flattenings  singular  representative");
    for o in &report.orbits {
        let _ = writeln!(
            s,
            "{:<5}  {:<8}  {:<4}  {},{},{}        {:<8}  {}",
            o.label.to_string(),
            o.size,
            o.rank,
            o.flattening_ranks[0],
            o.flattening_ranks[1],
            o.flattening_ranks[2],
            o.singular,
            o.representative
        );
    }
    s
}

fn meta_line(f: &FieldDesc, space: &SpaceArgs, started: Instant) {
    // Wall-clock data stays out of the canonical body.
    eprintln!(
        "meta: {{\"q\":{},\"threads\":{},\"elapsed_ms\":{}}}",
        f.order(),
        space.threads.max(1),
        started.elapsed().as_millis()
    );
}

#[derive(Serialize)]
struct ShamrockReport {
    q: u16,
    base: String,
    base_point: String,
    leaf_sizes: [usize; 3],
    leaf_variety_sizes: [usize; 3],
    union_size: usize,
    max_rank: u8,
    rank_bound_holds: bool,
}

fn cmd_shamrock(field: &FieldArgs, point: &[u16], output: &OutputArgs) -> Result<(), CliError> {
    let f = field.build()?;
    if point.len() != 6 {
        return Err(CliError::new(2, format!("--point needs 6 values, got {}", point.len())));
    }
    let mut v = [0u16; 6];
    v.copy_from_slice(point);
    let y = SegrePoint::from_values(&f, v).map_err(|e| CliError::new(2, e.to_string()))?;
    let sh = shamrock(&f, &y);

    let pure = pure_tensors(&f);
    let mut max_rank = 0u8;
    for &idx in sh.union() {
        let p = segre_orbits::linalg::pg_unrank(&f, idx).expect("index in range");
        let r = tensor_rank(&f, &pure, &Tensor222::from_point(&p));
        max_rank = max_rank.max(r);
    }

    let leaf_sizes = [sh.leaves()[0].len(), sh.leaves()[1].len(), sh.leaves()[2].len()];
    let mut leaf_variety_sizes = [0usize; 3];
    for (slot, leaf) in leaf_variety_sizes.iter_mut().zip(sh.leaves().iter()) {
        *slot = leaf
            .points()
            .iter()
            .filter(|&&idx| {
                let p = segre_orbits::linalg::pg_unrank(&f, idx).expect("index in range");
                segre_orbits::tensor::is_pure(&f, &Tensor222::from_point(&p))
            })
            .count();
    }

    let report = ShamrockReport {
        q: f.order(),
        base: y.to_string(),
        base_point: segre_embed(&f, &y).to_string(),
        leaf_sizes,
        leaf_variety_sizes,
        union_size: sh.union().len(),
        max_rank,
        rank_bound_holds: max_rank <= 2,
    };

    match output.format {
        Format::Json => emit(output, &(serde_json::to_string_pretty(&report).unwrap() + "\n"))?,
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "q: {}", report.q);
            let _ = writeln!(s, "base: {}", report.base);
            let _ = writeln!(s, "base point: {}", report.base_point);
            let _ = writeln!(
                s,
                "leaf sizes: {},{},{}",
                report.leaf_sizes[0], report.leaf_sizes[1], report.leaf_sizes[2]
            );
            let _ = writeln!(
                s,
                "leaf on variety: {},{},{}",
                report.leaf_variety_sizes[0],
                report.leaf_variety_sizes[1],
                report.leaf_variety_sizes[2]
            );
            let _ = writeln!(s, "union size: {}", report.union_size);
            let _ = writeln!(s, "max rank over shamrock: {}", report.max_rank);
            let _ = writeln!(s, "rank <= 2 bound holds: {}", report.rank_bound_holds);
            emit(output, &s)?;
        }
        Format::Csv => return Err(CliError::new(2, "csv output applies to whole-space commands")),
    }
    if report.rank_bound_holds {
        Ok(())
    } else {
        Err(CliError::new(1, "a shamrock point of rank > 2 exists"))
    }
}
