//! `zramsey`: command-line front end for the colouring, reduction, search
//! and oracle toolkit.
//!
//! Every command prints one JSON document (or a CSV table for
//! `finite-number --format csv`). Failures print `{"error":{"code":..,
//! "message":..}}` on stderr and exit with status 1 (status 2 for usage
//! errors).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use zramsey_core::colourings::{
    from_differences, gen_colourings, invariance_witness, to_differences, Colour,
    DifferenceColouring, FiniteColouring, GenSpec, Generation, Mode, Shape, VectorDomain,
};
use zramsey_core::oracle::{
    decode, lower_bound_colour, synthesize_solution, EnumerationOracle, TwoByTwoColour,
};
use zramsey_core::reductions::{
    backward_transform, forward_transform, verify_reduction_with, ReductionKind, SearchStrategy,
};
use zramsey_core::search::{
    find_afs_mono_par, find_afs_mono_with, find_mono_subset_par, find_mono_subset_with,
    finite_number, AfsQuery, FiniteNumber, FiniteNumberQuery, Principle, SubsetQuery, Witness,
};
use zramsey_core::sums::adjacent_tuples;
use zramsey_core::DEFAULT_BUDGET;

const BUDGET_VAR: &str = "IRL_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "zramsey",
    version,
    about = "Finite-window Ramsey and Hindman-type colourings, reductions and searches"
)]
struct Cli {
    /// Output format. CSV is only available for `finite-number`.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Action {
    Forward,
    Backward,
    Verify,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report whether a sets colouring is translation invariant.
    CheckInvariance {
        #[arg(long)]
        input: PathBuf,
    },
    /// Read off the difference colouring of an invariant sets colouring.
    ToDifferences {
        #[arg(long)]
        input: PathBuf,
    },
    /// Lift a difference colouring to an invariant sets colouring.
    FromDifferences {
        #[arg(long)]
        input: PathBuf,
        /// Window of the lifted colouring (defaults to the table's window).
        #[arg(long)]
        window: Option<u64>,
    },
    /// Apply one side of a reduction, or run a full round trip.
    Reduce {
        #[arg(value_enum)]
        action: Action,
        /// RT_TO_ZRT, ZRT_TO_AHT, AHT_TO_ZRT or APAHT_TO_RT.
        #[arg(long)]
        kind: String,
        /// Arity parameter of the reduction (n or d).
        #[arg(long)]
        dim: usize,
        /// Instance file. Without it, `forward` and `verify` draw a random
        /// instance from `--seed`, `--window` and `--k`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Solution of the transformed problem, for `backward`.
        #[arg(long, value_delimiter = ',')]
        solution: Vec<u64>,
        /// Witness size sought on the original instance, for `verify`.
        #[arg(long, alias = "length")]
        m: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        window: Option<u64>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        parallel: bool,
    },
    /// Find the lexicographically least monochromatic witness.
    Search {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, alias = "length")]
        m: usize,
        /// Bound on adjacent sums for vectors colourings (defaults to the
        /// colouring's window).
        #[arg(long)]
        window: Option<u64>,
        /// Sets colourings: require separated witnesses.
        #[arg(long)]
        separated: bool,
        /// Vectors colourings: require apart witnesses.
        #[arg(long)]
        apart: bool,
        /// Vectors colourings: only accept witnesses of this colour.
        #[arg(long)]
        colour: Option<Colour>,
        #[arg(long)]
        parallel: bool,
    },
    /// Least window size at which every colouring has a witness.
    FiniteNumber {
        /// RT, ZRT, AHT, SEPZRT or APAHT.
        #[arg(long)]
        principle: String,
        #[arg(long)]
        dim: usize,
        /// Palette sizes; a comma list gives a sweep.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        /// Witness sizes; a comma list gives a sweep.
        #[arg(long, alias = "length", value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long, default_value_t = 12)]
        cap: u64,
    },
    /// Build the lower-bound colouring for an oracle, synthesize a solution
    /// and decode a membership query from it.
    OracleDemo {
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long, alias = "m")]
        length: usize,
        #[arg(long)]
        query: u64,
    },
}

#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
    status: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: "E_USAGE",
            message: message.into(),
            status: 2,
        }
    }
}

impl From<zramsey_core::Error> for Failure {
    fn from(e: zramsey_core::Error) -> Self {
        Self {
            code: e.code(),
            message: e.to_string(),
            status: 1,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: "E_IO",
        message: format!("cannot read {}: {e}", path.display()),
        status: 1,
    })
}

fn budget() -> Outcome<u64> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(b) if b >= 1 => Ok(b),
            _ => Err(Failure::usage(format!(
                "{BUDGET_VAR} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn positive(name: &str, v: u64) -> Outcome<()> {
    if v == 0 {
        return Err(Failure::usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("output serializes")
}

#[derive(Serialize)]
struct Invariance {
    invariant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<(Vec<u64>, Vec<u64>)>,
}

#[derive(Serialize)]
struct Found {
    witness: Option<Vec<u64>>,
    colour: Option<Colour>,
}

impl From<Option<Witness>> for Found {
    fn from(w: Option<Witness>) -> Self {
        match w {
            Some(w) => Found {
                witness: Some(w.elements.into_vec()),
                colour: w.colour,
            },
            None => Found {
                witness: None,
                colour: None,
            },
        }
    }
}

/// Domain of the instances a reduction accepts.
fn instance_spec(kind: ReductionKind, window: u64, palette: usize) -> GenSpec {
    let vectors = |dim: usize| {
        let domain = if dim == 1 {
            VectorDomain::Box
        } else {
            VectorDomain::Simplex
        };
        GenSpec {
            shape: Shape::vectors(dim, window, domain),
            palette,
            invariant: false,
        }
    };
    match kind {
        ReductionKind::RtToZrt(n) => GenSpec::sets(n, window, palette, false),
        ReductionKind::ZrtToAht(d) => GenSpec::sets(d + 1, window, palette, true),
        ReductionKind::AhtToZrt(d) => vectors(d),
        ReductionKind::ApahtToRt(n) => vectors(n),
    }
}

fn load_instance(
    kind: ReductionKind,
    input: Option<&Path>,
    seed: Option<u64>,
    window: Option<u64>,
    k: usize,
) -> Outcome<FiniteColouring> {
    if let Some(path) = input {
        return Ok(FiniteColouring::from_json(&read(path)?)?);
    }
    let (Some(seed), Some(window)) = (seed, window) else {
        return Err(Failure::usage(
            "give --input, or --seed and --window for a sampled instance",
        ));
    };
    positive("window", window)?;
    positive("k", k as u64)?;
    let spec = instance_spec(kind, window, k);
    let mut drawn = gen_colourings(&spec, Generation::Sampled { seed, count: 1 }, budget()?)?;
    Ok(drawn.next().expect("one sample requested"))
}

#[allow(clippy::too_many_arguments)]
fn reduce(
    action: Action,
    kind: &str,
    dim: usize,
    input: Option<&Path>,
    solution: &[u64],
    m: Option<usize>,
    seed: Option<u64>,
    window: Option<u64>,
    k: usize,
    parallel: bool,
) -> Outcome<String> {
    let kind = ReductionKind::new(kind, dim)?;
    match action {
        Action::Forward => {
            let instance = load_instance(kind, input, seed, window, k)?;
            Ok(forward_transform(kind, &instance)?.to_json())
        }
        Action::Backward => {
            if solution.is_empty() {
                return Err(Failure::usage("backward needs --solution"));
            }
            Ok(to_json(&backward_transform(kind, solution)?))
        }
        Action::Verify => {
            let Some(m) = m else {
                return Err(Failure::usage("verify needs --m"));
            };
            positive("m", m as u64)?;
            let instance = load_instance(kind, input, seed, window, k)?;
            let strategy = if parallel {
                SearchStrategy::Parallel
            } else {
                SearchStrategy::Sequential
            };
            Ok(verify_reduction_with(kind, &instance, m, strategy)?.to_json())
        }
    }
}

struct SearchArgs {
    m: usize,
    window: Option<u64>,
    separated: bool,
    apart: bool,
    colour: Option<Colour>,
    parallel: bool,
}

fn search(c: &FiniteColouring, a: SearchArgs) -> Outcome<String> {
    positive("m", a.m as u64)?;
    let found = match c.mode() {
        Mode::Sets => {
            if a.apart || a.colour.is_some() || a.window.is_some() {
                return Err(Failure::usage(
                    "--apart, --colour and --window apply to vectors colourings",
                ));
            }
            let q = SubsetQuery {
                size: a.m,
                separated: a.separated,
            };
            if a.parallel {
                find_mono_subset_par(c, q)?
            } else {
                find_mono_subset_with(c, q)?
            }
        }
        Mode::Vectors(_) => {
            if a.separated {
                return Err(Failure::usage("--separated applies to sets colourings"));
            }
            let window = a.window.unwrap_or(c.window());
            let q = AfsQuery {
                apart: a.apart,
                colour: a.colour,
                ..AfsQuery::new(a.m, window)
            };
            if a.parallel {
                find_afs_mono_par(c, q)?
            } else {
                find_afs_mono_with(c, q)?
            }
        }
    };
    Ok(to_json(&Found::from(found)))
}

#[derive(Serialize)]
struct SweepRow {
    principle: &'static str,
    dim: usize,
    k: usize,
    m: usize,
    #[serde(rename = "N")]
    n: Option<u64>,
    witness_or_counterexample: String,
}

fn finite_numbers(
    principle: &str,
    dim: usize,
    ks: &[usize],
    ms: &[usize],
    cap: u64,
    format: Format,
) -> Outcome<String> {
    let principle = Principle::parse(principle)?;
    positive("dim", dim as u64)?;
    positive("cap", cap)?;
    let budget = budget()?;
    let mut rows = Vec::new();
    for &k in ks {
        for &m in ms {
            positive("k", k as u64)?;
            positive("m", m as u64)?;
            let q = FiniteNumberQuery {
                principle,
                dim,
                palette: k,
                size: m,
                cap,
            };
            let result = finite_number(&q, budget)?;
            let shown = result
                .counterexample()
                .map(FiniteColouring::colour_string)
                .unwrap_or_default();
            rows.push((
                SweepRow {
                    principle: principle.name(),
                    dim,
                    k,
                    m,
                    n: result.value(),
                    witness_or_counterexample: shown,
                },
                result,
            ));
        }
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for (row, _) in &rows {
                w.serialize(row).map_err(|e| Failure {
                    code: "E_IO",
                    message: e.to_string(),
                    status: 1,
                })?;
            }
            let bytes = w.into_inner().map_err(|e| Failure {
                code: "E_IO",
                message: e.to_string(),
                status: 1,
            })?;
            Ok(String::from_utf8(bytes).expect("csv is utf-8"))
        }
        Format::Json if rows.len() == 1 => {
            let (_, result) = &rows[0];
            Ok(match result {
                FiniteNumber::Found { n, .. } => json!({ "N": n }).to_string(),
                FiniteNumber::ExceedsCap { .. } => json!({ "N": null, "cap": cap }).to_string(),
            })
        }
        Format::Json => Ok(to_json(&rows.iter().map(|(r, _)| r).collect::<Vec<_>>())),
    }
}

#[derive(Serialize)]
struct Demo {
    witness: Vec<u64>,
    decoded: bool,
}

fn oracle_demo(path: &Path, length: usize, query: u64) -> Outcome<String> {
    positive("length", length as u64)?;
    let w = EnumerationOracle::from_json(&read(path)?)?;
    let witness = synthesize_solution(&w, length)?;
    for t in adjacent_tuples(&witness, 2)? {
        let colour = lower_bound_colour(&w, t.values[0], t.values[1])?;
        if colour != TwoByTwoColour::BOTH {
            return Err(Failure {
                code: "E_NOT_MONOCHROMATIC",
                message: format!("pair {:?} has colour {}", t.values, colour.encode()),
                status: 1,
            });
        }
    }
    let decoded = decode(&witness, &w, query)?;
    Ok(to_json(&Demo {
        witness: witness.into_vec(),
        decoded,
    }))
}

fn run(cli: Cli) -> Outcome<String> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::FiniteNumber { .. }) {
        return Err(Failure::usage(
            "csv output is only available for finite-number",
        ));
    }
    match cli.command {
        Command::CheckInvariance { input } => {
            let c = FiniteColouring::from_json(&read(&input)?)?;
            let witness = invariance_witness(&c)?;
            Ok(to_json(&Invariance {
                invariant: witness.is_none(),
                witness,
            }))
        }
        Command::ToDifferences { input } => {
            let c = FiniteColouring::from_json(&read(&input)?)?;
            Ok(to_differences(&c)?.to_json())
        }
        Command::FromDifferences { input, window } => {
            let dc = DifferenceColouring::from_json(&read(&input)?)?;
            let window = window.unwrap_or(dc.window());
            positive("window", window)?;
            Ok(from_differences(&dc, window)?.to_json())
        }
        Command::Reduce {
            action,
            kind,
            dim,
            input,
            solution,
            m,
            seed,
            window,
            k,
            parallel,
        } => reduce(
            action,
            &kind,
            dim,
            input.as_deref(),
            &solution,
            m,
            seed,
            window,
            k,
            parallel,
        ),
        Command::Search {
            input,
            m,
            window,
            separated,
            apart,
            colour,
            parallel,
        } => {
            let c = FiniteColouring::from_json(&read(&input)?)?;
            search(
                &c,
                SearchArgs {
                    m,
                    window,
                    separated,
                    apart,
                    colour,
                    parallel,
                },
            )
        }
        Command::FiniteNumber {
            principle,
            dim,
            k,
            m,
            cap,
        } => finite_numbers(&principle, dim, &k, &m, cap, cli.format),
        Command::OracleDemo {
            oracle,
            length,
            query,
        } => oracle_demo(&oracle, length, query),
    }
}

fn emit(out: Option<&Path>, body: &str) -> Outcome<()> {
    let mut text = body.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            code: "E_IO",
            message: format!("cannot write {}: {e}", path.display()),
            status: 1,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure {
                code: "E_IO",
                message: e.to_string(),
                status: 1,
            }),
    }
}

fn fail(f: Failure) -> ExitCode {
    let body = json!({ "error": { "code": f.code, "message": f.message } });
    eprintln!("{body}");
    ExitCode::from(f.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            return fail(Failure::usage(first.trim_start_matches("error: ")));
        }
    };
    let out = cli.out.clone();
    match run(cli).and_then(|body| emit(out.as_deref(), &body)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f),
    }
}
