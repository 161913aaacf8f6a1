use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gridlink::linking::{geometric_crossings, linking_number, linking_number_geometric};
use gridlink::moments::{
    format_rational, leading_coefficient, moment_polynomial, pair_terms, EngineConfig, MomentError,
    MomentReport,
};
use gridlink::oracle::{exact_lk_distribution, OracleError, OracleOptions};
use gridlink::render::render_svg;
use gridlink::sampler::{
    convergence_report, estimate_moments, histogram_normalized_lk, RunMetadata, SamplerError,
};
use gridlink::types::{enumerate_types, type_of, SequenceType};
use gridlink::verify::{run_suite, Suite, VerifyContext};
use gridlink::{GridError, GridLink, Permutation};

/// Largest moment order computed without `--long-run`.
const EXACT_ORDER_LIMIT: usize = 4;

#[derive(Parser)]
#[command(
    name = "gridlink",
    version,
    about = "Random 2-component links in the grid model"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linking number of one diagram.
    Lk {
        #[command(flatten)]
        input: DiagramInput,
        /// List the inter-component crossings with their signs.
        #[arg(long)]
        crossings: bool,
        /// Also compute lk from the crossings and fail on disagreement.
        #[arg(long)]
        check: bool,
    },
    /// Moments of the linking number.
    #[command(subcommand)]
    Moments(MomentsCommand),
    /// Index-sequence types.
    #[command(subcommand)]
    Types(TypesCommand),
    /// Draw a diagram as SVG.
    Render {
        #[command(flatten)]
        input: DiagramInput,
        /// Where to write the SVG.
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Empirical moments of lk/n along a list of n, as CSV.
    Report {
        /// Ascending list, every entry > 4.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Histogram of lk/n, as CSV.
    Histogram {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to 1/n.
        #[arg(long)]
        bin_width: Option<f64>,
    },
}

#[derive(Args)]
struct DiagramInput {
    /// File with sigma and pi on two lines.
    #[arg(conflicts_with_all = ["sigma", "pi"])]
    file: Option<PathBuf>,
    /// Comma-separated permutation, e.g. 1,3,2,4.
    #[arg(long, requires = "pi")]
    sigma: Option<String>,
    #[arg(long, requires = "sigma")]
    pi: Option<String>,
}

#[derive(Subcommand)]
enum MomentsCommand {
    /// Exact polynomial E[lk^u](n) from the type enumeration.
    Exact {
        #[arg(long)]
        u: usize,
        /// Largest symbol set the order counter accepts.
        #[arg(long, default_value_t = EngineConfig::default().symbol_limit)]
        symbol_limit: usize,
        /// Include the per-pair inner sums of the leading coefficient.
        #[arg(long)]
        pairs: bool,
        /// Allow orders above 4.
        #[arg(long)]
        long_run: bool,
    },
    /// Monte Carlo estimates of E[lk^j] for j = 1..=u.
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        u: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pair every sample with its mirror image.
        #[arg(long)]
        antithetic: bool,
    },
    /// Exact E[lk^u] by enumerating every diagram (n = 2, 3).
    Brute {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        u: u32,
        /// Allow n = 4.
        #[arg(long)]
        long_run: bool,
    },
}

#[derive(Subcommand)]
enum TypesCommand {
    /// All types of sequences of length u.
    Enumerate {
        #[arg(long)]
        u: usize,
        /// Keep only types whose sequences all hold at least this many indices.
        #[arg(long, default_value_t = 1)]
        min_block_seq: usize,
    },
    /// Type of one index sequence.
    Of {
        #[arg(long, value_delimiter = ',', required = true)]
        seq: Vec<usize>,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

/// Failure with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    const VERIFY: u8 = 1;
    const PARSE: u8 = 2;
    const MISMATCH: u8 = 3;
    const LIMIT: u8 = 4;
    const IO: u8 = 5;

    fn new(code: u8, message: impl fmt::Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        Self::new(Self::PARSE, e)
    }
}

impl From<MomentError> for Failure {
    fn from(e: MomentError) -> Self {
        let code = match e {
            MomentError::CountMismatch { .. } | MomentError::FilterMismatch { .. } => {
                Self::MISMATCH
            }
            MomentError::TooManySymbols { .. } => Self::LIMIT,
            _ => Self::PARSE,
        };
        Self::new(code, e)
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::TooLarge { .. } => Self::LIMIT,
            OracleError::FactorizationMismatch { .. } => Self::MISMATCH,
            OracleError::BadInput { .. } => Self::PARSE,
        };
        Self::new(code, e)
    }
}

impl From<SamplerError> for Failure {
    fn from(e: SamplerError) -> Self {
        match e {
            SamplerError::Moment(m) => m.into(),
            other => Self::new(Self::PARSE, other),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("GRIDLINK_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        Failure::new(
            Failure::PARSE,
            format!("GRIDLINK_THREADS={raw:?} is not a count"),
        )
    })?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::new(Failure::LIMIT, e))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Lk {
            input,
            crossings,
            check,
        } => cmd_lk(&input.load()?, *crossings, *check, json),
        Command::Moments(m) => match m {
            MomentsCommand::Exact {
                u,
                symbol_limit,
                pairs,
                long_run,
            } => cmd_exact(*u, *symbol_limit, *pairs, *long_run, json),
            MomentsCommand::Mc {
                n,
                u,
                samples,
                seed,
                antithetic,
            } => cmd_mc(*n, *u, *samples, *seed, *antithetic, json),
            MomentsCommand::Brute { n, u, long_run } => cmd_brute(*n, *u, *long_run, json),
        },
        Command::Types(t) => match t {
            TypesCommand::Enumerate { u, min_block_seq } => cmd_enumerate(*u, *min_block_seq, json),
            TypesCommand::Of { seq, n } => cmd_type_of(seq, *n, json),
        },
        Command::Render { input, output } => cmd_render(&input.load()?, output, json),
        Command::Verify { suite } => cmd_verify(*suite, json),
        Command::Report {
            n_list,
            samples,
            seed,
        } => cmd_report(n_list, *samples, *seed, json),
        Command::Histogram {
            n,
            samples,
            seed,
            bin_width,
        } => cmd_histogram(*n, *samples, *seed, *bin_width, json),
    }
}

impl DiagramInput {
    fn load(&self) -> Result<GridLink, Failure> {
        match (&self.file, &self.sigma, &self.pi) {
            (Some(path), _, _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::new(Failure::IO, format!("{}: {e}", path.display())))?;
                Ok(GridLink::parse_text(&text)?)
            }
            (None, Some(s), Some(p)) => {
                let sigma: Permutation = s.parse()?;
                let pi: Permutation = p.parse()?;
                Ok(GridLink::new(sigma, pi)?)
            }
            _ => Err(Failure::new(
                Failure::PARSE,
                "give a diagram file or both --sigma and --pi",
            )),
        }
    }
}

fn lines(v: Value) -> String {
    format!("{v}\n")
}

fn cmd_lk(link: &GridLink, crossings: bool, check: bool, json: bool) -> Outcome {
    let lk = linking_number(link);
    let geometric = if check {
        let g = linking_number_geometric(link).map_err(|e| Failure::new(Failure::MISMATCH, e))?;
        if g != lk {
            return Err(Failure::new(
                Failure::MISMATCH,
                format!("formula gives {lk}, crossings give {g}"),
            ));
        }
        Some(g)
    } else {
        None
    };
    let list = crossings.then(|| geometric_crossings(link));
    if json {
        let mut v = json!({
            "n": link.n(),
            "sigma": link.sigma().as_slice(),
            "pi": link.pi().as_slice(),
            "lk": lk,
        });
        if let Some(g) = geometric {
            v["geometric"] = g.into();
        }
        if let Some(list) = &list {
            v["crossings"] = list
                .iter()
                .map(|c| {
                    json!({
                        "column": c.at.0,
                        "row": c.at.1,
                        "over": c.over.number(),
                        "under": c.under.number(),
                        "sign": c.sign,
                    })
                })
                .collect();
        }
        return Ok(lines(v));
    }
    let mut out = format!("{lk}\n");
    if let Some(list) = list {
        for c in list {
            out.push_str(&format!(
                "({},{}) over {} under {} sign {:+}\n",
                c.at.0,
                c.at.1,
                c.over.number(),
                c.under.number(),
                c.sign
            ));
        }
    }
    Ok(out)
}

fn cmd_exact(u: usize, symbol_limit: usize, pairs: bool, long_run: bool, json: bool) -> Outcome {
    if u == 0 {
        return Err(Failure::new(Failure::PARSE, "u must be positive"));
    }
    if u > EXACT_ORDER_LIMIT && !long_run {
        return Err(Failure::new(
            Failure::LIMIT,
            format!("u = {u} exceeds {EXACT_ORDER_LIMIT}; pass --long-run to attempt it"),
        ));
    }
    let cfg = EngineConfig {
        symbol_limit,
        ..EngineConfig::default()
    };
    let poly = moment_polynomial(u, &cfg)?;
    let mut report = MomentReport::from_polynomial(&poly);
    if pairs && u.is_multiple_of(2) {
        let lead = leading_coefficient(u, &cfg)?;
        report.pairs = Some(lead.terms.iter().map(|t| t.entry()).collect());
    } else if pairs {
        report.pairs = Some(pair_terms(u, &cfg)?.iter().map(|t| t.entry()).collect());
    }
    if json {
        let mut v = serde_json::to_value(&report).expect("report serializes");
        v["polynomial"] = poly.pretty().into();
        return Ok(lines(v));
    }
    let mut out = format!(
        "E[lk^{u}] = {}\na_{u} = {}\nvalid for n >= {}\n",
        poly.pretty(),
        report.a_u,
        report.n_valid
    );
    if let Some(entries) = &report.pairs {
        for e in entries {
            out.push_str(&format!("{} {} {}\n", e.p, e.q, e.inner_sum));
        }
    }
    Ok(out)
}

fn cmd_mc(n: usize, u: u32, samples: u64, seed: u64, antithetic: bool, json: bool) -> Outcome {
    let stats = estimate_moments(n, u, samples, seed, antithetic)?;
    let meta = RunMetadata::new(seed);
    if json {
        return Ok(lines(json!({
            "metadata": meta,
            "n": n,
            "samples": samples,
            "stats": stats,
        })));
    }
    let mut out = format!("{}\n", meta.json_line());
    out.push_str("u,mean,se,normalized_mean,normalized_se\n");
    for e in &stats.estimates {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.u, e.mean, e.se, e.normalized_mean, e.normalized_se
        ));
    }
    Ok(out)
}

fn cmd_brute(n: usize, u: u32, long_run: bool, json: bool) -> Outcome {
    let opts = OracleOptions {
        allow_long_run: long_run,
        progress: long_run,
    };
    let dist = exact_lk_distribution(n, &opts)?;
    let value = format_rational(&dist.moment(u));
    if json {
        return Ok(lines(json!({
            "n": n,
            "u": u,
            "value": value,
            "distribution": dist.to_json(),
        })));
    }
    Ok(format!("{value}\n"))
}

fn cmd_enumerate(u: usize, min_block_seq: usize, json: bool) -> Outcome {
    let census = enumerate_types(u).with_min_sequence_size(min_block_seq);
    let names: Vec<String> = census.types.iter().map(SequenceType::to_string).collect();
    if json {
        return Ok(lines(json!({
            "u": u,
            "min_block_seq": min_block_seq,
            "count": names.len(),
            "types": names,
        })));
    }
    Ok(names.iter().map(|s| format!("{s}\n")).collect())
}

fn cmd_type_of(seq: &[usize], n: usize, json: bool) -> Outcome {
    let ty = type_of(seq, n).map_err(|e| Failure::new(Failure::PARSE, e))?;
    if json {
        return Ok(lines(json!({ "seq": seq, "n": n, "type": ty.to_string() })));
    }
    Ok(format!("{ty}\n"))
}

fn cmd_render(link: &GridLink, output: &Path, json: bool) -> Outcome {
    let rendered = render_svg(link);
    std::fs::write(output, &rendered.svg)
        .map_err(|e| Failure::new(Failure::IO, format!("{}: {e}", output.display())))?;
    if json {
        return Ok(lines(json!({
            "output": output.display().to_string(),
            "lk": rendered.lk,
            "crossings": rendered.inter_component_gaps(),
        })));
    }
    Ok(format!(
        "wrote {} (lk = {})\n",
        output.display(),
        rendered.lk
    ))
}

fn cmd_verify(suite: SuiteArg, json: bool) -> Outcome {
    let suite = match suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let report = run_suite(suite, &VerifyContext::default());
    let out = if json {
        lines(serde_json::to_value(&report).expect("report serializes"))
    } else {
        report
            .checks
            .iter()
            .map(|c| {
                let status = if c.passed { "PASS" } else { "FAIL" };
                format!("{status} {} ({}) [{:.2}s]\n", c.name, c.detail, c.seconds)
            })
            .collect()
    };
    if report.passed {
        Ok(out)
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        print!("{out}");
        Err(Failure::new(
            Failure::VERIFY,
            format!("failed checks: {}", names.join(", ")),
        ))
    }
}

fn cmd_report(n_list: &[usize], samples: u64, seed: u64, json: bool) -> Outcome {
    let report = convergence_report(n_list, samples, seed)?;
    if json {
        return Ok(lines(
            serde_json::to_value(&report).expect("report serializes"),
        ));
    }
    Ok(format!("{}\n{}", report.metadata_line(), report.to_csv()))
}

fn cmd_histogram(n: usize, samples: u64, seed: u64, bin_width: Option<f64>, json: bool) -> Outcome {
    let (hist, counts) = histogram_normalized_lk(n, samples, bin_width, seed)?;
    let meta = RunMetadata::new(seed);
    if json {
        let (skew, skew_se) = counts.skewness();
        return Ok(lines(json!({
            "metadata": meta,
            "histogram": hist,
            "skewness": skew,
            "skewness_se": skew_se,
        })));
    }
    Ok(format!("{}\n{}", meta.json_line(), hist.to_csv()))
}
