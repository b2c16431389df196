use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use dickson_cli::commands::{self, DeepHoleArgs, WordSource};
use dickson_cli::config::{ExperimentConfig, Format};
use dickson_cli::emit;
use dickson_cli::suite::{run_suite, CSV_HEADER};
use dickson_core::rscode::{DEFAULT_DP_BUDGET, DEFAULT_SUBSET_BUDGET};
use dickson_core::FiniteField;

#[derive(Parser)]
#[command(
    name = "dickson",
    version,
    about = "Dickson value sets, character sums and deep holes of Reed-Solomon codes"
)]
struct Cli {
    /// Field as `p`, `p^m` or `p^m/c0,c1,...,cm`; repeat for suite grids
    #[arg(long, global = true)]
    field: Vec<String>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Cap on k-subsets examined by brute-force error distance
    #[arg(long, global = true)]
    budget_subsets: Option<u128>,
    /// Cap on |D| r q for subset-sum tables
    #[arg(long, global = true)]
    budget_dp: Option<u128>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field parameters, optionally with data for one element
    Field {
        #[arg(long)]
        elem: Option<u64>,
    },
    /// Value-set size by formula and by enumeration
    ValueSet {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        /// Also list the elements
        #[arg(long)]
        list: bool,
    },
    /// Preimage counts by formula and by enumeration
    #[command(group(ArgGroup::new("point").required(true).args(["x0", "all"])))]
    Preimage {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long)]
        x0: Option<u64>,
        #[arg(long)]
        all: bool,
    },
    /// Character sums for the character x -> psi(b x)
    Charsum {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
    },
    /// Deep-hole test on the code evaluated at the value set
    #[command(group(ArgGroup::new("source").required(true).args(["b1", "all_b1", "word", "poly"])))]
    Deephole {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long)]
        k: usize,
        /// Word x^(k+1) - b1 x^k
        #[arg(long)]
        b1: Option<u64>,
        /// Every b1 in the field
        #[arg(long)]
        all_b1: bool,
        /// JSON array of values at the points of D, in encoding order
        #[arg(long)]
        word: Option<String>,
        /// Polynomial literal, coefficients low to high
        #[arg(long)]
        poly: Option<String>,
        /// Also compute the exact distance by enumeration
        #[arg(long)]
        brute_force_crosscheck: bool,
    },
    /// Both sides of the main bound at one k
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long)]
        k: u64,
        /// Override |D| (default: value-set formula)
        #[arg(long)]
        size_d: Option<u64>,
        #[arg(long)]
        c1: Option<f64>,
    },
    /// Range of k covered by the simplified conditions for a given c1
    Region {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        size_d: Option<u64>,
    },
    /// Run experiment suites over a grid
    Suite {
        /// key = value file; flags given here override it
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        k: Option<String>,
        /// Comma-separated: valueset, preimage, charsum, sieve, deephole, region, all
        #[arg(long)]
        suites: Option<String>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        stride: Option<u64>,
        /// Include wall-clock times in the report
        #[arg(long)]
        timings: bool,
        /// Print the effective configuration and exit
        #[arg(long)]
        dump_config: bool,
    },
}

fn single_field(cli: &Cli) -> Result<FiniteField> {
    match cli.field.as_slice() {
        [spec] => FiniteField::from_spec(spec).with_context(|| format!("field {spec:?}")),
        [] => bail!("--field is required"),
        _ => bail!("this subcommand takes one --field"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Cmd::Suite { .. } = cli.cmd {
        return run_suite_cmd(cli);
    }
    let f = single_field(&cli)?;
    let value = match cli.cmd {
        Cmd::Field { elem } => commands::field_info(&f, elem)?,
        Cmd::ValueSet { n, a, list } => {
            commands::value_set_cmd(&commands::dickson(&f, n, a)?, list)?
        }
        Cmd::Preimage { n, a, x0, all: _ } => {
            commands::preimage_cmd(&commands::dickson(&f, n, a)?, x0)?
        }
        Cmd::Charsum { n, a, b } => commands::charsum_cmd(&commands::dickson(&f, n, a)?, b)?,
        Cmd::Deephole {
            n,
            a,
            k,
            b1,
            all_b1,
            word,
            poly,
            brute_force_crosscheck,
        } => {
            let source = match (b1, all_b1, word, poly) {
                (Some(b), _, _, _) => WordSource::B1(b),
                (_, true, _, _) => WordSource::AllB1,
                (_, _, Some(w), _) => WordSource::Values(w),
                (_, _, _, Some(p)) => WordSource::Poly(p),
                _ => unreachable!("clap enforces one source"),
            };
            let args = DeepHoleArgs {
                k,
                source,
                crosscheck: brute_force_crosscheck,
                budget_subsets: cli.budget_subsets.unwrap_or(DEFAULT_SUBSET_BUDGET),
                budget_dp: cli.budget_dp.unwrap_or(DEFAULT_DP_BUDGET),
            };
            commands::deephole_cmd(&commands::dickson(&f, n, a)?, &args)?
        }
        Cmd::Bound {
            n,
            a,
            k,
            size_d,
            c1,
        } => commands::bound_cmd(&commands::dickson(&f, n, a)?, k, size_d, c1)?,
        Cmd::Region { n, a, c1, size_d } => {
            commands::region_cmd(&commands::dickson(&f, n, a)?, c1, size_d)?
        }
        Cmd::Suite { .. } => unreachable!(),
    };
    let text = emit::render(&value, cli.format.unwrap_or_default())?;
    emit::write_output(&text, cli.out.as_deref())?;
    Ok(true)
}

fn run_suite_cmd(cli: Cli) -> Result<bool> {
    let Cmd::Suite {
        config,
        n,
        a,
        k,
        suites,
        c1,
        stride,
        timings,
        dump_config,
    } = cli.cmd
    else {
        unreachable!()
    };
    let mut cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            ExperimentConfig::parse_file(&text)
                .with_context(|| format!("config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if !cli.field.is_empty() {
        cfg.field = cli.field;
    }
    if let Some(out) = cli.out {
        cfg.out = Some(out.to_string_lossy().into_owned());
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    if let Some(b) = cli.budget_subsets {
        cfg.budget_subsets = b;
    }
    if let Some(b) = cli.budget_dp {
        cfg.budget_dp = b;
    }
    for (key, value) in [("n", n), ("a", a), ("k", k), ("suites", suites)] {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    if let Some(c) = c1 {
        cfg.c1 = c;
    }
    if let Some(s) = stride {
        cfg.stride = s;
    }
    if dump_config {
        cfg.validate()?;
        emit::write_output(&cfg.to_file_string(), None)?;
        return Ok(true);
    }
    let report = run_suite(&cfg, timings)?;
    let text = match cfg.format {
        Format::Json => emit::to_json(&report.to_value()),
        Format::Csv => emit::table_csv(&CSV_HEADER.map(String::from), &report.csv_rows())?,
    };
    emit::write_output(&text, cfg.out.as_deref().map(std::path::Path::new))?;
    for (name, s) in &report.suites {
        eprintln!(
            "{name}: {} pass, {} fail, {} skipped",
            s.pass, s.fail, s.skipped
        );
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
