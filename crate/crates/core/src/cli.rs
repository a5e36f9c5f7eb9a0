//! Command-line front end.  Every run echoes its full configuration into
//! the output header, so a file can be regenerated byte-for-byte from its
//! own first line.

use crate::characters::character_group;
use crate::decomp::{class_scan, quadratic_split_scan};
use crate::error::{Error, Result};
use crate::figures::log_schedule;
use crate::figures::{reproduce, FigureId, FigureRequest};
use crate::indicator::{origin_identity, scan, EpsilonMode, Grid, ScanRequest, Target};
use crate::output::{fmt_f64, fmt_opt_f64, read_scan_csv, to_json_text, TableDoc};
use crate::primes::{prime_powers, Cutoff, ResidueFilter};
use crate::validate::{run_suite, SuiteMode, DEFAULT_SEED};
use crate::zeros::{detect_spikes, landau_sum, load_zeros_auto, origin_zero_side, ZeroTable};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "zeroscan",
    version,
    about = "Prime-side spectral scans for zeta and Dirichlet L-functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write here instead of stdout (`figure` treats this as a directory).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output representation, where both make sense.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CompMode {
    Exact,
    Asymptotic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl From<FigureArg> for FigureId {
    fn from(f: FigureArg) -> FigureId {
        match f {
            FigureArg::Fig1 => FigureId::Fig1,
            FigureArg::Fig2 => FigureId::Fig2,
            FigureArg::Fig3 => FigureId::Fig3,
            FigureArg::Fig4 => FigureId::Fig4,
            FigureArg::Fig5 => FigureId::Fig5,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate prime powers p^n <= limit, optionally filtered to residue
    /// classes.
    Sieve {
        #[arg(long)]
        limit: u64,
        /// Keep only prime powers in the given classes mod this modulus.
        #[arg(long, requires = "classes")]
        modulus: Option<u64>,
        /// Comma-separated residue classes, e.g. `1,3`.
        #[arg(long, value_delimiter = ',')]
        classes: Vec<u64>,
    },
    /// Describe the character group of a modulus.
    Chars {
        #[arg(long)]
        modulus: u64,
    },
    /// Scan a zero indicator over a uniform ordinate grid.
    Scan {
        #[arg(long)]
        limit: u64,
        /// `zeta` or `char:<modulus>:<label>`.
        #[arg(long, default_value = "zeta", value_parser = parse_target)]
        target: Target,
        #[arg(long, allow_negative_numbers = true)]
        y_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        y_max: f64,
        #[arg(long)]
        step: f64,
        /// `zero`, `paper`, or a fixed nonnegative offset.
        #[arg(long, default_value = "zero", value_parser = parse_eps)]
        eps: EpsilonMode,
    },
    /// Trace the y = 0 identity over a log-spaced cutoff schedule.
    Origin {
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = 24)]
        points: usize,
        /// Zero table for the zero-side prediction column.
        #[arg(long)]
        zeros: Option<PathBuf>,
        /// Zero-side ordinate ceiling.
        #[arg(long, default_value_t = 1000.0)]
        gamma_max: f64,
    },
    /// Indicator of one prime residue class via the character table.
    Decompose {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        class: u64,
        #[arg(long)]
        limit: u64,
        #[arg(long, allow_negative_numbers = true)]
        y_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        y_max: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value = "zero", value_parser = parse_eps)]
        eps: EpsilonMode,
        /// Non-primitive rows corrected by the exact truncated series or
        /// the asymptotic constant.
        #[arg(long, value_enum, default_value_t = CompMode::Exact)]
        compensation: CompMode,
    },
    /// Split a quadratic character's classes into zeta and chi rows.
    Qsplit {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        char_label: usize,
        #[arg(long)]
        limit: u64,
        #[arg(long, allow_negative_numbers = true)]
        y_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        y_max: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value = "zero", value_parser = parse_eps)]
        eps: EpsilonMode,
        #[arg(long, value_enum, default_value_t = CompMode::Exact)]
        compensation: CompMode,
    },
    /// Landau's zero sum at one point.
    Landau {
        #[arg(long)]
        x: f64,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        zeros: PathBuf,
    },
    /// Match the dips of a previous scan against a zero table.
    Match {
        #[arg(long)]
        scan: PathBuf,
        /// Omit to report every spike unmatched.
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        depth_frac: f64,
    },
    /// Reproduce the data panels of one figure.
    Figure {
        #[arg(long, value_enum)]
        id: FigureArg,
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        /// Zero table for cross marks (required by fig2 and fig5).
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[arg(long, default_value = "zero", value_parser = parse_eps)]
        eps: EpsilonMode,
    },
    /// Run the acceptance suite.
    Validate {
        #[arg(long, value_enum, default_value_t = SuiteArg::Fast)]
        suite: SuiteArg,
        /// Seed for the randomized algebra checks.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn parse_target(s: &str) -> std::result::Result<Target, String> {
    if s == "zeta" {
        return Ok(Target::Zeta);
    }
    if let Some(rest) = s.strip_prefix("char:") {
        let (q, label) = rest
            .split_once(':')
            .ok_or_else(|| String::from("expected char:<modulus>:<label>"))?;
        let modulus: u64 = q.parse().map_err(|_| format!("bad modulus `{q}`"))?;
        let label: usize = label.parse().map_err(|_| format!("bad label `{label}`"))?;
        return Ok(Target::Character { modulus, label });
    }
    Err(format!(
        "unknown target `{s}` (use `zeta` or `char:<modulus>:<label>`)"
    ))
}

fn parse_eps(s: &str) -> std::result::Result<EpsilonMode, String> {
    match s {
        "zero" => Ok(EpsilonMode::Zero),
        "paper" => Ok(EpsilonMode::Paper),
        other => {
            let v: f64 = other
                .parse()
                .map_err(|_| format!("eps must be `zero`, `paper`, or a number, got `{other}`"))?;
            if !v.is_finite() || v < 0.0 {
                return Err(format!("fixed eps must be nonnegative, got {v}"));
            }
            Ok(EpsilonMode::Fixed(v))
        }
    }
}

/// Parse argv, dispatch, and map errors to exit codes (1 = suite failure,
/// 2 = any other error).
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            eprintln!("error: could not size the thread pool: {e}");
            return 2;
        }
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Sieve {
            limit,
            modulus,
            classes,
        } => cmd_sieve(cli, *limit, *modulus, classes),
        Command::Chars { modulus } => cmd_chars(cli, *modulus),
        Command::Scan {
            limit,
            target,
            y_min,
            y_max,
            step,
            eps,
        } => cmd_scan(cli, *limit, target, *y_min, *y_max, *step, *eps),
        Command::Origin {
            limit,
            points,
            zeros,
            gamma_max,
        } => cmd_origin(cli, *limit, *points, zeros.as_deref(), *gamma_max),
        Command::Decompose {
            modulus,
            class,
            limit,
            y_min,
            y_max,
            step,
            eps,
            compensation,
        } => cmd_decompose(
            cli,
            *modulus,
            *class,
            *limit,
            *y_min,
            *y_max,
            *step,
            *eps,
            *compensation,
        ),
        Command::Qsplit {
            modulus,
            char_label,
            limit,
            y_min,
            y_max,
            step,
            eps,
            compensation,
        } => cmd_qsplit(
            cli,
            *modulus,
            *char_label,
            *limit,
            *y_min,
            *y_max,
            *step,
            *eps,
            *compensation,
        ),
        Command::Landau { x, t, zeros } => cmd_landau(cli, *x, *t, zeros),
        Command::Match {
            scan,
            zeros,
            depth_frac,
        } => cmd_match(cli, scan, zeros.as_deref(), *depth_frac),
        Command::Figure {
            id,
            limit,
            zeros,
            eps,
        } => cmd_figure(cli, (*id).into(), *limit, zeros.as_deref(), *eps),
        Command::Validate { suite, seed } => cmd_validate(cli, *suite, *seed),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// CSV by default, or the same rows wrapped as JSON under the echoed config.
fn emit_table(cli: &Cli, doc: &TableDoc, echo: &str, json_rows: serde_json::Value) -> Result<i32> {
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(cli, &doc.to_csv())?,
        Format::Json => emit(
            cli,
            &to_json_text(&serde_json::json!({"config": echo, "rows": json_rows})),
        )?,
    }
    Ok(0)
}

fn cmd_sieve(cli: &Cli, limit: u64, modulus: Option<u64>, classes: &[u64]) -> Result<i32> {
    let filter = match modulus {
        Some(q) => ResidueFilter::new(q, classes)?,
        None => ResidueFilter::none(),
    };
    let cutoff = Cutoff::new(limit)?;
    let terms: Vec<_> = prime_powers(&cutoff, &filter)?.collect();

    let mut echo = format!("zeroscan sieve --limit {limit}");
    if let Some(q) = modulus {
        let list = classes
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        echo.push_str(&format!(" --modulus {q} --classes {list}"));
    }
    let mut doc = TableDoc::new(&["p", "n", "value", "weight", "freq"]);
    doc.comment(&echo);
    for t in &terms {
        doc.push_row(vec![
            t.p.to_string(),
            t.n.to_string(),
            t.value.to_string(),
            fmt_f64(t.weight),
            fmt_f64(t.freq),
        ]);
    }
    let rows = serde_json::json!(terms
        .iter()
        .map(|t| serde_json::json!({
            "p": t.p, "n": t.n, "value": t.value, "weight": t.weight, "freq": t.freq
        }))
        .collect::<Vec<_>>());
    emit_table(cli, &doc, &echo, rows)
}

fn cmd_chars(cli: &Cli, modulus: u64) -> Result<i32> {
    let table = character_group(modulus)?;
    let echo = format!("zeroscan chars --modulus {modulus}");
    let chars: Vec<serde_json::Value> = table
        .characters()
        .iter()
        .map(|chi| {
            let gens: Vec<String> = chi
                .generator_values()
                .iter()
                .map(|(g, rot)| format!("chi({g}) = e(2 pi i {}/{})", rot.num(), rot.den()))
                .collect();
            serde_json::json!({
                "label": chi.label(),
                "parity": format!("{:?}", chi.parity()).to_lowercase(),
                "conductor": chi.conductor(),
                "primitive": chi.is_primitive(),
                "order": chi.order(),
                "generator_values": gens,
            })
        })
        .collect();

    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let body = serde_json::json!({
                "config": echo,
                "modulus": modulus,
                "phi": table.phi(),
                "characters": chars,
            });
            emit(cli, &to_json_text(&body))?;
        }
        Format::Csv => {
            let mut doc = TableDoc::new(&["label", "parity", "conductor", "primitive", "order"]);
            doc.comment(&echo);
            for chi in table.characters() {
                doc.push_row(vec![
                    chi.label().to_string(),
                    format!("{:?}", chi.parity()).to_lowercase(),
                    chi.conductor().to_string(),
                    chi.is_primitive().to_string(),
                    chi.order().to_string(),
                ]);
            }
            emit(cli, &doc.to_csv())?;
        }
    }
    Ok(0)
}

fn cmd_scan(
    cli: &Cli,
    limit: u64,
    target: &Target,
    y_min: f64,
    y_max: f64,
    step: f64,
    eps: EpsilonMode,
) -> Result<i32> {
    let request = ScanRequest {
        cutoff: Cutoff::new(limit)?,
        mode: eps,
        target: target.clone(),
        grid: Grid::from_bounds(y_min, y_max, step)?,
    };
    let samples = scan(&request)?;
    let echo = format!(
        "zeroscan scan --limit {limit} --target {target} --y-min {} --y-max {} --step {} --eps {eps}",
        fmt_f64(y_min),
        fmt_f64(y_max),
        fmt_f64(step)
    );
    let mut doc = TableDoc::new(&[
        "y",
        "total",
        "prime_sum_re",
        "main_term_re",
        "smooth_term",
        "predicted_depth",
    ]);
    doc.comment(&echo);
    for s in &samples {
        doc.push_row(vec![
            fmt_f64(s.y),
            fmt_f64(s.total),
            fmt_f64(s.prime_sum_re),
            fmt_f64(s.main_term_re),
            fmt_f64(s.smooth_term),
            fmt_f64(s.predicted_depth),
        ]);
    }
    emit_table(cli, &doc, &echo, serde_json::json!(samples))
}

fn cmd_origin(
    cli: &Cli,
    limit: u64,
    points: usize,
    zeros: Option<&std::path::Path>,
    gamma_max: f64,
) -> Result<i32> {
    if points < 2 {
        return Err(Error::InvalidRequest {
            reason: format!("need at least 2 schedule points, got {points}"),
        });
    }
    let table = zeros.map(load_zeros_auto).transpose()?;
    let mut echo = format!("zeroscan origin --limit {limit} --points {points}");
    if let Some(p) = zeros {
        echo.push_str(&format!(
            " --zeros {} --gamma-max {}",
            p.display(),
            fmt_f64(gamma_max)
        ));
    }

    let schedule = log_schedule(10, limit, points);
    let mut doc = TableDoc::new(&["limit", "x", "residual", "zero_side", "diff"]);
    doc.comment(&echo);
    let mut rows = Vec::new();
    for &l in &schedule {
        let cutoff = Cutoff::new(l)?;
        let residual = origin_identity(&cutoff)?;
        let zside = table
            .as_ref()
            .map(|t| origin_zero_side(t, cutoff.x(), gamma_max));
        doc.push_row(vec![
            l.to_string(),
            fmt_f64(cutoff.x()),
            fmt_f64(residual),
            fmt_opt_f64(zside),
            fmt_opt_f64(zside.map(|z| residual - z)),
        ]);
        rows.push(serde_json::json!({
            "limit": l,
            "x": cutoff.x(),
            "residual": residual,
            "zero_side": zside,
        }));
    }
    emit_table(cli, &doc, &echo, serde_json::json!(rows))
}

#[allow(clippy::too_many_arguments)]
fn cmd_decompose(
    cli: &Cli,
    modulus: u64,
    class: u64,
    limit: u64,
    y_min: f64,
    y_max: f64,
    step: f64,
    eps: EpsilonMode,
    compensation: CompMode,
) -> Result<i32> {
    let cutoff = Cutoff::new(limit)?;
    let grid = Grid::from_bounds(y_min, y_max, step)?;
    let exact = compensation == CompMode::Exact;
    let samples = class_scan(&cutoff, eps, modulus, class, &grid, exact)?;
    let echo = format!(
        "zeroscan decompose --modulus {modulus} --class {class} --limit {limit} --y-min {} --y-max {} --step {} --eps {eps} --compensation {}",
        fmt_f64(y_min),
        fmt_f64(y_max),
        fmt_f64(step),
        if exact { "exact" } else { "asymptotic" }
    );
    let mut doc = TableDoc::new(&[
        "y",
        "total",
        "class_sum_re",
        "noise_share",
        "smooth_even",
        "smooth_odd",
        "compensation",
    ]);
    doc.comment(&echo);
    for s in &samples {
        doc.push_row(vec![
            fmt_f64(s.y),
            fmt_f64(s.total),
            fmt_f64(s.class_sum_re),
            fmt_f64(s.noise_share),
            fmt_f64(s.smooth_even),
            fmt_f64(s.smooth_odd),
            fmt_f64(s.compensation),
        ]);
    }
    emit_table(cli, &doc, &echo, serde_json::json!(samples))
}

#[allow(clippy::too_many_arguments)]
fn cmd_qsplit(
    cli: &Cli,
    modulus: u64,
    char_label: usize,
    limit: u64,
    y_min: f64,
    y_max: f64,
    step: f64,
    eps: EpsilonMode,
    compensation: CompMode,
) -> Result<i32> {
    let table = character_group(modulus)?;
    let chi = table.character(char_label)?;
    let cutoff = Cutoff::new(limit)?;
    let grid = Grid::from_bounds(y_min, y_max, step)?;
    let exact = compensation == CompMode::Exact;
    let samples = quadratic_split_scan(&cutoff, eps, chi, &grid, exact)?;
    let echo = format!(
        "zeroscan qsplit --modulus {modulus} --char-label {char_label} --limit {limit} --y-min {} --y-max {} --step {} --eps {eps} --compensation {}",
        fmt_f64(y_min),
        fmt_f64(y_max),
        fmt_f64(step),
        if exact { "exact" } else { "asymptotic" }
    );
    let mut doc = TableDoc::new(&["y", "plus_re", "minus_re", "zeta_row", "chi_row"]);
    doc.comment(&echo);
    for s in &samples {
        doc.push_row(vec![
            fmt_f64(s.y),
            fmt_f64(s.plus_re),
            fmt_f64(s.minus_re),
            fmt_f64(s.zeta_row),
            fmt_f64(s.chi_row),
        ]);
    }
    emit_table(cli, &doc, &echo, serde_json::json!(samples))
}

fn cmd_landau(cli: &Cli, x: f64, t: f64, zeros: &std::path::Path) -> Result<i32> {
    let table = load_zeros_auto(zeros)?;
    let sum = landau_sum(x, t, &table)?;
    if sum.truncated {
        eprintln!(
            "warning: T = {} exceeds the table's last ordinate; the sum is truncated",
            fmt_f64(t)
        );
    }
    let echo = format!(
        "zeroscan landau --x {} --T {} --zeros {}",
        fmt_f64(x),
        fmt_f64(t),
        zeros.display()
    );
    let body = serde_json::json!({
        "config": echo,
        "re": sum.re,
        "im": sum.im,
        "predicted_re": sum.predicted_re,
        "count": sum.count,
    });
    emit(cli, &to_json_text(&body))?;
    Ok(0)
}

fn cmd_match(
    cli: &Cli,
    scan_path: &std::path::Path,
    zeros: Option<&std::path::Path>,
    depth_frac: f64,
) -> Result<i32> {
    let samples = read_scan_csv(scan_path)?;
    let table = match zeros {
        Some(p) => load_zeros_auto(p)?,
        None => ZeroTable::empty(Target::Zeta),
    };
    let spikes = detect_spikes(&samples, &table, depth_frac)?;
    let mut echo = format!(
        "zeroscan match --scan {} --depth-frac {}",
        scan_path.display(),
        fmt_f64(depth_frac)
    );
    if let Some(p) = zeros {
        echo.push_str(&format!(" --zeros {}", p.display()));
    }
    let mut doc = TableDoc::new(&[
        "detected_y",
        "matched_gamma",
        "offset",
        "depth",
        "predicted",
    ]);
    doc.comment(&echo);
    for s in &spikes {
        doc.push_row(vec![
            fmt_f64(s.detected_y),
            fmt_opt_f64(s.matched_gamma),
            fmt_opt_f64(s.offset),
            fmt_f64(s.depth),
            fmt_f64(s.predicted),
        ]);
    }
    emit_table(cli, &doc, &echo, serde_json::json!(spikes))
}

fn cmd_figure(
    cli: &Cli,
    id: FigureId,
    limit: u64,
    zeros: Option<&std::path::Path>,
    eps: EpsilonMode,
) -> Result<i32> {
    let table = zeros.map(load_zeros_auto).transpose()?;
    let req = FigureRequest {
        id,
        limit,
        mode: eps,
        zeros: table,
        out_dir: cli.output.clone().unwrap_or_else(|| PathBuf::from(".")),
    };
    let files = reproduce(&req)?;
    for f in &files {
        println!("{}", f.display());
    }
    Ok(0)
}

fn cmd_validate(cli: &Cli, suite: SuiteArg, seed: u64) -> Result<i32> {
    let mode = match suite {
        SuiteArg::Fast => SuiteMode::Fast,
        SuiteArg::Full => SuiteMode::Full,
    };
    let report = run_suite(mode, seed)?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let value = serde_json::to_value(&report).expect("report always serializes");
            emit(cli, &to_json_text(&value))?;
        }
        Format::Csv => emit(cli, &report.render())?,
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}
