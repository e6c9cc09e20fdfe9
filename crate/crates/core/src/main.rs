use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chansparse::channel::generate_drop;
use chansparse::config::RunConfig;
use chansparse::experiment::{
    cdf_csv, cdf_svg, percentiles, run_suite, samples_csv, summary_json, PercentileReport,
    ReferenceTable, SampleRow, SuiteResult, SuiteSpec, MIN_REPORT_SAMPLES,
};
use chansparse::extract::{
    compare_to_truth, extract, round_trip_fixture, synthesize_measurement, FixtureSpec,
};
use chansparse::formats::{read_input, read_text, write_drop, write_text, InputFile};
use chansparse::gini::gini_realization;
use chansparse::rng::aux_rng;
use chansparse::theory::{theorem_sweep, verify_theorem, ClusterPowerSet};
use chansparse::types::{AllocationMode, Band, ChannelRealization, GiniSample, LosVariant};
use chansparse::Error;

#[derive(Parser)]
#[command(
    name = "chansparse",
    version,
    about = "Channel sparsity simulator and analysis toolkit"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Number of drops
    #[arg(long, global = true, value_name = "N")]
    drops: Option<usize>,
    /// Restrict to one band (cmWave, mmWave, subTHz or a configured band)
    #[arg(long, global = true, value_name = "NAME")]
    band: Option<String>,
    /// Restrict to one allocation mode
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write SVG CDF plots
    #[arg(long, global = true)]
    svg: bool,
    /// Worker threads (default: one per core)
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Equal,
    Ick,
}

impl From<ModeArg> for AllocationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Equal => AllocationMode::Equal,
            ModeArg::Ick => AllocationMode::Ick,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    WithLos,
    WithoutLos,
    Both,
}

impl VariantArg {
    fn variants(self) -> Vec<LosVariant> {
        match self {
            VariantArg::WithLos => vec![LosVariant::WithLos],
            VariantArg::WithoutLos => vec![LosVariant::WithoutLos],
            VariantArg::Both => LosVariant::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write generated drops as drop files
    Generate {
        /// Write sounder round-trip fixtures instead of model drops
        #[arg(long)]
        fixture: bool,
    },
    /// Gini index of drop files
    Metrics {
        /// Drop files or directories of drop files
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        variant: VariantArg,
    },
    /// Monte Carlo run with percentile readouts and reference comparison
    Montecarlo,
    /// Randomized check that the ICK allocation never lowers the Gini index
    TheoryCheck {
        /// Number of random instances
        #[arg(long)]
        cases: Option<usize>,
        /// Check one instance: ascending cluster powers, comma separated
        #[arg(long, value_delimiter = ',', requires_all = ["rays", "ick"])]
        powers: Option<Vec<f64>>,
        /// Rays per cluster for a single instance
        #[arg(long)]
        rays: Option<usize>,
        /// Linear ICK for a single instance
        #[arg(long)]
        ick: Option<f64>,
    },
    /// Estimate rays, clusters and ICK from drop or CIR files
    Extract {
        /// Drop files (synthesized through the sounder model) or CIR files
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Percentiles and reference comparison from a samples CSV
    Report {
        /// Samples CSV (default: <out>/samples.csv)
        input: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Gate(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Parse { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Gate(m)) => {
            eprintln!("{m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn load_config(g: &Global) -> Result<RunConfig, Failure> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.generator.master_seed = s;
    }
    if let Some(d) = g.drops {
        cfg.run.drops = d;
    }
    if let Some(b) = &g.band {
        cfg.run.bands = vec![b.clone()];
    }
    if let Some(m) = g.mode {
        cfg.run.modes = vec![m.into()];
    }
    if let Some(o) = &g.out {
        cfg.run.out = o.clone();
    }
    if let Some(w) = g.workers {
        cfg.run.workers = w;
    }
    cfg.emit.svg |= g.svg;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Outcome {
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Generate { fixture } => cmd_generate(&cfg, fixture),
        Command::Metrics { inputs, variant } => cmd_metrics(&cfg, &inputs, &variant.variants()),
        Command::Montecarlo => cmd_montecarlo(&cfg),
        Command::TheoryCheck {
            cases,
            powers,
            rays,
            ick,
        } => match (powers, rays, ick) {
            (Some(p), Some(m), Some(i)) => cmd_theory_single(p, m, i),
            _ => cmd_theory_sweep(cases.unwrap_or(cfg.theory.cases), cfg.generator.master_seed),
        },
        Command::Extract { inputs } => cmd_extract(&cfg, &inputs),
        Command::Report { input } => {
            let path = input.unwrap_or_else(|| cfg.run.out.join("samples.csv"));
            cmd_report(&cfg, &path)
        }
    }
}

fn cmd_generate(cfg: &RunConfig, fixture: bool) -> Outcome {
    let out = &cfg.run.out;
    if fixture {
        let sm = cfg.sounder.model()?;
        let mut rng = aux_rng(cfg.generator.master_seed, 0x6669_7874);
        for d in 0..cfg.run.drops as u64 {
            let rays = round_trip_fixture(&FixtureSpec::default(), &sm, &mut rng)?;
            let r = ChannelRealization {
                has_los: false,
                rays,
                band: cfg.sounder.band.parse()?,
                seed: cfg.generator.master_seed,
                drop_index: d,
                mode: AllocationMode::Ick,
            };
            write_text(&out.join(format!("fixture_{d}.txt")), &write_drop(&r))?;
        }
        println!("wrote {} fixture(s) to {}", cfg.run.drops, out.display());
        return Ok(());
    }
    let profiles = cfg.profiles()?;
    let single = profiles.len() == 1 && cfg.run.modes.len() == 1;
    let mut written = 0;
    for p in &profiles {
        for &mode in &cfg.run.modes {
            let dir = if single {
                out.clone()
            } else {
                out.join(p.band.name()).join(mode.name())
            };
            for d in 0..cfg.run.drops as u64 {
                let r = generate_drop(p, &cfg.generator, mode, d)?;
                write_text(&dir.join(format!("drop_{d}.txt")), &write_drop(&r))?;
                written += 1;
            }
        }
    }
    println!("wrote {written} drop file(s) to {}", out.display());
    Ok(())
}

/// Files named directly plus `*.txt` files of named directories, sorted.
fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let entries =
                std::fs::read_dir(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "txt"))
                .collect();
            found.sort();
            if found.is_empty() {
                return Err(Failure::Io(format!("{}: no .txt input files", p.display())));
            }
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn cmd_metrics(cfg: &RunConfig, inputs: &[PathBuf], variants: &[LosVariant]) -> Outcome {
    let files = collect_inputs(inputs)?;
    let mut rows = Vec::new();
    let mut failures = 0;
    for f in &files {
        let r = match read_input(f)? {
            InputFile::Drop(r) => r,
            InputFile::Cirs(_) => {
                return Err(Failure::Usage(format!(
                    "{}: CIR files have no ray list",
                    f.display()
                )))
            }
        };
        for &v in variants {
            match gini_realization(&r, v) {
                Ok(sample) => rows.push(SampleRow {
                    band: r.band.clone(),
                    sample,
                }),
                Err(e) => {
                    eprintln!("warning: {}: {}: {e}", f.display(), v.name());
                    failures += 1;
                }
            }
        }
    }
    let csv = samples_csv(&rows);
    if cfg.emit.csv {
        let path = cfg.run.out.join("metrics.csv");
        write_text(&path, &csv)?;
    }
    print!("{csv}");
    let reports = reports_from_rows(&rows, false)?;
    print!("{}", format_reports(&reports));
    if failures > 0 {
        eprintln!("{failures} file/variant pair(s) skipped");
    }
    Ok(())
}

/// Percentile reports grouped by band, mode and variant in first-seen
/// order.
fn reports_from_rows(rows: &[SampleRow], compare: bool) -> Result<Vec<PercentileReport>, Failure> {
    let mut keys: Vec<(Band, AllocationMode, LosVariant)> = Vec::new();
    for r in rows {
        let k = (r.band.clone(), r.sample.mode, r.sample.variant);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut reports = Vec::new();
    for (band, mode, variant) in keys {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.band == band && r.sample.mode == mode && r.sample.variant == variant)
            .map(|r| r.sample.value)
            .collect();
        if values.len() < MIN_REPORT_SAMPLES {
            eprintln!(
                "warning: {band}/{}/{}: only {} sample(s), percentiles are unreliable",
                mode.name(),
                variant.name(),
                values.len()
            );
        }
        let mut rep = percentiles(&values, band.clone(), mode, variant)?;
        let table = ReferenceTable::for_mode(mode);
        if compare && table.row(&band, variant).is_ok() {
            rep = rep.compare(table)?;
        }
        reports.push(rep);
    }
    Ok(reports)
}

fn format_reports(reports: &[PercentileReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<8} {:<6} {:<12} {:>6} {:>6} {:>6} {:>7}  reference p50 (delta, gate)",
        "band", "mode", "variant", "p20", "p50", "p80", "drops"
    );
    for r in reports {
        let _ = write!(
            s,
            "{:<8} {:<6} {:<12} {:>6.3} {:>6.3} {:>6.3} {:>7}",
            r.band.name(),
            r.mode.name(),
            r.variant.name(),
            r.p20,
            r.p50,
            r.p80,
            r.n_drops
        );
        if let Some(c) = &r.comparison {
            let _ = write!(
                s,
                "  {} {:.2} ({:+.3}",
                c.table, c.reference[1], c.deltas[1]
            );
            match &c.gate {
                Some(g) => {
                    let _ = write!(
                        s,
                        ", ±{} {})",
                        g.tolerance,
                        if g.passed { "pass" } else { "FAIL" }
                    );
                }
                None => s.push_str(", not gated)"),
            }
        }
        s.push('\n');
    }
    s
}

fn emit_suite(cfg: &RunConfig, result: &SuiteResult) -> Outcome {
    let out = &cfg.run.out;
    if cfg.emit.csv {
        write_text(&out.join("samples.csv"), &samples_csv(&result.rows))?;
    }
    if cfg.emit.summary {
        write_text(&out.join("summary.json"), &summary_json(result)?)?;
    }
    if cfg.emit.cdf || cfg.emit.svg {
        for r in &result.reports {
            let values = result.values(&r.band, r.mode, r.variant);
            let stem = format!("{}_{}_{}", r.band.name(), r.mode.name(), r.variant.name());
            if cfg.emit.cdf {
                write_text(
                    &out.join("cdf").join(format!("{stem}.csv")),
                    &cdf_csv(&values),
                )?;
            }
            if cfg.emit.svg {
                let title = format!(
                    "Gini CDF: {} {} {}",
                    r.band.name(),
                    r.mode.name(),
                    r.variant.name()
                );
                write_text(
                    &out.join("cdf").join(format!("{stem}.svg")),
                    &cdf_svg(&title, &values),
                )?;
            }
        }
    }
    Ok(())
}

fn gate_outcome(result: &SuiteResult) -> Outcome {
    let failed = result.failed_gates();
    if failed.is_empty() {
        return Ok(());
    }
    let mut msg = format!("{} gated comparison(s) outside tolerance:", failed.len());
    for r in failed {
        let _ = write!(
            msg,
            " {}/{}/{}",
            r.band.name(),
            r.mode.name(),
            r.variant.name()
        );
    }
    Err(Failure::Gate(msg))
}

fn cmd_montecarlo(cfg: &RunConfig) -> Outcome {
    let spec = SuiteSpec {
        profiles: cfg.profiles()?,
        modes: cfg.run.modes.clone(),
        cfg: cfg.generator.clone(),
        drops: cfg.run.drops,
        workers: cfg.workers(),
    };
    let result = run_suite(&spec)?;
    emit_suite(cfg, &result)?;
    print!("{}", format_reports(&result.reports));
    gate_outcome(&result)
}

fn parse_samples_csv(path: &Path, text: &str) -> Result<Vec<SampleRow>, Failure> {
    let bad = |line: usize, field: &str, reason: String| {
        Failure::from(Error::Parse {
            path: path.to_path_buf(),
            field: format!("line {line}: {field}"),
            reason,
        })
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == chansparse::experiment::SAMPLES_HEADER => {}
        _ => {
            return Err(bad(
                1,
                "header",
                format!("expected `{}`", chansparse::experiment::SAMPLES_HEADER),
            ))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(bad(
                n,
                "record",
                format!("expected 5 columns, found {}", cols.len()),
            ));
        }
        rows.push(SampleRow {
            band: cols[0]
                .parse()
                .map_err(|e: Error| bad(n, "band", e.to_string()))?,
            sample: GiniSample {
                mode: cols[1]
                    .parse()
                    .map_err(|e: Error| bad(n, "mode", e.to_string()))?,
                variant: cols[2]
                    .parse()
                    .map_err(|e: Error| bad(n, "variant", e.to_string()))?,
                drop_index: cols[3]
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(n, "drop_index", e.to_string()))?,
                value: cols[4]
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| bad(n, "gini", e.to_string()))?,
            },
        });
    }
    if rows.is_empty() {
        return Err(bad(2, "record", "no samples".into()));
    }
    Ok(rows)
}

fn cmd_report(cfg: &RunConfig, path: &Path) -> Outcome {
    let rows = parse_samples_csv(path, &read_text(path)?)?;
    let reports = reports_from_rows(&rows, true)?;
    let drops = rows
        .iter()
        .map(|r| r.sample.drop_index + 1)
        .max()
        .unwrap_or(0) as usize;
    let result = SuiteResult {
        master_seed: cfg.generator.master_seed,
        drops,
        rows,
        reports,
    };
    let emit = RunConfig {
        emit: chansparse::config::EmitSection {
            csv: false,
            ..cfg.emit.clone()
        },
        ..cfg.clone()
    };
    emit_suite(&emit, &result)?;
    print!("{}", format_reports(&result.reports));
    gate_outcome(&result)
}

fn cmd_theory_sweep(cases: usize, seed: u64) -> Outcome {
    if cases == 0 {
        return Err(Failure::Usage("--cases must be >= 1".into()));
    }
    let r = theorem_sweep(cases, seed);
    println!("seed                      {}", r.seed);
    println!("cases                     {}", r.cases);
    println!("order preserved           {}", r.order_preserved);
    println!("order changed             {}", r.order_changed);
    println!("counterexamples           {}", r.counterexamples);
    println!("min Gk - G1               {:e}", r.min_delta);
    println!("max |Gk - G1| at boundary {:e}", r.max_boundary_delta);
    println!("max G1 oracle error       {:e}", r.max_g1_oracle_error);
    println!("max Gk oracle error       {:e}", r.max_gk_oracle_error);
    println!(
        "max difference error      {:e}",
        r.max_difference_formula_error
    );
    if let Some(w) = &r.worst_case {
        println!(
            "worst case                N={} M={} I={:e} P={:?}",
            w.powers.len(),
            w.m_rays,
            w.ick,
            w.powers
        );
    }
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Gate(format!(
            "{} counterexample(s)",
            r.counterexamples
        )))
    }
}

fn cmd_theory_single(powers: Vec<f64>, m: usize, ick: f64) -> Outcome {
    let cps = ClusterPowerSet::new(powers, m)?;
    let r = verify_theorem(&cps, ick)?;
    println!("G1        {}", r.g1);
    println!("Gk        {}", r.gk);
    println!("Gk - G1   {:e}", r.delta);
    println!("situation {:?}", r.situation);
    if r.holds {
        Ok(())
    } else {
        Err(Failure::Gate("Gk < G1".into()))
    }
}

fn cmd_extract(cfg: &RunConfig, inputs: &[PathBuf]) -> Outcome {
    let files = collect_inputs(inputs)?;
    let sm = cfg.sounder.model()?;
    let kmeans = cfg.sounder.kmeans(cfg.generator.master_seed);
    for (idx, f) in files.iter().enumerate() {
        let (truth, cirs) = match read_input(f)? {
            InputFile::Drop(r) => {
                let mut rng = aux_rng(cfg.generator.master_seed ^ r.seed, r.drop_index);
                let cirs = synthesize_measurement(&r.rays, &sm, &mut rng)?;
                (Some(r.rays), cirs)
            }
            InputFile::Cirs(c) => (None, c),
        };
        let est = extract(&cirs, &sm, cfg.sounder.target_k, &kmeans)?;
        if idx > 0 {
            println!();
        }
        println!("file      {}", f.display());
        println!("rays      {}", est.rays.len());
        if let Some(l) = &est.lsp {
            println!("ds_s      {:e}", l.ds_s);
            println!("k_db      {:.3}", l.k_db);
        }
        println!("clusters  {}", est.clusters.len());
        for (c, (cl, ick)) in est.clusters.iter().zip(&est.ick).enumerate() {
            let ick = ick.map_or_else(
                || "undefined".to_string(),
                |i| format!("{:.3} dB", 10.0 * i.log10()),
            );
            println!(
                "  cluster {c}: {} ray(s), first delay {:e} s, power {:e}, ick {ick}",
                cl.rays().len(),
                cl.rays()[0].delay_s,
                cl.power()
            );
        }
        let has_labels = truth
            .as_ref()
            .is_some_and(|t| t.iter().any(|r| r.cluster.is_some()));
        if let (Some(t), true) = (&truth, has_labels) {
            let rep = compare_to_truth(t, &est, &sm);
            println!(
                "truth     {} eligible, {} recovered ({:.1}%)",
                rep.eligible,
                rep.recovered,
                100.0 * rep.recovery_rate
            );
            println!("max delay error  {:.3} bin", rep.max_delay_error_bins);
            println!("max power error  {:.3} dB", rep.max_power_error_db);
            for (t_db, e_db) in &rep.ick_db {
                println!(
                    "ick truth {t_db:.3} dB, estimate {e_db:.3} dB, delta {:+.3} dB",
                    e_db - t_db
                );
            }
        }
    }
    Ok(())
}
