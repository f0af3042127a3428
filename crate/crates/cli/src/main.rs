use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use toric_systems::admissible::{
    admissible_derivation, first_kind_name, is_first_kind, parse_sequence, Derivation,
};
use toric_systems::augment::{
    augmentation_chains, exposable_irreducible_curves, is_augmentation, AugmentationKind,
};
use toric_systems::checker::{check, CheckPath, Grade, Verdict};
use toric_systems::classes::r_classes;
use toric_systems::classify::{
    search_counterexamples, strong_patterns, verify_counterexample, verify_hirzebruch_family,
    verify_nonexistence, verify_table_partition, verify_table_yes, Assertion, NonexistenceOptions,
    NonexistenceReport, SearchReport, YesRowReport, TABLE_NO,
};
use toric_systems::effective::{zariski_reduce, Reduction};
use toric_systems::toric::SystemFile;
use toric_systems::{DivisorClass, PicardLattice, Registry, Surface, ToricSystem};

#[derive(Parser)]
#[command(
    name = "torsys",
    version,
    about = "Exceptional toric systems on weak del Pezzo surfaces"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for searches; results do not depend on it.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,
    /// Time budget in seconds for search subcommands.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Directory of registry `*.toml` files replacing the built-in registry.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the r-classes (D^2 = r, D.K = -r - 2) of a lattice.
    Classes {
        /// Lattice name: P2, B<n>, F<d> or F<d>B<n>.
        #[arg(long)]
        lattice: String,
        #[arg(long, allow_hyphen_values = true)]
        square: i64,
        /// Print only the number of classes.
        #[arg(long)]
        count: bool,
    },
    /// Derived data of a registered surface type.
    Surface {
        #[arg(long)]
        surface: String,
    },
    /// Decide effectiveness of a class; exit 1 if it is not effective.
    Effective {
        #[arg(long)]
        surface: String,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Validate a toric system and optionally transform it.
    Toric {
        #[arg(long)]
        system: PathBuf,
        /// Use this surface instead of the one named in the file.
        #[arg(long)]
        surface: Option<String>,
        /// Operations applied in order: `perm:K`, `shift:T` or `blow-down:M`.
        #[arg(long = "op")]
        ops: Vec<String>,
        /// Write the resulting system to this file (JSON if it ends in .json).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Admissibility of an integer sequence; exit 1 if not admissible.
    Admissible {
        #[arg(long, allow_hyphen_values = true)]
        sequence: String,
    },
    /// Exceptionality of a toric system; exit 1 with a witness if it fails.
    Check {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        surface: Option<String>,
        /// exc, strong or cyclic.
        #[arg(long, default_value = "cyclic")]
        mode: String,
        #[arg(long, value_enum, default_value_t = PathArg::Fast)]
        path: PathArg,
    },
    /// Whether a toric system is an augmentation; exit 1 if not.
    AugmentSearch {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        surface: Option<String>,
        /// standard, weak, exceptional, strong or cyclic.
        #[arg(long, default_value = "weak")]
        grade: String,
        /// Report up to `--limit` chains instead of the first one.
        #[arg(long)]
        all_chains: bool,
        #[arg(long, default_value_t = 16)]
        limit: usize,
    },
    /// Classification suites.
    Classify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Fast,
    General,
}

#[derive(Subcommand)]
enum Suite {
    /// Verify both classification tables; degree-3 nonexistence is
    /// enumerated only when a budget is given.
    Tables {
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Verify the degree-two strong exceptional system that is not a weak
    /// augmentation.
    Counterexample,
    /// Strong exceptional systems that are not weak augmentations.
    Search {
        #[arg(long)]
        surface: String,
        /// Squares pattern; repeatable. Defaults to every admissible pattern
        /// with at most one entry below -2 (placed last).
        #[arg(long = "pattern", allow_hyphen_values = true)]
        patterns: Vec<String>,
        /// Lowest square allowed in default patterns.
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        floor: i64,
        /// Resume from a checkpoint `PATTERN,BRANCH` of an earlier run.
        #[arg(long)]
        resume: Option<String>,
    },
}

struct Env {
    registry: Registry,
    format: Format,
    jobs: usize,
    deadline: Option<Instant>,
}

/// Result of a subcommand: a report and whether it verified.
struct Outcome {
    ok: bool,
    text: String,
    json: serde_json::Value,
}

fn outcome<T: Serialize>(ok: bool, text: String, report: &T) -> Result<Outcome> {
    Ok(Outcome {
        ok,
        text,
        json: serde_json::to_value(report)?,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((out, format)) => {
            match format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("reports serialize")
                ),
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(Outcome, Format)> {
    let registry = match &cli.data {
        Some(dir) => Registry::load_dir(dir)?,
        None => Registry::builtin().clone(),
    };
    if cli.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let ctx = Env {
        registry,
        format: cli.format,
        jobs: cli.jobs,
        deadline: cli.budget.map(|s| Instant::now() + Duration::from_secs(s)),
    };
    let out = match cli.command {
        Command::Classes {
            lattice,
            square,
            count,
        } => classes(&lattice, square, count)?,
        Command::Surface { surface } => surface_info(&ctx, &surface)?,
        Command::Effective { surface, class } => effective(&ctx, &surface, &class)?,
        Command::Toric {
            system,
            surface,
            ops,
            output,
        } => toric(&ctx, &system, surface.as_deref(), &ops, output)?,
        Command::Admissible { sequence } => admissible(&sequence)?,
        Command::Check {
            system,
            surface,
            mode,
            path,
        } => {
            let a = load_system(&ctx, &system, surface.as_deref())?;
            let grade: Grade = mode.parse()?;
            let path = match path {
                PathArg::Fast => CheckPath::Fast,
                PathArg::General => CheckPath::General,
            };
            let v = check(&a, grade, path);
            outcome(v.holds, verdict_text(&a, &v), &v)?
        }
        Command::AugmentSearch {
            system,
            surface,
            grade,
            all_chains,
            limit,
        } => {
            let a = load_system(&ctx, &system, surface.as_deref())?;
            augment_search(&ctx, &a, &grade, all_chains, limit)?
        }
        Command::Classify { suite } => match suite {
            Suite::Tables { degree } => tables(&ctx, degree)?,
            Suite::Counterexample => {
                let r = verify_counterexample(&ctx.registry)?;
                let text =
                    assertions_text(&format!("counterexample on {}", r.surface), &r.assertions);
                outcome(r.passed, text, &r)?
            }
            Suite::Search {
                surface,
                patterns,
                floor,
                resume,
            } => search(&ctx, &surface, &patterns, floor, resume.as_deref())?,
        },
    };
    Ok((out, ctx.format))
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn classes(lattice: &str, square: i64, count: bool) -> Result<Outcome> {
    let l: PicardLattice = lattice.parse()?;
    let v = r_classes(l, square);
    #[derive(Serialize)]
    struct Report<'a> {
        lattice: String,
        square: i64,
        count: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        classes: Option<&'a [DivisorClass]>,
    }
    let report = Report {
        lattice: l.to_string(),
        square,
        count: v.len(),
        classes: (!count).then_some(v.as_slice()),
    };
    let text = if count {
        format!("{}\n", v.len())
    } else {
        v.iter().map(|c| format!("{c}\n")).collect()
    };
    outcome(true, text, &report)
}

#[derive(Serialize)]
struct SurfaceReport {
    label: String,
    lattice: String,
    degree: i64,
    configuration: String,
    lines: usize,
    r_irr: Vec<DivisorClass>,
    r_eff: Vec<DivisorClass>,
    r_slo: Vec<DivisorClass>,
    i_irr: Vec<DivisorClass>,
}

fn surface_info(ctx: &Env, label: &str) -> Result<Outcome> {
    let s = ctx.registry.get(label)?;
    let inv = s.invariants();
    let r = SurfaceReport {
        label: s.display_name(),
        lattice: s.lattice().to_string(),
        degree: inv.degree,
        configuration: inv.configuration.clone(),
        lines: inv.lines,
        r_irr: s.r_irr().to_vec(),
        r_eff: s.r_eff().to_vec(),
        r_slo: s.r_slo().to_vec(),
        i_irr: s.i_irr().to_vec(),
    };
    let list = |v: &[DivisorClass]| format!("{} [{}]", v.len(), join(v.iter()));
    let text = format!(
        "surface: {}\nlattice: {}\ndegree: {}\nconfiguration: {}\nirreducible (-2)-curves: {}\neffective (-2)-classes: {}\nstrong left-orthogonal (-2)-classes: {}\nirreducible (-1)-curves: {}\n",
        r.label,
        r.lattice,
        r.degree,
        r.configuration,
        list(&r.r_irr),
        list(&r.r_eff),
        list(&r.r_slo),
        list(&r.i_irr)
    );
    outcome(true, text, &r)
}

fn reduction_text(d: &DivisorClass, r: &Reduction) -> String {
    let mut text = format!("{}\n", r.is_effective());
    if !r.bites.is_empty() {
        text.push_str(&format!("bites: {}\n", join(r.bites.iter())));
    }
    text.push_str(&format!(
        "{d} = {}residual {} ({:?})\n",
        r.bites
            .iter()
            .map(|b| format!("{b} + "))
            .collect::<String>(),
        r.residual,
        r.outcome
    ));
    text
}

fn effective(ctx: &Env, label: &str, class: &str) -> Result<Outcome> {
    let s = ctx.registry.get(label)?;
    let d = s.parse_class(class)?;
    let r = zariski_reduce(&s, &d);
    #[derive(Serialize)]
    struct Report<'a> {
        class: DivisorClass,
        effective: bool,
        reduction: &'a Reduction,
    }
    outcome(
        r.is_effective(),
        reduction_text(&d, &r),
        &Report {
            class: d,
            effective: r.is_effective(),
            reduction: &r,
        },
    )
}

fn load_system(ctx: &Env, path: &PathBuf, surface: Option<&str>) -> Result<ToricSystem> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = SystemFile::parse(&text)?;
    Ok(file.resolve(&ctx.registry, surface)?)
}

#[derive(Serialize)]
struct ToricReport {
    surface: String,
    entries: Vec<DivisorClass>,
    squares: Vec<i64>,
    first_kind: Option<&'static str>,
    candidate_positions: Vec<DivisorClass>,
    exposable_irreducible: Vec<DivisorClass>,
}

fn toric(
    ctx: &Env,
    path: &PathBuf,
    surface: Option<&str>,
    ops: &[String],
    output: Option<PathBuf>,
) -> Result<Outcome> {
    let mut a = load_system(ctx, path, surface)?;
    for op in ops {
        let (name, arg) = op
            .split_once(':')
            .with_context(|| format!("operation `{op}` has no argument"))?;
        let k: usize = arg
            .trim()
            .parse()
            .with_context(|| format!("bad argument in `{op}`"))?;
        a = match name.trim() {
            "perm" => a.perm(k)?,
            "shift" => a.shift_by(k % a.len()),
            "blow-down" => a.blow_down_toric(k, &ctx.registry)?.0,
            other => bail!("unknown operation `{other}` (expected perm, shift or blow-down)"),
        };
    }
    let squares = a.squares();
    let first_kind = if is_first_kind(&squares) {
        first_kind_name(&squares)
    } else {
        None
    };
    let r = ToricReport {
        surface: a.surface().display_name(),
        entries: a.entries().to_vec(),
        squares: squares.clone(),
        first_kind,
        candidate_positions: a.candidate_positions(),
        exposable_irreducible: exposable_irreducible_curves(&a),
    };
    if let Some(out) = output {
        let file = SystemFile::from_system(&a);
        let text = if out.extension().is_some_and(|e| e == "json") {
            serde_json::to_string_pretty(&file)? + "\n"
        } else {
            file.to_text()
        };
        std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    let text = format!(
        "surface: {}\nsystem: {}\nsquares: {:?}\nfirst kind: {}\nI(X,A): {} classes\nexposable irreducible (-1)-curves: [{}]\n",
        r.surface,
        a,
        r.squares,
        r.first_kind.unwrap_or("no"),
        r.candidate_positions.len(),
        join(r.exposable_irreducible.iter())
    );
    outcome(true, text, &r)
}

fn admissible(sequence: &str) -> Result<Outcome> {
    let seq = parse_sequence(sequence)?;
    let d = admissible_derivation(&seq);
    #[derive(Serialize)]
    struct Report<'a> {
        sequence: &'a [i64],
        admissible: bool,
        first_kind: bool,
        first_kind_type: Option<&'static str>,
        derivation: Option<&'a Derivation>,
    }
    let first = d.is_some() && seq.iter().all(|&x| x >= -2);
    let r = Report {
        sequence: &seq,
        admissible: d.is_some(),
        first_kind: first,
        first_kind_type: if first { first_kind_name(&seq) } else { None },
        derivation: d.as_ref(),
    };
    let mut text = format!("{}\n", r.admissible);
    if let Some(d) = &d {
        text.push_str(&format!(
            "from {:?} by augmentations at {:?}\n",
            d.base, d.steps
        ));
    }
    if let Some(t) = r.first_kind_type {
        text.push_str(&format!("first kind, type {t}\n"));
    }
    outcome(r.admissible, text, &r)
}

fn verdict_text(a: &ToricSystem, v: &Verdict) -> String {
    let mut text = format!("{}\n", v.holds);
    match &v.witness {
        Some(w) => text.push_str(&format!(
            "{} fails on segment {} of {}: sum {}\n",
            v.grade, w.segment, a, w.sum
        )),
        None => text.push_str(&format!("{} ({:?} path)\n", v.grade, v.path)),
    }
    text
}

fn augment_search(
    ctx: &Env,
    a: &ToricSystem,
    grade: &str,
    all_chains: bool,
    limit: usize,
) -> Result<Outcome> {
    let kind: AugmentationKind = grade.parse()?;
    let v = is_augmentation(a, kind)?;
    let chains = if all_chains && v.holds {
        augmentation_chains(a, kind, &ctx.registry, limit)
    } else {
        Vec::new()
    };
    let mut text = format!("{}\n", v.holds);
    if let Some(chain) = &v.chain {
        text.push_str(&format!(
            "base: {} on {}\n",
            chain.base,
            chain.base.surface().display_name()
        ));
        for step in &chain.steps {
            text.push_str(&format!("  {step}\n"));
        }
    } else {
        text.push_str(&format!(
            "irreducible candidates: [{}]\n",
            join(v.candidates.iter())
        ));
    }
    if all_chains {
        text.push_str(&format!("{} chains\n", chains.len()));
    }
    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        verdict: &'a toric_systems::augment::AugmentationVerdict,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        chains: Vec<toric_systems::augment::Chain>,
    }
    outcome(
        v.holds,
        text,
        &Report {
            verdict: &v,
            chains,
        },
    )
}

fn assertions_text(title: &str, assertions: &[Assertion]) -> String {
    let mut text = format!("{title}\n");
    for a in assertions {
        text.push_str(&format!(
            "  {} {}: {}\n",
            if a.passed { "ok  " } else { "FAIL" },
            a.name,
            a.detail
        ));
    }
    text
}

#[derive(Serialize)]
struct TablesReport {
    yes: Vec<YesRowReport>,
    hirzebruch_family: Option<Assertion>,
    partition: Option<Assertion>,
    no: Vec<NonexistenceReport>,
    passed: bool,
}

fn tables(ctx: &Env, degree: Option<i64>) -> Result<Outcome> {
    let wanted = |d: i64| degree.is_none_or(|x| x == d);
    let yes: Vec<YesRowReport> = verify_table_yes(&ctx.registry)?
        .into_iter()
        .filter(|r| wanted(r.degree))
        .collect();
    let family = wanted(8)
        .then(|| verify_hirzebruch_family(&ctx.registry, -4..=4))
        .transpose()?;
    let partition = degree
        .is_none()
        .then(|| verify_table_partition(&ctx.registry));
    let rows: Vec<(&str, i64)> = TABLE_NO
        .iter()
        .map(|r| Ok((r.label, ctx.registry.get(r.label)?.degree())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, d)| wanted(*d))
        .collect();
    let deadline = ctx.deadline;
    let enumerate_degree_three = deadline.is_some();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.jobs)
        .build()?;
    let no: Vec<NonexistenceReport> = pool.install(|| {
        rows.par_iter()
            .map(|(label, d)| {
                let options = NonexistenceOptions {
                    enumerate: *d >= 4 || enumerate_degree_three,
                    deadline,
                    resume: None,
                };
                verify_nonexistence(&ctx.registry, label, options)
            })
            .collect::<toric_systems::Result<Vec<_>>>()
    })?;
    let passed = yes.iter().all(|r| r.passed)
        && family.as_ref().is_none_or(|f| f.passed)
        && partition.as_ref().is_none_or(|p| p.passed)
        && no.iter().all(|r| r.passed);
    let mut text = String::new();
    for r in &yes {
        let types = join(
            r.checks
                .iter()
                .map(|c| format!("{}{}", c.surface, if c.passed() { "" } else { " (FAIL)" })),
        );
        text.push_str(&format!(
            "{} degree {} ({}): {}\n",
            if r.passed { "ok  " } else { "FAIL" },
            r.degree,
            r.system.join(", "),
            types
        ));
    }
    for a in family.iter().chain(partition.iter()) {
        text.push_str(&format!(
            "{} {}: {}\n",
            if a.passed { "ok  " } else { "FAIL" },
            a.name,
            a.detail
        ));
    }
    for r in &no {
        let how = if r.enumeration_complete {
            format!("{} patterns enumerated, {} hits", r.patterns.len(), r.hits)
        } else if r.enumerated {
            format!(
                "enumeration stopped at {:?}, {} hits so far",
                r.checkpoint, r.hits
            )
        } else {
            "not enumerated".to_string()
        };
        let down = match (&r.expected_blow_down, r.blow_down_verified) {
            (Some(t), Some(true)) => format!(", contracts to {t}"),
            (Some(t), _) => format!(", no contraction to {t}"),
            (None, _) => String::new(),
        };
        text.push_str(&format!(
            "{} no {}: {how}{down}\n",
            if r.passed { "ok  " } else { "FAIL" },
            r.surface
        ));
    }
    let report = TablesReport {
        yes,
        hirzebruch_family: family,
        partition,
        no,
        passed,
    };
    outcome(passed, text, &report)
}

fn parse_resume(text: &str) -> Result<(usize, usize)> {
    let (p, b) = text
        .split_once(',')
        .context("checkpoint must be PATTERN,BRANCH")?;
    Ok((p.trim().parse()?, b.trim().parse()?))
}

fn search(
    ctx: &Env,
    label: &str,
    patterns: &[String],
    floor: i64,
    resume: Option<&str>,
) -> Result<Outcome> {
    let s: Arc<Surface> = ctx.registry.get(label)?;
    let n = (12 - s.degree()) as usize;
    let patterns: Vec<Vec<i64>> = if patterns.is_empty() {
        strong_patterns(n, floor)
    } else {
        patterns
            .iter()
            .map(|p| parse_sequence(p))
            .collect::<toric_systems::Result<_>>()?
    };
    if let Some(p) = patterns.iter().find(|p| p.len() != n) {
        bail!(
            "pattern {p:?} has length {}, expected {n} on {}",
            p.len(),
            s.display_name()
        );
    }
    let resume = resume.map(parse_resume).transpose()?;
    let report = if ctx.jobs == 1 {
        search_counterexamples(&s, &patterns, ctx.deadline, resume)?
    } else {
        // One search per pattern; merged in pattern order.
        let start = resume.map_or(0, |r| r.0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.jobs)
            .build()?;
        let parts: Vec<SearchReport> = pool.install(|| {
            patterns
                .par_iter()
                .enumerate()
                .skip(start)
                .map(|(i, p)| {
                    let r = if Some(i) == resume.map(|r| r.0) {
                        Some((0, resume.unwrap().1))
                    } else {
                        None
                    };
                    search_counterexamples(&s, std::slice::from_ref(p), ctx.deadline, r)
                })
                .collect::<toric_systems::Result<_>>()
        })?;
        let checkpoint = parts
            .iter()
            .enumerate()
            .find_map(|(i, r)| r.checkpoint.map(|(_, b)| (start + i, b)));
        SearchReport {
            surface: s.display_name(),
            patterns: patterns.len(),
            strong: parts.iter().map(|r| r.strong).sum(),
            hits: parts.into_iter().flat_map(|r| r.hits).collect(),
            complete: checkpoint.is_none(),
            checkpoint,
        }
    };
    let mut text = format!(
        "{}: {} patterns, {} strong exceptional systems, {} not weak augmentations\n",
        report.surface,
        report.patterns,
        report.strong,
        report.hits.len()
    );
    for h in &report.hits {
        text.push_str(&format!("  {:?}: ({})\n", h.pattern, h.system.join(", ")));
    }
    if let Some((p, b)) = report.checkpoint {
        text.push_str(&format!("budget exhausted; resume with --resume {p},{b}\n"));
    }
    outcome(report.complete, text, &report)
}
