use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use schur_kit::census::{subset_census, CensusOptions};
use schur_kit::enumerate::{enumerate_srings, Mode};
use schur_kit::lemmas::{verify_lemma, Lemma, Scope};
use schur_kit::sample::ci_sample;
use schur_kit::store::{
    cache_dir, load_run, render_report, save_run, write_report, Enumeration, Run,
};
use schur_kit::{parse_group, CensusError};
use schurkit_core::build::{circ_classify, classify_main2, detect_s_wreath, detect_tensor};
use schurkit_core::group::{shared_automorphism_group, subgroup_lattice_bounded, MAX_ORDER};
use schurkit_core::perm::SearchBudget;
use schurkit_core::sring::SRing;
use schurkit_core::Group;

const EXIT_FAILURE: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_BAD_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "schur-kit",
    version,
    about = "Schur rings, Cayley digraph censuses and CI testing"
)]
struct Cli {
    /// Cache directory for runs; overrides SCHURKIT_CACHE.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print invariants of a group given as `C4xC3xC3`, `4,3,3` or a JSON spec file.
    Group { spec: String },
    /// Group all Cayley digraphs over G by isomorphism and list non-CI pairs.
    SubsetCensus {
        #[arg(long)]
        group: String,
        /// Canonize every subset instead of orbit representatives.
        #[arg(long)]
        no_reduction: bool,
        #[arg(long, default_value_t = 512)]
        checkpoint_every: usize,
        #[arg(long)]
        run_id: Option<String>,
    },
    /// CI verdicts for seeded random subsets.
    CiSample {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = SearchBudget::default().nodes)]
        budget: u64,
        #[arg(long)]
        run_id: Option<String>,
    },
    /// List S-rings over G: all, cyclotomic or p-srings.
    EnumerateSrings {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "all")]
        mode: String,
        #[arg(long)]
        run_id: Option<String>,
    },
    /// Check a lemma's conclusion on every instance of a scope such as `cyclotomic:C4;C8`.
    VerifyLemma {
        #[arg(long)]
        name: String,
        #[arg(long)]
        scope: String,
        #[arg(long, default_value_t = SearchBudget::default().nodes)]
        budget: u64,
        #[arg(long)]
        run_id: Option<String>,
    },
    /// Decompose an S-ring read from a JSON file `{"group":{"factors":[..]},"classes":[[..],..]}`.
    Decompose {
        #[arg(long)]
        input: PathBuf,
    },
    /// Render CSV, JSON and markdown files for a stored run.
    Report {
        #[arg(long)]
        run: String,
        /// Output directory; defaults to `<cache>/reports`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<CensusError>() {
                Some(c) if c.is_bad_input() => EXIT_BAD_INPUT,
                Some(c) if c.is_budget() => EXIT_UNDECIDED,
                _ => EXIT_FAILURE,
            };
            ExitCode::from(code)
        }
    }
}

fn group_arg(text: &str) -> Result<Group> {
    let path = std::path::Path::new(text);
    if text.ends_with(".json") && path.exists() {
        let spec = serde_json::from_slice(&std::fs::read(path)?).map_err(CensusError::from)?;
        return Ok(Group::from_spec(&spec).map_err(CensusError::from)?);
    }
    Ok(parse_group(text)?)
}

fn store(cache: &std::path::Path, id: &str, run: &Run) -> Result<()> {
    let path = save_run(cache, id, run)?;
    eprintln!("run {id} saved to {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let cache = cli.cache.unwrap_or_else(cache_dir);
    match cli.command {
        Command::Group { spec } => {
            let g = group_arg(&spec)?;
            let aut = shared_automorphism_group(&g).map_err(CensusError::from)?;
            let subgroups = subgroup_lattice_bounded(&g, MAX_ORDER).map_err(CensusError::from)?;
            let info = json!({
                "group": g.to_string(),
                "factors": g.factors(),
                "order": g.order(),
                "exponent": g.exponent(),
                "primary_invariants": g.primary_invariants(),
                "class_ec": g.in_class_ec(),
                "automorphisms": aut.order(),
                "subgroups": subgroups.len(),
            });
            println!("{}", serde_json::to_string_pretty(&info)?);
            Ok(0)
        }
        Command::SubsetCensus {
            group,
            no_reduction,
            checkpoint_every,
            run_id,
        } => {
            let g = group_arg(&group)?;
            let id = run_id.unwrap_or_else(|| {
                format!("census-{g}{}", if no_reduction { "-full" } else { "" })
            });
            let opts = CensusOptions {
                reduce: !no_reduction,
                checkpoint: Some(cache.join("checkpoints").join(format!("{id}.json"))),
                checkpoint_every,
                stop_after: None,
            };
            let summary = subset_census(&g, &opts)?;
            println!(
                "{g}: {} orbits, {} isomorphism classes, {} non-CI pairs",
                summary.orbits,
                summary.iso_classes,
                summary.non_ci_pairs.len()
            );
            let bad = summary.non_ci_pairs.iter().any(|p| !p.verified);
            store(&cache, &id, &Run::Census(summary))?;
            if let Some(cp) = &opts.checkpoint {
                let _ = std::fs::remove_file(cp);
            }
            Ok(if bad { EXIT_FAILURE } else { 0 })
        }
        Command::CiSample {
            group,
            count,
            seed,
            budget,
            run_id,
        } => {
            let g = group_arg(&group)?;
            let table = ci_sample(&g, count, seed, SearchBudget { nodes: budget })?;
            println!(
                "{g}: {} ci, {} non-ci, {} undecided of {} samples",
                table.ci,
                table.non_ci,
                table.undecided,
                table.rows.len()
            );
            if let Some(w) = &table.witness {
                println!("{}", serde_json::to_string_pretty(w)?);
            }
            let code = if table.non_ci > 0 {
                EXIT_FAILURE
            } else if table.undecided > 0 {
                EXIT_UNDECIDED
            } else {
                0
            };
            let id = run_id.unwrap_or_else(|| format!("sample-{g}-n{count}-s{seed}"));
            store(&cache, &id, &Run::Sample(table))?;
            Ok(code)
        }
        Command::EnumerateSrings {
            group,
            mode,
            run_id,
        } => {
            let g = group_arg(&group)?;
            let mode: Mode = mode.parse()?;
            let rings = enumerate_srings(&g, mode)?;
            println!("{g}: {} S-rings (mode {mode})", rings.len());
            let id = run_id.unwrap_or_else(|| format!("srings-{g}-{mode}"));
            store(
                &cache,
                &id,
                &Run::Enumeration(Enumeration {
                    group: g,
                    mode,
                    rings,
                }),
            )?;
            Ok(0)
        }
        Command::VerifyLemma {
            name,
            scope,
            budget,
            run_id,
        } => {
            let lemma: Lemma = name.parse()?;
            let scope: Scope = scope.parse()?;
            let report = verify_lemma(lemma, &scope, SearchBudget { nodes: budget })?;
            println!(
                "lemma {lemma}: {} instances, {} skipped, {} failures",
                report.instances_checked,
                report.skipped,
                report.failures.len()
            );
            eprintln!("runtime {:.2?}", report.runtime);
            for f in &report.failures {
                println!("FAIL {} {}: {}", f.group, f.instance, f.detail);
            }
            let code = if report.passed() { 0 } else { EXIT_FAILURE };
            let id = run_id.unwrap_or_else(|| format!("lemma-{lemma}-{}", scope_slug(&scope)));
            store(&cache, &id, &Run::Lemma(report))?;
            Ok(code)
        }
        Command::Decompose { input } => {
            let bytes =
                std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let a: SRing = serde_json::from_slice(&bytes).map_err(CensusError::from)?;
            let g = a.group();
            let out = if classify_main2(&a).is_ok() {
                serde_json::to_value(classify_main2(&a).map_err(CensusError::from)?)?
            } else {
                let circ = if g.is_cyclic() {
                    Some(circ_classify(&a).map_err(CensusError::from)?)
                } else {
                    None
                };
                json!({
                    "group": g.factors(),
                    "rank": a.rank(),
                    "tensor": detect_tensor(&a),
                    "wreath": detect_s_wreath(&a),
                    "circ": circ,
                })
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
        Command::Report { run, out } => {
            let stored = load_run(&cache, &run)?;
            let report = render_report(&stored)?;
            let out = out.unwrap_or_else(|| cache.join("reports"));
            for p in write_report(&out, &run, &report)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn scope_slug(scope: &Scope) -> String {
    scope
        .to_string()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect()
}
