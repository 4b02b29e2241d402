//! Run artifacts in the cache directory and the reports rendered from them.
//!
//! A run is stored as `runs/<id>.json`. Reports are pure functions of the
//! stored run: no timestamps, no hash-map iteration order, no timings.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use schurkit_core::iso::CiStatus;
use schurkit_core::sring::SRing;
use schurkit_core::Group;

use crate::census::CensusSummary;
use crate::error::{CensusError, Result};
use crate::lemmas::LemmaReport;
use crate::sample::SampleTable;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "SCHURKIT_CACHE";
const DEFAULT_CACHE: &str = ".schurkit";

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE))
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub group: Group,
    pub mode: crate::enumerate::Mode,
    pub rings: Vec<SRing>,
}

/// Everything a command can leave behind for `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Run {
    Census(CensusSummary),
    Sample(SampleTable),
    Enumeration(Enumeration),
    Lemma(LemmaReport),
}

fn check_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !id.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CensusError::BadInput(format!(
            "run id {id:?} must be alphanumeric with - _ ."
        )))
    }
}

fn run_path(cache: &Path, id: &str) -> PathBuf {
    cache.join("runs").join(format!("{id}.json"))
}

pub fn save_run(cache: &Path, id: &str, run: &Run) -> Result<PathBuf> {
    check_id(id)?;
    let path = run_path(cache, id);
    let mut bytes = serde_json::to_vec_pretty(run)?;
    bytes.push(b'\n');
    write_atomic(&path, &bytes)?;
    Ok(path)
}

pub fn load_run(cache: &Path, id: &str) -> Result<Run> {
    check_id(id)?;
    let path = run_path(cache, id);
    if !path.exists() {
        return Err(CensusError::MissingRun(id.to_string()));
    }
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

/// The three report files of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub csv: String,
    pub json: String,
    pub markdown: String,
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CensusError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn set_text(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(" "))
}

fn status_name(s: CiStatus) -> &'static str {
    match s {
        CiStatus::Ci => "ci",
        CiStatus::NonCi => "non-ci",
        CiStatus::Undecided => "undecided",
    }
}

pub fn render_report(run: &Run) -> Result<Report> {
    let mut json = serde_json::to_string_pretty(run)?;
    json.push('\n');
    let mut md = String::new();
    let csv = match run {
        Run::Census(c) => {
            let g = Group::from_spec(&c.group)?;
            writeln!(md, "# Subset census of {g}\n").ok();
            writeln!(md, "- complete: {}", c.complete).ok();
            writeln!(md, "- orbit reduction: {}", c.reduced).ok();
            writeln!(md, "- subsets: {}", c.subsets).ok();
            writeln!(md, "- digraphs canonized: {}", c.canonized).ok();
            writeln!(md, "- Aut(G)-orbits: {}", c.orbits).ok();
            writeln!(md, "- isomorphism classes: {}", c.iso_classes).ok();
            writeln!(md, "- classes with several orbits: {}", c.non_ci_classes).ok();
            if !c.non_ci_pairs.is_empty() {
                writeln!(
                    md,
                    "\n## Non-CI pairs\n\n| S | T | verified |\n|---|---|---|"
                )
                .ok();
                for p in &c.non_ci_pairs {
                    writeln!(md, "| {:#x} | {:#x} | {} |", p.s, p.t, p.verified).ok();
                }
            }
            csv_table(
                &[
                    "orbit_rep_bitmask",
                    "orbit_size",
                    "canonical_hash",
                    "iso_class_id",
                    "ci_flag",
                ],
                c.records
                    .iter()
                    .map(|r| {
                        vec![
                            format!("{:#x}", r.subset),
                            r.orbit_size.to_string(),
                            r.canonical_hash.clone(),
                            r.iso_class_id.to_string(),
                            (r.ci as u8).to_string(),
                        ]
                    })
                    .collect(),
            )?
        }
        Run::Sample(t) => {
            let g = Group::from_spec(&t.group)?;
            writeln!(md, "# CI sample over {g}\n").ok();
            writeln!(md, "- seed: {}", t.seed).ok();
            writeln!(md, "- requested: {}", t.count).ok();
            writeln!(md, "- node budget: {}", t.budget_nodes).ok();
            writeln!(md, "- ci: {}", t.ci).ok();
            writeln!(md, "- non-ci: {}", t.non_ci).ok();
            writeln!(md, "- undecided: {}", t.undecided).ok();
            if let Some(w) = &t.witness {
                writeln!(
                    md,
                    "\nFirst non-CI sample #{}: S = {}",
                    w.index,
                    set_text(&w.subset)
                )
                .ok();
            }
            csv_table(
                &["index", "subset", "status"],
                t.rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.index.to_string(),
                            set_text(&r.subset),
                            status_name(r.status).into(),
                        ]
                    })
                    .collect(),
            )?
        }
        Run::Enumeration(e) => {
            writeln!(md, "# S-rings over {} (mode {})\n", e.group, e.mode).ok();
            writeln!(md, "- count: {}", e.rings.len()).ok();
            csv_table(
                &["index", "rank", "classes"],
                e.rings
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let classes: Vec<String> =
                            a.classes().iter().map(|c| set_text(&c.to_vec())).collect();
                        vec![i.to_string(), a.rank().to_string(), classes.join(" ")]
                    })
                    .collect(),
            )?
        }
        Run::Lemma(r) => {
            writeln!(md, "# Lemma {} over {}\n", r.lemma, r.scope).ok();
            writeln!(md, "- instances checked: {}", r.instances_checked).ok();
            writeln!(md, "- skipped (hypotheses fail): {}", r.skipped).ok();
            writeln!(md, "- failures: {}", r.failures.len()).ok();
            for n in &r.notes {
                writeln!(md, "- note: {n}").ok();
            }
            if !r.family.is_empty() {
                let excluded: Vec<_> = r.family.iter().filter(|f| !f.minimal).collect();
                writeln!(md, "\n## Family\n").ok();
                writeln!(md, "- members: {}", r.family.len()).ok();
                writeln!(md, "- minimal: {}", r.family.len() - excluded.len()).ok();
                writeln!(
                    md,
                    "- excluded by the minimality filter: {}",
                    excluded.len()
                )
                .ok();
                writeln!(
                    md,
                    "\n| group | index | rank | excluded by |\n|---|---|---|---|"
                )
                .ok();
                for f in excluded {
                    let by = f
                        .excluded_by
                        .map_or("undecided".to_string(), |j| j.to_string());
                    writeln!(md, "| {} | {} | {} | {} |", f.group, f.index, f.rank, by).ok();
                }
                csv_table(
                    &[
                        "group",
                        "index",
                        "rank",
                        "aut_order",
                        "minimal",
                        "excluded_by",
                        "statements",
                    ],
                    r.family
                        .iter()
                        .map(|f| {
                            let statements = f.classification.as_ref().map_or(String::new(), |c| {
                                let s: Vec<String> =
                                    c.statements.iter().map(|x| x.to_string()).collect();
                                s.join(" ")
                            });
                            vec![
                                f.group.clone(),
                                f.index.to_string(),
                                f.rank.to_string(),
                                f.aut_order.clone(),
                                (f.minimal as u8).to_string(),
                                f.excluded_by.map_or(String::new(), |j| j.to_string()),
                                statements,
                            ]
                        })
                        .collect(),
                )?
            } else {
                csv_table(
                    &["group", "instance", "detail"],
                    r.failures
                        .iter()
                        .map(|f| vec![f.group.clone(), f.instance.clone(), f.detail.clone()])
                        .collect(),
                )?
            }
        }
    };
    Ok(Report {
        csv,
        json,
        markdown: md,
    })
}

/// Writes `<id>.csv`, `<id>.json` and `<id>.md` into `out`.
pub fn write_report(out: &Path, id: &str, report: &Report) -> Result<Vec<PathBuf>> {
    check_id(id)?;
    let files = [
        (format!("{id}.csv"), &report.csv),
        (format!("{id}.json"), &report.json),
        (format!("{id}.md"), &report.markdown),
    ];
    let mut paths = Vec::new();
    for (name, body) in files {
        let p = out.join(name);
        write_atomic(&p, body.as_bytes())?;
        paths.push(p);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{subset_census, CensusOptions};

    #[test]
    fn runs_round_trip_and_reports_are_stable() {
        let dir = tempfile::tempdir().unwrap();
        let g = Group::new(&[8]).unwrap();
        let run = Run::Census(subset_census(&g, &CensusOptions::default()).unwrap());
        save_run(dir.path(), "c8", &run).unwrap();
        let back = load_run(dir.path(), "c8").unwrap();
        assert_eq!(back, run);
        let a = render_report(&run).unwrap();
        assert_eq!(a, render_report(&back).unwrap());
        assert!(a
            .csv
            .starts_with("orbit_rep_bitmask,orbit_size,canonical_hash,iso_class_id,ci_flag\n"));
        let Run::Census(c) = &run else { unreachable!() };
        assert_eq!(a.csv.lines().count(), c.orbits + 1);
        assert!(a.csv.lines().any(|l| l.ends_with(",0")));
    }

    #[test]
    fn empty_runs_still_have_headers() {
        let e = Run::Enumeration(Enumeration {
            group: Group::new(&[6]).unwrap(),
            mode: crate::enumerate::Mode::PSrings,
            rings: Vec::new(),
        });
        assert_eq!(render_report(&e).unwrap().csv, "index,rank,classes\n");
    }

    #[test]
    fn missing_and_malformed_ids() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_run(dir.path(), "nothing"),
            Err(CensusError::MissingRun(_))
        ));
        assert!(load_run(dir.path(), "../etc").unwrap_err().is_bad_input());
        assert!(load_run(dir.path(), "").is_err());
    }

    #[test]
    fn atomic_writes_replace_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
