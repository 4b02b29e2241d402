//! Exhaustive census of Cayley digraphs `Cay(G, S)` over all subsets `S`.
//!
//! Subsets are reduced to `Aut(G)`-orbit representatives, each
//! representative is canonized, and representatives are grouped by
//! canonical form. An isomorphism class holding two or more orbits is a
//! pair of isomorphic Cayley digraphs that no automorphism of `G` relates.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use schurkit_core::group::{shared_automorphism_group, AutomorphismGroup, GroupSpec};
use schurkit_core::iso::{canonize, cayley_digraph};
use schurkit_core::{ElemSet, Error, Group};

use crate::error::{CensusError, Result};
use crate::store::write_atomic;

/// Largest group order a census accepts; subsets are 64-bit masks.
pub const CENSUS_MAX_ORDER: usize = 16;

#[derive(Debug, Clone)]
pub struct CensusOptions {
    /// Canonize orbit representatives only. When off, every subset is
    /// canonized and the classes are cross-checked against the orbits.
    pub reduce: bool,
    /// Progress file, reloaded on the next run with the same group and mode.
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: usize,
    /// Stop after canonizing this many new graphs (simulates an interruption).
    pub stop_after: Option<usize>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            reduce: true,
            checkpoint: None,
            checkpoint_every: 512,
            stop_after: None,
        }
    }
}

/// One `Aut(G)`-orbit of subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    /// Smallest bitmask in the orbit.
    pub subset: u64,
    pub orbit_size: u64,
    pub canonical_hash: String,
    pub aut_orbit_id: usize,
    pub iso_class_id: usize,
    pub ci: bool,
}

/// Isomorphic `Cay(G, S)` and `Cay(G, T)` with `S`, `T` in different orbits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonCiPair {
    pub s: u64,
    pub t: u64,
    /// Vertex map `Cay(G, S) -> Cay(G, T)`.
    pub iso: Vec<usize>,
    /// Re-checked by [`verify_non_ci_pair`].
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub group: GroupSpec,
    pub reduced: bool,
    /// False when the run stopped early; the checkpoint holds the progress.
    pub complete: bool,
    pub subsets: u64,
    pub canonized: u64,
    pub orbits: usize,
    pub iso_classes: usize,
    pub non_ci_classes: usize,
    pub records: Vec<CensusRecord>,
    pub non_ci_pairs: Vec<NonCiPair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Checkpoint {
    group: GroupSpec,
    reduced: bool,
    done: Vec<FormEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FormEntry {
    subset: u64,
    hash: u64,
    /// Canonical adjacency matrix, one bit per arc, hex encoded.
    matrix: String,
}

/// Fast bitmask images under a list of automorphisms, one lookup table per byte.
struct MaskAction {
    tables: Vec<Vec<[u64; 256]>>,
}

impl MaskAction {
    fn new(g: &Group, aut: &AutomorphismGroup) -> MaskAction {
        let bytes = g.order().div_ceil(8);
        let tables = aut
            .elements
            .iter()
            .map(|phi| {
                (0..bytes)
                    .map(|b| {
                        let mut t = [0u64; 256];
                        for (v, slot) in t.iter_mut().enumerate() {
                            for bit in 0..8 {
                                let x = 8 * b + bit;
                                if v >> bit & 1 == 1 && x < g.order() {
                                    *slot |= 1 << phi.apply(x);
                                }
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        MaskAction { tables }
    }

    fn apply(&self, i: usize, s: u64) -> u64 {
        self.tables[i]
            .iter()
            .enumerate()
            .fold(0, |acc, (b, t)| acc | t[(s >> (8 * b)) as usize & 0xff])
    }
}

/// `(representative, size)` for every orbit, and the orbit index of each subset.
fn subset_orbits(g: &Group, aut: &AutomorphismGroup) -> (Vec<(u64, u64)>, Vec<u32>) {
    let action = MaskAction::new(g, aut);
    let total = 1usize << g.order();
    let mut orbit_of = vec![u32::MAX; total];
    let mut reps = Vec::new();
    for s in 0..total {
        if orbit_of[s] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        let mut size = 0;
        for i in 0..aut.order() {
            let t = action.apply(i, s as u64) as usize;
            if orbit_of[t] == u32::MAX {
                orbit_of[t] = id;
                size += 1;
            }
        }
        reps.push((s as u64, size));
    }
    (reps, orbit_of)
}

fn form_of(g: &Group, s: u64) -> (u64, Vec<u8>) {
    let form = canonize(&cayley_digraph(g, ElemSet::from_bits(s as u128)));
    let mut packed = vec![0u8; form.matrix.len().div_ceil(8)];
    for (k, &c) in form.matrix.iter().enumerate() {
        if c != 0 {
            packed[k / 8] |= 1 << (k % 8);
        }
    }
    (form.hash, packed)
}

fn to_hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(2 * bytes.len());
    for b in bytes {
        write!(out, "{b:02x}").expect("writing to a String");
    }
    out
}

fn from_hex(text: &str) -> Result<Vec<u8>> {
    let bad = || CensusError::BadInput("corrupt checkpoint matrix".into());
    if text.len() % 2 != 0 {
        return Err(bad());
    }
    (0..text.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&text[i..i + 2], 16).map_err(|_| bad()))
        .collect()
}

fn load_checkpoint(opts: &CensusOptions, g: &Group) -> Result<HashMap<u64, (u64, Vec<u8>)>> {
    let mut done = HashMap::new();
    let Some(path) = &opts.checkpoint else {
        return Ok(done);
    };
    if !path.exists() {
        return Ok(done);
    }
    let cp: Checkpoint = serde_json::from_slice(&std::fs::read(path)?)?;
    if cp.group != g.spec() || cp.reduced != opts.reduce {
        return Err(CensusError::BadInput(format!(
            "checkpoint {} belongs to a different census",
            path.display()
        )));
    }
    for e in cp.done {
        done.insert(e.subset, (e.hash, from_hex(&e.matrix)?));
    }
    Ok(done)
}

fn save_checkpoint(
    opts: &CensusOptions,
    g: &Group,
    done: &HashMap<u64, (u64, Vec<u8>)>,
) -> Result<()> {
    let Some(path) = &opts.checkpoint else {
        return Ok(());
    };
    let mut entries: Vec<FormEntry> = done
        .iter()
        .map(|(&subset, (hash, m))| FormEntry {
            subset,
            hash: *hash,
            matrix: to_hex(m),
        })
        .collect();
    entries.sort_by_key(|e| e.subset);
    let cp = Checkpoint {
        group: g.spec(),
        reduced: opts.reduce,
        done: entries,
    };
    write_atomic(path, &serde_json::to_vec(&cp)?)
}

/// Runs the census. Fails for `|G| > 16`.
pub fn subset_census(g: &Group, opts: &CensusOptions) -> Result<CensusSummary> {
    let n = g.order();
    if n > CENSUS_MAX_ORDER {
        return Err(Error::BudgetExceeded(format!(
            "subset census needs |G| <= {CENSUS_MAX_ORDER}, got {n}"
        ))
        .into());
    }
    let aut = shared_automorphism_group(g)?;
    let (reps, orbit_of) = subset_orbits(g, &aut);
    let work: Vec<u64> = if opts.reduce {
        reps.iter().map(|&(s, _)| s).collect()
    } else {
        (0..1u64 << n).collect()
    };

    let mut done = load_checkpoint(opts, g)?;
    let todo: Vec<u64> = work
        .iter()
        .copied()
        .filter(|s| !done.contains_key(s))
        .collect();
    let limit = opts.stop_after.unwrap_or(usize::MAX);
    let mut fresh = 0usize;
    for chunk in todo.chunks(opts.checkpoint_every.max(1)) {
        if fresh >= limit {
            break;
        }
        let chunk = &chunk[..chunk.len().min(limit - fresh)];
        let forms: Vec<(u64, (u64, Vec<u8>))> =
            chunk.par_iter().map(|&s| (s, form_of(g, s))).collect();
        fresh += forms.len();
        done.extend(forms);
        save_checkpoint(opts, g, &done)?;
    }
    let subsets = 1u64 << n;
    if work.iter().any(|s| !done.contains_key(s)) {
        return Ok(CensusSummary {
            group: g.spec(),
            reduced: opts.reduce,
            complete: false,
            subsets,
            canonized: done.len() as u64,
            orbits: reps.len(),
            iso_classes: 0,
            non_ci_classes: 0,
            records: Vec::new(),
            non_ci_pairs: Vec::new(),
        });
    }

    // class ids in order of the smallest subset, which is always an orbit representative
    let mut class_ids: HashMap<&(u64, Vec<u8>), usize> = HashMap::new();
    let mut orbit_class = vec![usize::MAX; reps.len()];
    for s in &work {
        let key = &done[s];
        let next = class_ids.len();
        let id = *class_ids.entry(key).or_insert(next);
        let orbit = orbit_of[*s as usize] as usize;
        if orbit_class[orbit] == usize::MAX {
            orbit_class[orbit] = id;
        } else if orbit_class[orbit] != id {
            return Err(
                Error::Internal(format!("orbit of {s:#x} spans two isomorphism classes")).into(),
            );
        }
    }
    let classes = class_ids.len();
    let mut orbits_in_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (o, &c) in orbit_class.iter().enumerate() {
        orbits_in_class[c].push(o);
    }

    let records: Vec<CensusRecord> = reps
        .iter()
        .enumerate()
        .map(|(o, &(s, size))| CensusRecord {
            subset: s,
            orbit_size: size,
            canonical_hash: format!("{:016x}", done[&s].0),
            aut_orbit_id: o,
            iso_class_id: orbit_class[o],
            ci: orbits_in_class[orbit_class[o]].len() == 1,
        })
        .collect();

    let reps = &reps;
    let pairs: Vec<(u64, u64)> = orbits_in_class
        .iter()
        .filter(|os| os.len() > 1)
        .flat_map(|os| os[1..].iter().map(move |&o| (reps[os[0]].0, reps[o].0)))
        .collect();
    let non_ci_pairs = pairs
        .par_iter()
        .map(|&(s, t)| {
            let fs = canonize(&cayley_digraph(g, ElemSet::from_bits(s as u128)));
            let ft = canonize(&cayley_digraph(g, ElemSet::from_bits(t as u128)));
            let iso = fs
                .isomorphism_to(&ft)
                .ok_or_else(|| Error::Internal("grouped forms differ".into()))?
                .images();
            let verified = verify_non_ci_pair(g, &aut, s, t, &iso);
            Ok(NonCiPair {
                s,
                t,
                iso,
                verified,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CensusSummary {
        group: g.spec(),
        reduced: opts.reduce,
        complete: true,
        subsets,
        canonized: work.len() as u64,
        orbits: reps.len(),
        iso_classes: classes,
        non_ci_classes: orbits_in_class.iter().filter(|os| os.len() > 1).count(),
        records,
        non_ci_pairs,
    })
}

/// Independent check of a witness: `iso` maps the arcs of `Cay(G, S)` onto
/// those of `Cay(G, T)` elementwise, and no automorphism of `G` maps `S` to `T`.
pub fn verify_non_ci_pair(
    g: &Group,
    aut: &AutomorphismGroup,
    s: u64,
    t: u64,
    iso: &[usize],
) -> bool {
    let n = g.order();
    if iso.len() != n
        || iso.iter().collect::<HashSet<_>>().len() != n
        || iso.iter().any(|&v| v >= n)
    {
        return false;
    }
    let (s, t) = (ElemSet::from_bits(s as u128), ElemSet::from_bits(t as u128));
    let arcs = (0..n)
        .all(|x| (0..n).all(|y| s.contains(g.sub(y, x)) == t.contains(g.sub(iso[y], iso[x]))));
    arcs && aut.elements.iter().all(|phi| phi.apply_set(s) != t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use schurkit_core::iso::{ci_subset, CiMethod, CiStatus};
    use schurkit_core::perm::SearchBudget;

    fn grp(f: &[usize]) -> Group {
        Group::new(f).unwrap()
    }

    #[test]
    fn orbits_partition_all_subsets() {
        for f in [&[6usize][..], &[8], &[2, 4], &[3, 3]] {
            let g = grp(f);
            let aut = shared_automorphism_group(&g).unwrap();
            let (reps, orbit_of) = subset_orbits(&g, &aut);
            assert_eq!(reps.iter().map(|r| r.1).sum::<u64>(), 1 << g.order());
            for (s, &o) in orbit_of.iter().enumerate() {
                let set = ElemSet::from_bits(s as u128);
                let rep = ElemSet::from_bits(reps[o as usize].0 as u128);
                assert!(aut.find_mapping(rep, set).is_some());
                assert!(reps[o as usize].0 <= s as u64);
            }
        }
    }

    #[test]
    fn small_censuses() {
        let c6 = subset_census(&grp(&[6]), &CensusOptions::default()).unwrap();
        assert!(c6.complete);
        assert_eq!(c6.non_ci_classes, 0);
        assert!(c6.records.iter().all(|r| r.ci));

        let c8 = subset_census(&grp(&[8]), &CensusOptions::default()).unwrap();
        assert!(!c8.non_ci_pairs.is_empty());
        assert!(c8.non_ci_pairs.iter().all(|p| p.verified));
    }

    #[test]
    fn census_agrees_with_ci_subset() {
        let g = grp(&[8]);
        let c8 = subset_census(&g, &CensusOptions::default()).unwrap();
        for r in &c8.records {
            let v = ci_subset(
                &g,
                ElemSet::from_bits(r.subset as u128),
                CiMethod::OrbitCensus,
                SearchBudget::default(),
            )
            .unwrap();
            assert_eq!(v.status == CiStatus::Ci, r.ci, "{:#x}", r.subset);
        }
    }

    #[test]
    fn reduction_does_not_change_the_classes() {
        let g = grp(&[8]);
        let reduced = subset_census(&g, &CensusOptions::default()).unwrap();
        let full = subset_census(
            &g,
            &CensusOptions {
                reduce: false,
                ..CensusOptions::default()
            },
        )
        .unwrap();
        assert_eq!(full.canonized, 256);
        assert_eq!(reduced.records, full.records);
        assert_eq!(reduced.non_ci_pairs, full.non_ci_pairs);
    }

    #[test]
    fn checkpoint_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let g = grp(&[2, 4]);
        let opts = CensusOptions {
            checkpoint: Some(dir.path().join("cp.json")),
            checkpoint_every: 7,
            stop_after: Some(20),
            ..CensusOptions::default()
        };
        let partial = subset_census(&g, &opts).unwrap();
        assert!(!partial.complete);
        assert_eq!(partial.canonized, 20);
        let resumed = subset_census(
            &g,
            &CensusOptions {
                stop_after: None,
                ..opts.clone()
            },
        )
        .unwrap();
        let fresh = subset_census(&g, &CensusOptions::default()).unwrap();
        assert!(resumed.complete);
        assert_eq!(resumed, fresh);

        let other = CensusOptions {
            reduce: false,
            ..opts
        };
        assert!(subset_census(&g, &other).is_err());
    }

    #[test]
    fn forged_witnesses_are_rejected() {
        let g = grp(&[8]);
        let aut = shared_automorphism_group(&g).unwrap();
        let id: Vec<usize> = (0..8).collect();
        // {1} and {3} are related by the automorphism x -> 3x
        let triple: Vec<usize> = (0..8).map(|x| 3 * x % 8).collect();
        assert!(!verify_non_ci_pair(&g, &aut, 0b10, 0b1000, &triple));
        assert!(!verify_non_ci_pair(&g, &aut, 0b10, 0b100, &id));
        assert!(!verify_non_ci_pair(&g, &aut, 0b10, 0b100, &[0; 8]));
    }

    #[test]
    fn oversized_groups_are_refused() {
        let err = subset_census(&grp(&[17]), &CensusOptions::default()).unwrap_err();
        assert!(err.is_budget());
    }
}
