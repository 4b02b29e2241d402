//! Enumeration of S-rings over a fixed group.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use schurkit_core::build::cyclotomic_sring;
use schurkit_core::group::{shared_automorphism_group, AutomorphismGroup, GroupAutomorphism};
use schurkit_core::sring::{validate_sring, SRing};
use schurkit_core::{ElemSet, Error, Group};

use crate::error::{CensusError, Result};

/// Largest order for the unrestricted partition search.
pub const ALL_MAX_ORDER: usize = 12;
/// Largest order for the p-S-ring search, whose block sizes prune much harder.
pub const P_SRINGS_MAX_ORDER: usize = 16;
/// Largest `|Aut(G)|` whose subgroup lattice is walked.
pub const CYCLOTOMIC_MAX_AUT: usize = 2048;
/// Cap on the number of subgroups of `Aut(G)`.
pub const SUBGROUP_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    All,
    Cyclotomic,
    PSrings,
}

impl FromStr for Mode {
    type Err = CensusError;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "all" => Ok(Mode::All),
            "cyclotomic" => Ok(Mode::Cyclotomic),
            "p-srings" => Ok(Mode::PSrings),
            _ => Err(CensusError::BadInput(format!(
                "unknown enumeration mode {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::All => "all",
            Mode::Cyclotomic => "cyclotomic",
            Mode::PSrings => "p-srings",
        })
    }
}

/// Every S-ring of the given kind over `G`, sorted by rank and then classes.
pub fn enumerate_srings(g: &Group, mode: Mode) -> Result<Vec<SRing>> {
    let mut out = match mode {
        Mode::All => {
            if g.order() > ALL_MAX_ORDER {
                return Err(budget(format!(
                    "mode all needs |G| <= {ALL_MAX_ORDER}, got {}",
                    g.order()
                )));
            }
            partition_search(g, None)
        }
        Mode::PSrings => {
            let p = prime_of_p_group(g)
                .ok_or_else(|| CensusError::BadInput(format!("{g} is not a p-group")))?;
            if g.order() > P_SRINGS_MAX_ORDER {
                return Err(budget(format!(
                    "mode p-srings needs |G| <= {P_SRINGS_MAX_ORDER}, got {}",
                    g.order()
                )));
            }
            partition_search(g, Some(p))
        }
        Mode::Cyclotomic => cyclotomic_census(g)?.into_iter().map(|e| e.ring).collect(),
    };
    sort_rings(&mut out);
    Ok(out)
}

fn budget(msg: String) -> CensusError {
    Error::BudgetExceeded(msg).into()
}

fn sort_rings(rings: &mut [SRing]) {
    rings.sort_by(|a, b| (a.rank(), a.classes()).cmp(&(b.rank(), b.classes())));
}

/// The prime `p` when `G` is a nontrivial `p`-group.
pub fn prime_of_p_group(g: &Group) -> Option<usize> {
    let n = g.order();
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(p)
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Backtracking over partitions of `G`: the block holding the smallest
/// unplaced element is chosen next, together with its inverse block. After
/// each step the structure-constant condition is checked on all finished
/// blocks, which prunes most branches early.
struct PartitionSearch<'a> {
    g: &'a Group,
    p: Option<usize>,
    blocks: Vec<ElemSet>,
    /// `counts[j][i]` for `i <= j`: multiplicities of `X_i X_j`.
    counts: Vec<Vec<Vec<u16>>>,
    out: Vec<SRing>,
}

fn partition_search(g: &Group, p: Option<usize>) -> Vec<SRing> {
    let mut s = PartitionSearch {
        g,
        p,
        blocks: Vec::new(),
        counts: Vec::new(),
        out: Vec::new(),
    };
    if s.push(ElemSet::singleton(0)) {
        s.descend(ElemSet::singleton(0));
    }
    s.out
}

impl PartitionSearch<'_> {
    fn product_counts(&self, x: ElemSet, y: ElemSet) -> Vec<u16> {
        let mut c = vec![0u16; self.g.order()];
        for a in x {
            for b in y {
                c[self.g.add(a, b)] += 1;
            }
        }
        c
    }

    fn constant_on(counts: &[u16], z: ElemSet) -> bool {
        let mut it = z.iter().map(|v| counts[v]);
        let first = it.next();
        it.all(|v| Some(v) == first)
    }

    /// Appends a block; returns false (with the block still pushed) when the
    /// partial partition is already inconsistent.
    fn push(&mut self, b: ElemSet) -> bool {
        self.blocks.push(b);
        let k = self.blocks.len() - 1;
        let row: Vec<Vec<u16>> = (0..=k)
            .map(|i| self.product_counts(self.blocks[i], b))
            .collect();
        self.counts.push(row);
        let new_pairs_ok = self.counts[k]
            .iter()
            .all(|c| self.blocks.iter().all(|&z| Self::constant_on(c, z)));
        new_pairs_ok
            && self.counts[..k]
                .iter()
                .all(|row| row.iter().all(|c| Self::constant_on(c, b)))
    }

    fn pop(&mut self) {
        self.blocks.pop();
        self.counts.pop();
    }

    fn descend(&mut self, placed: ElemSet) {
        let n = self.g.order();
        let Some(x) = (0..n).find(|&v| !placed.contains(v)) else {
            if let Ok(a) = validate_sring(self.g, self.blocks.clone()) {
                self.out.push(a);
            }
            return;
        };
        let rest: Vec<usize> = (x + 1..n).filter(|&v| !placed.contains(v)).collect();
        for mask in 0u32..(1 << rest.len()) {
            let mut b = ElemSet::singleton(x);
            for (i, &v) in rest.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    b.insert(v);
                }
            }
            if let Some(p) = self.p {
                if !is_power_of(b.len(), p) {
                    continue;
                }
            }
            let inv = self.g.inverse_set(b);
            let paired = inv != b;
            if paired && (!(inv & b).is_empty() || !(inv & placed).is_empty()) {
                continue;
            }
            let mut ok = self.push(b);
            if ok && paired {
                ok = self.push(inv);
                if !ok {
                    self.pop();
                }
            }
            if ok {
                self.descend(placed | b | inv);
                if paired {
                    self.pop();
                }
            }
            self.pop();
        }
    }
}

/// One cyclotomic S-ring with every subgroup of `Aut(G)` whose orbits give it.
#[derive(Debug, Clone)]
pub struct CyclotomicEntry {
    pub ring: SRing,
    /// Subgroups as sorted index lists into `Aut(G)`'s element list.
    pub subgroups: Vec<Vec<usize>>,
}

/// Every subgroup of `Aut(G)`, as sorted index lists, ordered by size and
/// then lexicographically.
pub fn aut_subgroups(aut: &AutomorphismGroup) -> Result<Vec<Vec<usize>>> {
    let n = aut.order();
    if n > CYCLOTOMIC_MAX_AUT {
        return Err(budget(format!(
            "|Aut(G)| = {n} exceeds {CYCLOTOMIC_MAX_AUT}"
        )));
    }
    let table = aut.multiplication_table();
    let close = |members: &[usize], extra: usize| -> Vec<usize> {
        let mut inside = vec![false; n];
        let mut out = members.to_vec();
        for &m in members {
            inside[m] = true;
        }
        let mut gens: Vec<usize> = members.to_vec();
        gens.push(extra);
        if !inside[extra] {
            inside[extra] = true;
            out.push(extra);
        }
        let mut i = 0;
        while i < out.len() {
            let a = out[i];
            for &s in &gens {
                let y = table[a][s] as usize;
                if !inside[y] {
                    inside[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    };

    let trivial = vec![0usize];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([trivial.clone()]);
    let mut queue = VecDeque::from([trivial]);
    while let Some(h) = queue.pop_front() {
        for x in 0..n {
            if h.binary_search(&x).is_ok() {
                continue;
            }
            let k = close(&h, x);
            if seen.insert(k.clone()) {
                if seen.len() > SUBGROUP_BUDGET {
                    return Err(budget(format!(
                        "Aut(G) has more than {SUBGROUP_BUDGET} subgroups"
                    )));
                }
                queue.push_back(k);
            }
        }
    }
    let mut all: Vec<Vec<usize>> = seen.into_iter().collect();
    all.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(all)
}

/// `cyc(K, G)` for every `K <= Aut(G)`, one entry per distinct partition.
pub fn cyclotomic_census(g: &Group) -> Result<Vec<CyclotomicEntry>> {
    let aut = shared_automorphism_group(g)?;
    let mut by_classes: HashMap<Vec<ElemSet>, usize> = HashMap::new();
    let mut entries: Vec<CyclotomicEntry> = Vec::new();
    for k in aut_subgroups(&aut)? {
        let elems: Vec<GroupAutomorphism> = k.iter().map(|&i| aut.elements[i].clone()).collect();
        let ring = cyclotomic_sring(g, &elems)?;
        match by_classes.get(ring.classes()) {
            Some(&i) => entries[i].subgroups.push(k),
            None => {
                by_classes.insert(ring.classes().to_vec(), entries.len());
                entries.push(CyclotomicEntry {
                    ring,
                    subgroups: vec![k],
                });
            }
        }
    }
    entries
        .sort_by(|a, b| (a.ring.rank(), a.ring.classes()).cmp(&(b.ring.rank(), b.ring.classes())));
    Ok(entries)
}
