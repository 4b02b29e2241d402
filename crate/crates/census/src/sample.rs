//! CI verdicts for seeded random subsets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use schurkit_core::group::GroupSpec;
use schurkit_core::iso::{ci_subset, CiMethod, CiStatus, NonCiWitness};
use schurkit_core::perm::SearchBudget;
use schurkit_core::{ElemSet, Group};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: usize,
    pub subset: Vec<usize>,
    pub status: CiStatus,
}

/// A non-CI verdict with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleWitness {
    pub index: usize,
    pub subset: Vec<usize>,
    pub witness: NonCiWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTable {
    pub group: GroupSpec,
    pub count: usize,
    pub seed: u64,
    pub budget_nodes: u64,
    pub ci: usize,
    pub non_ci: usize,
    pub undecided: usize,
    /// Rows up to and including the first non-CI sample, if any.
    pub rows: Vec<SampleRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SampleWitness>,
}

impl SampleTable {
    /// Share of rows with a definite verdict.
    pub fn decided_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 1.0;
        }
        (self.rows.len() - self.undecided) as f64 / self.rows.len() as f64
    }
}

/// `count` subsets drawn from `ChaCha8Rng::seed_from_u64(seed)`, each element
/// included with probability 1/2. The first subset is drawn first, so a
/// longer run extends a shorter one.
pub fn random_subsets(g: &Group, count: usize, seed: u64) -> Vec<ElemSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..g.order()).filter(|_| rng.gen_bool(0.5)).collect())
        .collect()
}

/// Runs the regular-subgroup CI test on each sample. Verdicts are computed
/// in parallel; the table stops at the first non-CI sample.
pub fn ci_sample(g: &Group, count: usize, seed: u64, budget: SearchBudget) -> Result<SampleTable> {
    let subsets = random_subsets(g, count, seed);
    let verdicts = subsets
        .par_iter()
        .map(|&s| ci_subset(g, s, CiMethod::RegularSubgroup, budget))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    let mut witness = None;
    for (index, (s, v)) in subsets.iter().zip(verdicts).enumerate() {
        rows.push(SampleRow {
            index,
            subset: s.to_vec(),
            status: v.status,
        });
        if v.status == CiStatus::NonCi {
            witness = v.witness.map(|w| SampleWitness {
                index,
                subset: s.to_vec(),
                witness: w,
            });
            break;
        }
    }
    let tally = |st: CiStatus| rows.iter().filter(|r| r.status == st).count();
    Ok(SampleTable {
        group: g.spec(),
        count,
        seed,
        budget_nodes: budget.nodes,
        ci: tally(CiStatus::Ci),
        non_ci: tally(CiStatus::NonCi),
        undecided: tally(CiStatus::Undecided),
        rows,
        witness,
    })
}
