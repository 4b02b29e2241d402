use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{canonize, cayley_color_graph, cayley_digraph, color_automorphisms};
use crate::error::{invalid, Error, Result};
use crate::group::{shared_automorphism_group, ElemSet, Group, GroupAutomorphism};
use crate::perm::{cayley_representations, right_regular, PermGroup, Permutation, SearchBudget};
use crate::sring::SRing;

/// Largest `|G|` for which the orbit-census method enumerates all subsets.
pub const ORBIT_CENSUS_MAX_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiStatus {
    Ci,
    NonCi,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    /// Compare the canonical form of `Cay(G, S)` with that of every `T`.
    OrbitCensus,
    /// Test conjugacy of the regular subgroups of `Aut(Cay(G, S))`.
    RegularSubgroup,
}

impl CiMethod {
    /// Orbit census up to [`ORBIT_CENSUS_MAX_ORDER`], regular subgroups above.
    pub fn for_group(g: &Group) -> CiMethod {
        if g.order() <= ORBIT_CENSUS_MAX_ORDER {
            CiMethod::OrbitCensus
        } else {
            CiMethod::RegularSubgroup
        }
    }
}

/// An isomorphic image that no automorphism of `G` reaches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonCiWitness {
    /// `[T]` for a subset test; the classes of the image S-ring for an S-ring test.
    pub sets: Vec<Vec<usize>>,
    /// Vertex map from the original Cayley object onto the image.
    pub iso: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiVerdict {
    pub status: CiStatus,
    pub method: CiMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<NonCiWitness>,
}

impl CiVerdict {
    fn ci(method: CiMethod) -> CiVerdict {
        CiVerdict {
            status: CiStatus::Ci,
            method,
            witness: None,
        }
    }

    fn undecided(method: CiMethod) -> CiVerdict {
        CiVerdict {
            status: CiStatus::Undecided,
            method,
            witness: None,
        }
    }
}

/// Three-valued answer of a budgeted search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    True,
    False,
    Undecided,
}

/// Some `φ in Aut(G)` with `S^φ = T`.
pub fn cayley_iso(g: &Group, s: ElemSet, t: ElemSet) -> Result<Option<GroupAutomorphism>> {
    let aut = shared_automorphism_group(g)?;
    Ok(aut.find_mapping(s, t).cloned())
}

/// Decides whether `S` is a CI-subset of `G`.
///
/// A budget overrun gives an undecided verdict, never a wrong one.
pub fn ci_subset(
    g: &Group,
    s: ElemSet,
    method: CiMethod,
    budget: SearchBudget,
) -> Result<CiVerdict> {
    if s.iter().any(|x| x >= g.order()) {
        return Err(invalid(format!("{s:?} is not a subset of {g}")));
    }
    match method {
        CiMethod::OrbitCensus => orbit_census(g, s, budget),
        CiMethod::RegularSubgroup => regular_subgroup_ci(g, s, budget),
    }
}

/// Number of 2-paths from `e` to each vertex, paired with adjacency: an
/// isomorphism invariant of Cayley digraphs used to skip most candidates.
fn two_path_profile(g: &Group, s: ElemSet) -> Vec<(bool, u32)> {
    let mut counts = vec![0u32; g.order()];
    for a in s {
        for b in s {
            counts[g.add(a, b)] += 1;
        }
    }
    let mut out: Vec<(bool, u32)> = (0..g.order()).map(|x| (s.contains(x), counts[x])).collect();
    out.sort_unstable();
    out
}

fn orbit_census(g: &Group, s: ElemSet, budget: SearchBudget) -> Result<CiVerdict> {
    let method = CiMethod::OrbitCensus;
    let n = g.order();
    if n > ORBIT_CENSUS_MAX_ORDER {
        return Err(invalid(format!(
            "orbit census needs |G| <= {ORBIT_CENSUS_MAX_ORDER}, got {n}"
        )));
    }
    let aut = shared_automorphism_group(g)?;
    let orbit: HashSet<ElemSet> = aut.set_orbit(s).into_iter().collect();
    let profile = two_path_profile(g, s);
    let form_s = canonize(&cayley_digraph(g, s));
    let mut work = 0u64;
    for bits in 0u64..(1 << n) {
        let t = ElemSet::from_bits(bits as u128);
        if t.len() != s.len() || t.contains(0) != s.contains(0) || orbit.contains(&t) {
            continue;
        }
        if two_path_profile(g, t) != profile {
            continue;
        }
        work += 1;
        if work > budget.nodes {
            return Ok(CiVerdict::undecided(method));
        }
        let form_t = canonize(&cayley_digraph(g, t));
        if let Some(f) = form_s.isomorphism_to(&form_t) {
            return Ok(CiVerdict {
                status: CiStatus::NonCi,
                method,
                witness: Some(NonCiWitness {
                    sets: vec![t.to_vec()],
                    iso: f.images(),
                }),
            });
        }
    }
    Ok(CiVerdict::ci(method))
}

fn regular_subgroup_ci(g: &Group, s: ElemSet, budget: SearchBudget) -> Result<CiVerdict> {
    let method = CiMethod::RegularSubgroup;
    let aut = shared_automorphism_group(g)?;
    let k = color_automorphisms(&cayley_digraph(g, s));
    let mut witness = None;
    let outcome = cayley_representations(&k, g, budget, |rep| {
        let t: ElemSet = (0..g.order())
            .filter(|&d| s.contains(rep.apply(d)))
            .collect();
        if aut.find_mapping(t, s).is_some() {
            return Ok(true);
        }
        witness = Some(NonCiWitness {
            sets: vec![t.to_vec()],
            iso: rep.inverse().images(),
        });
        Ok(false)
    });
    finish(outcome, witness, method)
}

fn finish(
    outcome: Result<crate::perm::SearchStats>,
    witness: Option<NonCiWitness>,
    method: CiMethod,
) -> Result<CiVerdict> {
    match outcome {
        Ok(_) => Ok(match witness {
            Some(w) => CiVerdict {
                status: CiStatus::NonCi,
                method,
                witness: Some(w),
            },
            None => CiVerdict::ci(method),
        }),
        Err(Error::BudgetExceeded(_)) => Ok(CiVerdict::undecided(method)),
        Err(e) => Err(e),
    }
}

/// Decides whether `A` is a CI-S-ring: every isomorphism of `A` onto an
/// S-ring over `G` fixing `e` agrees on the basic sets with an automorphism of `G`.
pub fn ci_sring(a: &SRing, budget: SearchBudget) -> Result<CiVerdict> {
    let method = CiMethod::RegularSubgroup;
    let g = a.group();
    let aut = shared_automorphism_group(g)?;
    let k = color_automorphisms(&cayley_color_graph(a));
    let mut witness = None;
    let outcome = cayley_representations(&k, g, budget, |rep| {
        // classes of the image S-ring under rep^-1, in the order of A's classes
        let image: Vec<ElemSet> = a
            .classes()
            .iter()
            .map(|&x| {
                (0..g.order())
                    .filter(|&d| x.contains(rep.apply(d)))
                    .collect()
            })
            .collect();
        let matched = aut.elements.iter().any(|phi| {
            image
                .iter()
                .zip(a.classes())
                .all(|(&t, &x)| phi.apply_set(t) == x)
        });
        if matched {
            return Ok(true);
        }
        witness = Some(NonCiWitness {
            sets: image.iter().map(|t| t.to_vec()).collect(),
            iso: rep.inverse().images(),
        });
        Ok(false)
    });
    finish(outcome, witness, method)
}

fn check_chain(k1: &PermGroup, k2: &PermGroup, g: &Group) -> Result<()> {
    if k1.degree() != g.order() || k2.degree() != g.order() {
        return Err(invalid("groups must act on the elements of G"));
    }
    if !right_regular(g).is_subgroup_of(k1) || !k1.is_subgroup_of(k2) {
        return Err(invalid("expected G_r <= K1 <= K2"));
    }
    Ok(())
}

/// `K1 ≼_G K2`: every regular subgroup of `K2` isomorphic to `G` is
/// conjugate in `K2` to a subgroup of `K1`.
pub fn g_complete_leq(
    k1: &PermGroup,
    k2: &PermGroup,
    g: &Group,
    budget: SearchBudget,
) -> Result<Decision> {
    check_chain(k1, k2, g)?;
    let mut reps1: Vec<Permutation> = Vec::new();
    match cayley_representations(k1, g, budget, |s| {
        reps1.push(s.clone());
        Ok(true)
    }) {
        Ok(_) => {}
        Err(Error::BudgetExceeded(_)) => return Ok(Decision::Undecided),
        Err(e) => return Err(e),
    }
    // R_s is K2-conjugate into K1 iff s' s^-1 lies in K2 for a K1-representation s'
    let mut all = true;
    let outcome = cayley_representations(k2, g, budget, |s| {
        let s_inv = s.inverse();
        if reps1.iter().any(|t| k2.contains(&s_inv.then(t))) {
            return Ok(true);
        }
        all = false;
        Ok(false)
    });
    match outcome {
        Ok(_) => Ok(if all { Decision::True } else { Decision::False }),
        Err(Error::BudgetExceeded(_)) => Ok(Decision::Undecided),
        Err(e) => Err(e),
    }
}

/// Result of [`min_family_elements`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinFamily {
    /// Indices of the kept elements: minimal, or not shown to be non-minimal.
    pub minimal: Vec<usize>,
    /// Pairs `(i, j)` for which `K_i ≼_G K_j` could not be decided.
    pub undecided: Vec<(usize, usize)>,
}

/// The `≼_G`-minimal members of a finite family of overgroups of `G_r`.
///
/// Only the supplied family is compared; repeated groups count once (the
/// first index is kept).
/// Minimality verdict for one family member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberVerdict {
    pub minimal: bool,
    /// A member that excludes this one: equal with a smaller index, or
    /// properly contained and G-complete below it.
    pub excluded_by: Option<usize>,
    /// Undecided comparisons `(j, i)`.
    pub undecided: Vec<(usize, usize)>,
}

/// Decides whether `family[i]` is minimal; see [`min_family_elements`].
/// Members are assumed to contain `G_r`.
pub fn family_member_minimal(
    family: &[PermGroup],
    i: usize,
    g: &Group,
    budget: SearchBudget,
) -> Result<MemberVerdict> {
    let ki = &family[i];
    let mut undecided = Vec::new();
    for (j, kj) in family.iter().enumerate() {
        if i == j || !kj.is_subgroup_of(ki) {
            continue;
        }
        if ki.is_subgroup_of(kj) {
            if j < i {
                return Ok(MemberVerdict {
                    minimal: false,
                    excluded_by: Some(j),
                    undecided,
                });
            }
            continue;
        }
        match g_complete_leq(kj, ki, g, budget)? {
            Decision::True => {
                return Ok(MemberVerdict {
                    minimal: false,
                    excluded_by: Some(j),
                    undecided,
                })
            }
            Decision::False => {}
            Decision::Undecided => undecided.push((j, i)),
        }
    }
    Ok(MemberVerdict {
        minimal: true,
        excluded_by: None,
        undecided,
    })
}

pub fn min_family_elements(
    family: &[PermGroup],
    g: &Group,
    budget: SearchBudget,
) -> Result<MinFamily> {
    let gr = right_regular(g);
    for k in family {
        if k.degree() != g.order() || !gr.is_subgroup_of(k) {
            return Err(invalid("every family member must contain G_r"));
        }
    }
    let mut minimal = Vec::new();
    let mut undecided = Vec::new();
    for i in 0..family.len() {
        let v = family_member_minimal(family, i, g, budget)?;
        if v.minimal {
            minimal.push(i);
        }
        undecided.extend(v.undecided);
    }
    Ok(MinFamily { minimal, undecided })
}
