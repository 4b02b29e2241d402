//! S-rings over finite abelian groups.
//!
//! An S-ring is stored through its partition of `G` into basic sets. The
//! basic sets are kept in canonical order (by size, then smallest element),
//! so two S-rings over the same group are equal exactly when their
//! partitions are.

mod lemmas;

use std::fmt;
use std::io::{self, Write};
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::group::{subgroup_lattice_bounded, ElemSet, Group, Section, Subgroup, MAX_ORDER};

pub use lemmas::{is_rational, SeparatVerdict};

/// An S-ring over an abelian group, validated on construction.
pub struct SRing {
    group: Group,
    classes: Vec<ElemSet>,
    class_of: Vec<usize>,
    /// Row `x * rank + y` holds `c^Z_{X,Y}` for every `Z`.
    rows: Vec<OnceLock<Vec<u32>>>,
}

/// Puts a partition in canonical order.
pub fn canonical_order(mut classes: Vec<ElemSet>) -> Vec<ElemSet> {
    classes.sort_by_key(|c| (c.len(), c.first()));
    classes
}

/// Checks the three S-ring axioms for a partition of `G`.
pub fn validate_sring(g: &Group, partition: Vec<ElemSet>) -> Result<SRing> {
    let a = SRing::from_partition_unchecked(g, partition)?;
    a.check_axioms()?;
    Ok(a)
}

impl SRing {
    /// Builds the ring without checking axioms 1-3 (the partition itself is checked).
    pub(crate) fn from_partition_unchecked(g: &Group, partition: Vec<ElemSet>) -> Result<SRing> {
        let n = g.order();
        let mut class_of = vec![usize::MAX; n];
        let classes = canonical_order(partition);
        for (i, c) in classes.iter().enumerate() {
            if c.is_empty() {
                return Err(invalid("partition contains an empty set"));
            }
            for x in *c {
                if x >= n {
                    return Err(invalid(format!("element {x} is outside {g}")));
                }
                if class_of[x] != usize::MAX {
                    return Err(invalid(format!("element {x} lies in two classes")));
                }
                class_of[x] = i;
            }
        }
        if let Some(x) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(invalid(format!(
                "element {x} is not covered by the partition"
            )));
        }
        let rank = classes.len();
        Ok(SRing {
            group: g.clone(),
            classes,
            class_of,
            rows: (0..rank * rank).map(|_| OnceLock::new()).collect(),
        })
    }

    fn check_axioms(&self) -> Result<()> {
        let g = &self.group;
        let e_class = self.classes[self.class_of[0]];
        if e_class.len() != 1 {
            return Err(Error::Axiom1Violation {
                class: e_class.to_vec(),
            });
        }
        for &c in &self.classes {
            let inv = g.inverse_set(c);
            if self.class_index(inv).is_none() {
                return Err(Error::Axiom2Violation {
                    set: c.to_vec(),
                    inverse: inv.to_vec(),
                });
            }
        }
        let rank = self.rank();
        for xi in 0..rank {
            for yi in 0..rank {
                let counts = self.product_counts(xi, yi);
                let mut row = vec![0u32; rank];
                for (zi, &z) in self.classes.iter().enumerate() {
                    let first = counts[z.first().unwrap()];
                    if z.iter().any(|w| counts[w] != first) {
                        return Err(Error::Axiom3Violation {
                            x: self.classes[xi].to_vec(),
                            y: self.classes[yi].to_vec(),
                            z: z.to_vec(),
                        });
                    }
                    row[zi] = first;
                }
                let _ = self.rows[xi * rank + yi].set(row);
            }
        }
        Ok(())
    }

    /// `z -> #{(x, y) in X x Y : x + y = z}`.
    fn product_counts(&self, xi: usize, yi: usize) -> Vec<u32> {
        let g = &self.group;
        let mut counts = vec![0u32; g.order()];
        for x in self.classes[xi] {
            for y in self.classes[yi] {
                counts[g.add(x, y)] += 1;
            }
        }
        counts
    }

    /// `ZG`: every element is its own class.
    pub fn group_ring(g: &Group) -> SRing {
        let part = (0..g.order()).map(ElemSet::singleton).collect();
        validate_sring(g, part).expect("ZG is an S-ring")
    }

    /// The rank-2 S-ring `{e}, G^#` (or `ZG` when `G` is trivial).
    pub fn rank_two(g: &Group) -> SRing {
        let mut part = vec![ElemSet::singleton(0)];
        if g.order() > 1 {
            part.push(g.nonidentity());
        }
        validate_sring(g, part).expect("the rank-2 partition is an S-ring")
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Basic sets in canonical order; `classes()[0] == {e}`.
    pub fn classes(&self) -> &[ElemSet] {
        &self.classes
    }

    pub fn rank(&self) -> usize {
        self.classes.len()
    }

    /// Index of the basic set containing `x`.
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// Index of `X` if it is a basic set.
    pub fn class_index(&self, x: ElemSet) -> Option<usize> {
        let i = self.class_of[x.first()?];
        (self.classes[i] == x).then_some(i)
    }

    pub fn is_basic(&self, x: ElemSet) -> bool {
        self.class_index(x).is_some()
    }

    /// True when `X` is a union of basic sets.
    pub fn is_a_set(&self, x: ElemSet) -> bool {
        x.iter()
            .all(|a| self.classes[self.class_of[a]].is_subset(x))
    }

    /// Smallest A-set containing `X`.
    pub fn a_closure(&self, x: ElemSet) -> ElemSet {
        x.iter().fold(ElemSet::EMPTY, |acc, a| {
            acc | self.classes[self.class_of[a]]
        })
    }

    /// `c^Z_{X,Y}` by class indices.
    pub fn structure_constant(&self, x: usize, y: usize, z: usize) -> u32 {
        self.row(x, y)[z]
    }

    /// `(c^Z_{X,Y})_Z`.
    pub fn row(&self, x: usize, y: usize) -> &[u32] {
        let rank = self.rank();
        self.rows[x * rank + y].get_or_init(|| {
            let counts = self.product_counts(x, y);
            self.classes
                .iter()
                .map(|z| counts[z.first().unwrap()])
                .collect()
        })
    }

    /// Every nonzero `(X, Y, Z, c^Z_{X,Y})`, by class index.
    pub fn structure_constants(&self) -> Vec<(usize, usize, usize, u32)> {
        let rank = self.rank();
        let mut out = Vec::new();
        for x in 0..rank {
            for y in 0..rank {
                for (z, &c) in self.row(x, y).iter().enumerate() {
                    if c != 0 {
                        out.push((x, y, z, c));
                    }
                }
            }
        }
        out
    }

    /// Writes the nonzero structure constants as CSV with header `X,Y,Z,c`.
    pub fn write_structure_constants_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "X,Y,Z,c")?;
        for (x, y, z, c) in self.structure_constants() {
            writeln!(w, "{x},{y},{z},{c}")?;
        }
        Ok(())
    }

    /// Subgroups of `G` that are A-sets, in lattice order.
    pub fn a_subgroups(&self) -> Vec<Subgroup> {
        subgroup_lattice_bounded(&self.group, MAX_ORDER)
            .expect("lattice within the global bound")
            .into_iter()
            .filter(|h| self.is_a_set(h.elements))
            .collect()
    }

    pub fn is_a_subgroup(&self, h: &Subgroup) -> bool {
        self.is_a_set(h.elements)
    }

    /// Basic sets contained in `U`.
    pub fn classes_within(&self, u: ElemSet) -> Vec<ElemSet> {
        self.classes
            .iter()
            .copied()
            .filter(|c| c.is_subset(u))
            .collect()
    }

    /// `A_S` for an A-section `S = U/L`, over the quotient group of `S`.
    pub fn quotient_sring(&self, s: &Section) -> Result<SRing> {
        if !self.is_a_subgroup(&s.upper) || !self.is_a_subgroup(&s.lower) {
            return Err(Error::NotASection(format!(
                "{:?}/{:?}",
                s.upper.elements, s.lower.elements
            )));
        }
        let mut images: Vec<ElemSet> = self
            .classes_within(s.upper.elements)
            .into_iter()
            .map(|c| s.project_set(c))
            .collect();
        images.sort();
        images.dedup();
        validate_sring(&s.quotient, images)
    }

    /// `A_U` transported to the quotient group of `U/{e}`.
    pub fn restriction(&self, u: &Subgroup) -> Result<SRing> {
        let s = crate::group::make_section(&self.group, u, &Subgroup::trivial())?;
        self.quotient_sring(&s)
    }

    /// The images `X^(m)` of all classes, which Lemma burn says are classes.
    pub fn apply_multiplier(&self, m: i64) -> Vec<ElemSet> {
        canonical_order(
            self.classes
                .iter()
                .map(|&c| self.group.power_set(c, m))
                .collect(),
        )
    }
}

impl Clone for SRing {
    fn clone(&self) -> Self {
        SRing::from_partition_unchecked(&self.group, self.classes.clone()).expect("already valid")
    }
}

impl PartialEq for SRing {
    fn eq(&self, other: &SRing) -> bool {
        self.group == other.group && self.classes == other.classes
    }
}

impl Eq for SRing {}

impl std::hash::Hash for SRing {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.factors().hash(state);
        self.classes.hash(state);
    }
}

impl fmt::Debug for SRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SRing({}, {:?})", self.group, self.classes)
    }
}

#[derive(Serialize, Deserialize)]
struct SRingWire {
    group: Group,
    classes: Vec<ElemSet>,
}

impl Serialize for SRing {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SRingWire {
            group: self.group.clone(),
            classes: self.classes.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SRing {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = SRingWire::deserialize(deserializer)?;
        validate_sring(&w.group, w.classes).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;
