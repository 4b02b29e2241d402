//! Permutation groups acting on the element set of a group.

mod bsgs;
mod permutation;
mod regular;
#[cfg(test)]
mod tests;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::group::{ElemSet, Group, Section};
use bsgs::Bsgs;

pub use permutation::{Permutation, MAX_DEGREE};
pub use regular::{
    cayley_representations, conjugate_subgroup_search, regular_subgroups, ConjugacyOutcome,
    RegularSearch, SearchBudget, SearchStats,
};

/// Default hard cap on `|K|` for [`close_group`].
pub const DEFAULT_ORDER_CAP: u64 = 1_000_000_000;

/// A permutation group with a stabilizer chain.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    bsgs: Arc<Bsgs>,
    elements: Option<Arc<Vec<Permutation>>>,
}

/// Builds `<gens>` on `degree` points.
///
/// Fails when the order exceeds [`DEFAULT_ORDER_CAP`]. The element list is
/// populated when the order is at most `enumerate_budget`.
pub fn close_group(
    degree: usize,
    gens: &[Permutation],
    enumerate_budget: u64,
) -> Result<PermGroup> {
    let k = PermGroup::generate(degree, gens)?;
    if k.order() > BigUint::from(DEFAULT_ORDER_CAP) {
        return Err(Error::BudgetExceeded(format!(
            "group order {} exceeds the cap {DEFAULT_ORDER_CAP}",
            k.order()
        )));
    }
    Ok(k.with_elements(enumerate_budget))
}

/// `G_r`, the right translations `x -> x + g`.
pub fn right_regular(g: &Group) -> PermGroup {
    let gens: Vec<Permutation> = g.basis().iter().map(|&b| translation(g, b)).collect();
    PermGroup::generate_with_order(g.order(), &gens, &BigUint::from(g.order()))
        .expect("translations have the right degree")
}

/// The right translation by `h`.
pub fn translation(g: &Group, h: usize) -> Permutation {
    Permutation::from_bytes((0..g.order()).map(|x| g.add(x, h) as u8).collect())
}

impl PermGroup {
    /// `<gens>` without an order cap.
    pub fn generate(degree: usize, gens: &[Permutation]) -> Result<PermGroup> {
        Self::check_degree(degree, gens)?;
        Ok(PermGroup {
            degree,
            generators: gens.to_vec(),
            bsgs: Arc::new(Bsgs::build(degree, gens, &[], None)),
            elements: None,
        })
    }

    /// `<gens>` when `|<gens>|` is known in advance; stops Schreier–Sims early.
    pub fn generate_with_order(
        degree: usize,
        gens: &[Permutation],
        order: &BigUint,
    ) -> Result<PermGroup> {
        Self::check_degree(degree, gens)?;
        let bsgs = Bsgs::build(degree, gens, &[], Some(order));
        if &bsgs.order() != order {
            return Err(Error::Internal(format!(
                "claimed order {order} but the generators give {}",
                bsgs.order()
            )));
        }
        Ok(PermGroup {
            degree,
            generators: gens.to_vec(),
            bsgs: Arc::new(bsgs),
            elements: None,
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::generate(degree, &[]).expect("trivial group")
    }

    /// `Sym(n)`.
    pub fn symmetric(n: usize) -> PermGroup {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Permutation::from_cycles(n, &[&[0, 1]]).unwrap());
        }
        if n >= 3 {
            let cycle: Vec<usize> = (0..n).collect();
            gens.push(Permutation::from_cycles(n, &[&cycle]).unwrap());
        }
        let order = (1..=n).fold(BigUint::from(1u32), |a, k| a * k);
        PermGroup::generate_with_order(n, &gens, &order).unwrap()
    }

    fn check_degree(degree: usize, gens: &[Permutation]) -> Result<()> {
        if degree > MAX_DEGREE {
            return Err(invalid(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(invalid(format!(
                "generator of degree {} in a group of degree {degree}",
                g.degree()
            )));
        }
        Ok(())
    }

    fn with_elements(mut self, budget: u64) -> PermGroup {
        if self.order() <= BigUint::from(budget) {
            self.elements = Some(Arc::new(self.bsgs.elements()));
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.bsgs.strong_generators()
    }

    pub fn base(&self) -> Vec<usize> {
        self.bsgs.base()
    }

    pub fn order(&self) -> BigUint {
        self.bsgs.order()
    }

    /// `|K|` if it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.bsgs.levels.iter().all(|l| l.orbit.len() == 1)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.bsgs.contains(g)
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// The populated element list, if any.
    pub fn elements(&self) -> Option<&[Permutation]> {
        self.elements.as_deref().map(|v| v.as_slice())
    }

    /// All elements, sorted; fails when `|K| > limit`.
    pub fn enumerate(&self, limit: u64) -> Result<Vec<Permutation>> {
        if let Some(e) = self.elements() {
            return Ok(e.to_vec());
        }
        if self.order() > BigUint::from(limit) {
            return Err(Error::BudgetExceeded(format!(
                "enumerating a group of order {}",
                self.order()
            )));
        }
        Ok(self.bsgs.elements())
    }

    pub fn orbit(&self, pt: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[pt] = true;
        let mut orbit = vec![pt];
        let mut i = 0;
        while i < orbit.len() {
            for g in &self.generators {
                let y = g.apply(orbit[i]);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        orbit
    }

    /// Orbits through the given points (all points by default), each sorted
    /// and listed by smallest point.
    pub fn orbits(&self, pts: Option<&[usize]>) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.degree).collect();
        let pts = pts.unwrap_or(&all);
        let mut done = vec![false; self.degree];
        let mut out = Vec::new();
        let mut sorted = pts.to_vec();
        sorted.sort_unstable();
        for p in sorted {
            if done[p] {
                continue;
            }
            let o = self.orbit(p);
            for &x in &o {
                done[x] = true;
            }
            out.push(o);
        }
        out
    }

    /// Orbit partition of a group on at most 128 points, as element sets.
    pub fn orbit_sets(&self) -> Vec<ElemSet> {
        self.orbits(None)
            .into_iter()
            .map(|o| o.into_iter().collect())
            .collect()
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// Transitive with trivial point stabilizers.
    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == BigUint::from(self.degree)
    }

    /// `K_pt`.
    pub fn point_stabilizer(&self, pt: usize) -> PermGroup {
        self.pointwise_stabilizer(&[pt])
    }

    /// The pointwise stabilizer of `pts`.
    pub fn pointwise_stabilizer(&self, pts: &[usize]) -> PermGroup {
        let order = self.order();
        let chain = Bsgs::build(self.degree, &self.strong_generators(), pts, Some(&order));
        let tail = chain.tail(pts.len());
        let gens = tail.strong_generators();
        PermGroup {
            degree: self.degree,
            generators: gens,
            bsgs: Arc::new(tail),
            elements: None,
        }
    }

    /// Ids of the orbits of `K` on ordered pairs; `ids[a * n + b]`.
    pub fn orbitals(&self) -> Vec<u32> {
        let n = self.degree;
        let mut parent: Vec<usize> = (0..n * n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &self.generators {
            for a in 0..n {
                for b in 0..n {
                    let x = find(&mut parent, a * n + b);
                    let y = find(&mut parent, g.apply(a) * n + g.apply(b));
                    if x != y {
                        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                        parent[hi] = lo;
                    }
                }
            }
        }
        let mut ids = HashMap::new();
        (0..n * n)
            .map(|i| {
                let r = find(&mut parent, i);
                let next = ids.len() as u32;
                *ids.entry(r).or_insert(next)
            })
            .collect()
    }

    /// `k^-1 K k`.
    pub fn conjugate(&self, k: &Permutation) -> PermGroup {
        let gens: Vec<Permutation> = self.generators.iter().map(|g| g.conjugate_by(k)).collect();
        PermGroup::generate_with_order(self.degree, &gens, &self.order())
            .expect("conjugate has equal order")
    }

    /// Number of elements of each order, for groups small enough to list.
    pub fn order_profile(&self, limit: u64) -> Result<Vec<(usize, usize)>> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for g in self.enumerate(limit)? {
            *counts.entry(g.order()).or_default() += 1;
        }
        let mut v: Vec<(usize, usize)> = counts.into_iter().collect();
        v.sort_unstable();
        Ok(v)
    }

    pub(crate) fn bsgs(&self) -> &Bsgs {
        &self.bsgs
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct PermGroupWire {
    degree: usize,
    generators: Vec<Permutation>,
    order: String,
}

impl Serialize for PermGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PermGroupWire {
            degree: self.degree,
            generators: self.generators.clone(),
            order: self.order().to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PermGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = PermGroupWire::deserialize(deserializer)?;
        let k = PermGroup::generate(w.degree, &w.generators).map_err(serde::de::Error::custom)?;
        if k.order().to_string() != w.order {
            return Err(serde::de::Error::custom(format!(
                "claimed order {} but the generators give {}",
                w.order,
                k.order()
            )));
        }
        Ok(k)
    }
}

/// Node budget for [`induced_section_action`].
pub const SECTION_ACTION_BUDGET: u64 = 5_000_000;

/// `K^S`: the permutations of `U/L` induced by the elements of `K` that
/// map `U` onto itself and permute the `L`-cosets.
///
/// The elements are found by walking the stabilizer chain, pruning on the
/// images of base points; `budget` bounds the number of search nodes.
pub fn induced_section_action(k: &PermGroup, s: &Section, budget: u64) -> Result<PermGroup> {
    let mut search = SectionSearch {
        levels: &k.bsgs().levels,
        section: s,
        nodes: 0,
        budget,
        found: HashSet::new(),
    };
    search.run(0, &Permutation::identity(k.degree()))?;
    let mut gens: Vec<Permutation> = search.found.into_iter().collect();
    gens.sort();
    PermGroup::generate(s.order(), &gens)
}

struct SectionSearch<'a> {
    levels: &'a [bsgs::Level],
    section: &'a Section,
    nodes: u64,
    budget: u64,
    found: HashSet<Permutation>,
}

impl SectionSearch<'_> {
    /// Elements are `u_{m-1} ... u_0` (applied left to right); once
    /// `u_0..u_i` are fixed, so are the images of the first `i+1` base points.
    fn run(&mut self, i: usize, suffix: &Permutation) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded("section stabilizer search".into()));
        }
        if i == self.levels.len() {
            if let Some(p) = self.induced(suffix) {
                self.found.insert(p);
            }
            return Ok(());
        }
        let levels = self.levels;
        let level = &levels[i];
        for b in &level.orbit {
            let g = level.transversal[*b].as_ref().unwrap().then(suffix);
            if self.base_images_compatible(i, &g) {
                self.run(i + 1, &g)?;
            }
        }
        Ok(())
    }

    fn base_images_compatible(&self, i: usize, g: &Permutation) -> bool {
        let s = self.section;
        let p = self.levels[i].point;
        let gp = g.apply(p);
        match (s.project(p), s.project(gp)) {
            (None, None) => true,
            (Some(cp), Some(cgp)) => self.levels[..i].iter().all(|l| {
                match (s.project(l.point), s.project(g.apply(l.point))) {
                    (Some(cq), Some(cgq)) => (cq == cp) == (cgq == cgp),
                    _ => true,
                }
            }),
            _ => false,
        }
    }

    fn induced(&self, f: &Permutation) -> Option<Permutation> {
        let s = self.section;
        let mut img = vec![usize::MAX; s.order()];
        for x in s.upper.elements {
            let r = s.project(f.apply(x))?;
            let q = s.project(x).unwrap();
            if img[q] == usize::MAX {
                img[q] = r;
            } else if img[q] != r {
                return None;
            }
        }
        Permutation::from_images(img).ok()
    }
}
