//! Regular subgroups of a permutation group and their conjugacy.
//!
//! A regular subgroup `R <= K` isomorphic to `G` is described by a bijection
//! `s: G -> points` with `s(e) = 0` such that `R = s^-1 G_r s`, i.e. `R`
//! consists of the maps `p -> s(s^-1(p) + h)`. Such an `s` is called a
//! Cayley representation of `G` in `K`. Replacing `s` by `s k` with
//! `k in K_0` conjugates `R` by `k`, so the search enumerates one
//! representation per coset `s K_0`: the image of each group element is
//! restricted to orbit minima of the pointwise stabilizer of the images
//! chosen so far. Partial maps are pruned with the orbitals of `K`, since
//! `(s(a), s(b))` must lie in the same orbital as `(0, s(b - a))`.

use std::collections::HashSet;

use num_bigint::BigUint;

use super::{translation, PermGroup, Permutation};
use crate::error::{invalid, Error, Result};
use crate::group::Group;

/// Node budget for backtracking searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { nodes: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
}

/// Calls `visit` once for every coset `s K_0` of Cayley representations of
/// `G` in `K`, with `s` as a permutation (`s.apply(x)` is the point of `x`).
/// `visit` returns `false` to stop early.
pub fn cayley_representations(
    k: &PermGroup,
    g: &Group,
    budget: SearchBudget,
    mut visit: impl FnMut(&Permutation) -> Result<bool>,
) -> Result<SearchStats> {
    let n = g.order();
    if k.degree() != n {
        return Err(invalid(format!(
            "group of degree {} cannot contain a regular copy of a group of order {n}",
            k.degree()
        )));
    }
    if BigUint::from(n) > k.order() || k.order() % BigUint::from(n) != BigUint::from(0u32) {
        return Ok(SearchStats::default());
    }
    let mut search = RepSearch {
        k,
        g,
        n,
        orbitals: k.orbitals(),
        rows: Vec::new(),
        classes: 0,
        s: vec![usize::MAX; n],
        used: 1,
        budget: budget.nodes,
        stats: SearchStats::default(),
        stopped: false,
    };
    search.build_rows();
    search.s[0] = 0;
    if n == 1 {
        search.stats.leaves = 1;
        visit(&Permutation::identity(1))?;
        return Ok(search.stats);
    }
    let all = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    let mut domains = vec![all & !1; n];
    if !search.propagate(0, &mut domains) {
        return Ok(search.stats);
    }
    let k0 = k.point_stabilizer(0);
    search.rec(1, domains, Some(k0), &mut visit)?;
    Ok(search.stats)
}

/// Backtracking state. `s` is the partial map from group elements to
/// points; every unassigned element keeps a domain of admissible points
/// (a bitmask), narrowed after each assignment by the orbital constraints
/// `orbital(s(a), s(b)) = orbital(0, s(b - a))`.
struct RepSearch<'a> {
    k: &'a PermGroup,
    g: &'a Group,
    n: usize,
    orbitals: Vec<u32>,
    /// `rows[(p * classes + c) * 2]` holds `{v : orbital(p, v) = c}` and the
    /// next slot `{v : orbital(v, p) = c}`; empty when too large.
    rows: Vec<u128>,
    classes: usize,
    s: Vec<usize>,
    /// Points already used as images.
    used: u128,
    budget: u64,
    stats: SearchStats,
    stopped: bool,
}

impl RepSearch<'_> {
    fn orbital(&self, a: usize, b: usize) -> u32 {
        self.orbitals[a * self.n + b]
    }

    fn build_rows(&mut self) {
        const MAX_ROWS: usize = 1 << 18;
        let n = self.n;
        self.classes = self.orbitals.iter().max().map_or(0, |&c| c as usize + 1);
        if n * self.classes > MAX_ROWS {
            return;
        }
        let mut rows = vec![0u128; 2 * n * self.classes];
        for p in 0..n {
            for v in 0..n {
                rows[(p * self.classes + self.orbital(p, v) as usize) * 2] |= 1 << v;
                rows[(p * self.classes + self.orbital(v, p) as usize) * 2 + 1] |= 1 << v;
            }
        }
        self.rows = rows;
    }

    /// Points `v` with `orbital(p, v) = c`.
    fn out_mask(&self, p: usize, c: u32) -> u128 {
        if self.rows.is_empty() {
            (0..self.n)
                .filter(|&v| self.orbital(p, v) == c)
                .fold(0, |m, v| m | 1 << v)
        } else {
            self.rows[(p * self.classes + c as usize) * 2]
        }
    }

    /// Points `v` with `orbital(v, p) = c`.
    fn in_mask(&self, p: usize, c: u32) -> u128 {
        if self.rows.is_empty() {
            (0..self.n)
                .filter(|&v| self.orbital(v, p) == c)
                .fold(0, |m, v| m | 1 << v)
        } else {
            self.rows[(p * self.classes + c as usize) * 2 + 1]
        }
    }

    /// Narrows `dom[y]` to `mask`, or checks the image when `y` is assigned.
    fn restrict(&self, dom: &mut [u128], y: usize, mask: u128) -> bool {
        match self.s[y] {
            usize::MAX => {
                dom[y] &= mask;
                dom[y] & !self.used != 0
            }
            sy => mask >> sy & 1 == 1,
        }
    }

    /// Applies every constraint on a triple `(a, b, b - a)` that contains
    /// the newly assigned `x` and one other assigned element.
    fn propagate(&self, x: usize, dom: &mut [u128]) -> bool {
        let g = self.g;
        let w = self.s[x];
        for a in 0..self.n {
            let sa = self.s[a];
            if sa == usize::MAX {
                continue;
            }
            // x first, a second: difference a - x
            let c = self.orbital(w, sa);
            if !self.restrict(dom, g.sub(a, x), self.out_mask(0, c)) {
                return false;
            }
            // x first, a difference: second x + a
            let c = self.orbital(0, sa);
            if !self.restrict(dom, g.add(x, a), self.out_mask(w, c)) {
                return false;
            }
            // a first, x second: difference x - a
            let c = self.orbital(sa, w);
            if !self.restrict(dom, g.sub(x, a), self.out_mask(0, c)) {
                return false;
            }
            // a difference, x second: first x - a
            let c = self.orbital(0, sa);
            if !self.restrict(dom, g.sub(x, a), self.in_mask(w, c)) {
                return false;
            }
            // x difference, a first: second a + x
            let c = self.orbital(0, w);
            if !self.restrict(dom, g.add(a, x), self.out_mask(sa, c)) {
                return false;
            }
            // x difference, a second: first a - x
            if !self.restrict(dom, g.sub(a, x), self.in_mask(sa, c)) {
                return false;
            }
        }
        true
    }

    fn rec(
        &mut self,
        assigned: usize,
        domains: Vec<u128>,
        stab: Option<PermGroup>,
        visit: &mut dyn FnMut(&Permutation) -> Result<bool>,
    ) -> Result<()> {
        if self.stopped {
            return Ok(());
        }
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "regular subgroup search exceeded {} nodes",
                self.budget
            )));
        }
        if assigned == self.n {
            let s = Permutation::from_images(self.s.clone()).expect("s is a bijection");
            let s_inv = s.inverse();
            let inside = self.g.basis().iter().all(|&b| {
                self.k
                    .contains(&s_inv.then(&translation(self.g, b)).then(&s))
            });
            if inside {
                self.stats.leaves += 1;
                if !visit(&s)? {
                    self.stopped = true;
                }
            }
            return Ok(());
        }

        // the unassigned element with the fewest admissible images
        let free = !self.used;
        let x = (0..self.n)
            .filter(|&y| self.s[y] == usize::MAX)
            .min_by_key(|&y| ((domains[y] & free).count_ones(), y))
            .expect("an unassigned element");
        let dom = domains[x] & free;
        let candidates: Vec<usize> = match &stab {
            Some(p) => {
                let pts: Vec<usize> = (0..self.n).filter(|&w| dom >> w & 1 == 1).collect();
                p.orbits(Some(&pts)).into_iter().map(|o| o[0]).collect()
            }
            None => (0..self.n).filter(|&w| dom >> w & 1 == 1).collect(),
        };
        for w in candidates {
            self.s[x] = w;
            self.used |= 1 << w;
            let mut next_domains = domains.clone();
            if self.propagate(x, &mut next_domains) {
                let next = stab.as_ref().and_then(|p| {
                    let q = if p.orbit(w).len() == 1 {
                        p.clone()
                    } else {
                        p.point_stabilizer(w)
                    };
                    (!q.is_trivial()).then_some(q)
                });
                self.rec(assigned + 1, next_domains, next, visit)?;
            }
            self.s[x] = usize::MAX;
            self.used &= !(1 << w);
            if self.stopped {
                break;
            }
        }
        Ok(())
    }
}

/// `s^-1 G_r s` as a permutation group.
pub(crate) fn represented_subgroup(g: &Group, s: &Permutation) -> PermGroup {
    let s_inv = s.inverse();
    let gens: Vec<Permutation> = g
        .basis()
        .iter()
        .map(|&b| s_inv.then(&translation(g, b)).then(s))
        .collect();
    PermGroup::generate_with_order(g.order(), &gens, &BigUint::from(g.order()))
        .expect("regular group")
}

/// Canonical key of a regular group: for each point, the element sending 0 there.
fn regular_key(r: &PermGroup) -> Vec<u8> {
    let n = r.degree();
    let mut rows: Vec<Option<Permutation>> = vec![None; n];
    let mut frontier = vec![Permutation::identity(n)];
    rows[0] = Some(Permutation::identity(n));
    while let Some(x) = frontier.pop() {
        for gen in r.generators() {
            let y = x.then(gen);
            let p = y.apply(0);
            if rows[p].is_none() {
                rows[p] = Some(y.clone());
                frontier.push(y);
            }
        }
    }
    rows.into_iter()
        .flat_map(|r| r.expect("transitive").bytes().to_vec())
        .collect()
}

/// Regular subgroups of `K` isomorphic to `G`.
#[derive(Debug, Clone)]
pub struct RegularSearch {
    pub groups: Vec<PermGroup>,
    /// False when the budget ran out; `groups` is then a partial list.
    pub complete: bool,
}

/// Every regular subgroup of `K` isomorphic to `G`, each once.
pub fn regular_subgroups(k: &PermGroup, g: &Group, budget: SearchBudget) -> Result<RegularSearch> {
    let mut reps: Vec<PermGroup> = Vec::new();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let outcome = cayley_representations(k, g, budget, |s| {
        let r = represented_subgroup(g, s);
        if seen.insert(regular_key(&r)) {
            reps.push(r);
        }
        Ok(true)
    });
    let mut complete = match outcome {
        Ok(_) => true,
        Err(Error::BudgetExceeded(_)) => false,
        Err(e) => return Err(e),
    };

    // close each representative under conjugation by K_0
    let k0 = k.point_stabilizer(0);
    let mut groups: Vec<PermGroup> = Vec::new();
    let mut keys: HashSet<Vec<u8>> = HashSet::new();
    let mut work = 0u64;
    'classes: for r in reps {
        let mut frontier = vec![r];
        while let Some(r) = frontier.pop() {
            let key = regular_key(&r);
            if !keys.insert(key) {
                continue;
            }
            groups.push(r.clone());
            for c in k0.generators() {
                work += 1;
                if work > budget.nodes {
                    complete = false;
                    break 'classes;
                }
                frontier.push(r.conjugate(c));
            }
        }
    }
    groups.sort_by_key(regular_key);
    Ok(RegularSearch { groups, complete })
}

/// Result of [`conjugate_subgroup_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjugacyOutcome {
    Found(Permutation),
    NotFound,
    Undecided,
}

/// Some `k in K` with `A^k <= B`.
///
/// Walks the elements of `K` through its stabilizer chain after a cheap
/// comparison of element-order profiles.
pub fn conjugate_subgroup_search(
    k: &PermGroup,
    a: &PermGroup,
    b: &PermGroup,
    budget: SearchBudget,
) -> Result<ConjugacyOutcome> {
    if a.degree() != k.degree() || b.degree() != k.degree() {
        return Err(invalid("degree mismatch in conjugacy search"));
    }
    let (oa, ob) = (a.order(), b.order());
    if ob.clone() % oa.clone() != BigUint::from(0u32) {
        return Ok(ConjugacyOutcome::NotFound);
    }
    if let (Ok(pa), Ok(pb)) = (a.order_profile(budget.nodes), b.order_profile(budget.nodes)) {
        let dominated = pa
            .iter()
            .all(|(d, c)| pb.iter().any(|(e, m)| e == d && m >= c));
        if !dominated {
            return Ok(ConjugacyOutcome::NotFound);
        }
    }
    let levels = &k.bsgs().levels;
    let mut nodes = 0u64;
    let mut stack: Vec<(usize, Permutation)> = vec![(0, Permutation::identity(k.degree()))];
    while let Some((i, suffix)) = stack.pop() {
        nodes += 1;
        if nodes > budget.nodes {
            return Ok(ConjugacyOutcome::Undecided);
        }
        if i == levels.len() {
            if a.generators()
                .iter()
                .all(|x| b.contains(&x.conjugate_by(&suffix)))
            {
                return Ok(ConjugacyOutcome::Found(suffix));
            }
            continue;
        }
        for p in levels[i].orbit.iter().rev() {
            stack.push((
                i + 1,
                levels[i].transversal[*p].as_ref().unwrap().then(&suffix),
            ));
        }
    }
    Ok(ConjugacyOutcome::NotFound)
}
