use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{ElemSet, Group, DEFAULT_ORDER_BOUND};
use crate::error::{invalid, Error, Result};

/// A subgroup, stored as its element set plus the generators it was built from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    pub elements: ElemSet,
    pub generators: Vec<usize>,
}

impl Subgroup {
    pub fn trivial() -> Subgroup {
        Subgroup {
            elements: ElemSet::singleton(0),
            generators: Vec::new(),
        }
    }

    pub fn whole(g: &Group) -> Subgroup {
        generate_subgroup(g, g.basis())
    }

    /// Wraps an element set that is already known to be a subgroup.
    pub fn from_elements(g: &Group, elements: ElemSet) -> Result<Subgroup> {
        let closure = generate_subgroup(g, elements.iter());
        if closure.elements != elements {
            return Err(invalid(format!("{elements:?} is not a subgroup")));
        }
        Ok(closure)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.contains(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.is_subset(other.elements)
    }

    pub fn join(&self, g: &Group, other: &Subgroup) -> Subgroup {
        generate_subgroup(
            g,
            self.generators
                .iter()
                .chain(other.generators.iter())
                .copied(),
        )
    }

    pub fn intersect(&self, g: &Group, other: &Subgroup) -> Subgroup {
        generate_subgroup(g, (self.elements & other.elements).iter())
    }

    /// The coset `H + x`.
    pub fn coset(&self, g: &Group, x: usize) -> ElemSet {
        g.translate(self.elements, x)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elements.to_vec()
    }
}

/// `<X>`: the smallest subgroup containing `X` (and `e`).
pub fn generate_subgroup(g: &Group, xs: impl IntoIterator<Item = usize>) -> Subgroup {
    let mut gens: Vec<usize> = Vec::new();
    let mut elements = ElemSet::singleton(0);
    for x in xs {
        if elements.contains(x) {
            continue;
        }
        gens.push(x);
        // elements + <x>, grown until closed
        let mut frontier: Vec<usize> = elements.iter().collect();
        while let Some(y) = frontier.pop() {
            for &s in &gens {
                let z = g.add(y, s);
                if !elements.contains(z) {
                    elements.insert(z);
                    frontier.push(z);
                }
            }
        }
    }
    Subgroup {
        elements,
        generators: gens,
    }
}

/// `rad(X) = {g : g + X = X}`.
pub fn radical(g: &Group, x: ElemSet) -> Result<Subgroup> {
    if x.is_empty() {
        return Err(invalid("radical of the empty set"));
    }
    let elems: ElemSet = (0..g.order()).filter(|&h| g.translate(x, h) == x).collect();
    Ok(generate_subgroup(g, elems.iter()))
}

/// Every subgroup of `G`, each once, sorted by order and then by element list.
pub fn subgroup_lattice(g: &Group) -> Result<Vec<Subgroup>> {
    subgroup_lattice_bounded(g, DEFAULT_ORDER_BOUND)
}

pub fn subgroup_lattice_bounded(g: &Group, bound: usize) -> Result<Vec<Subgroup>> {
    if g.order() > bound {
        return Err(Error::BudgetExceeded(format!(
            "subgroup lattice of a group of order {} (bound {bound})",
            g.order()
        )));
    }
    let mut cyclic: Vec<Subgroup> = Vec::new();
    let mut seen: HashSet<ElemSet> = HashSet::new();
    for x in 0..g.order() {
        let h = generate_subgroup(g, [x]);
        if seen.insert(h.elements) {
            cyclic.push(h);
        }
    }
    let mut all = cyclic.clone();
    let mut i = 0;
    while i < all.len() {
        let h = all[i].clone();
        for c in &cyclic {
            if c.elements.is_subset(h.elements) {
                continue;
            }
            let j = h.join(g, c);
            if seen.insert(j.elements) {
                all.push(j);
            }
        }
        i += 1;
    }
    all.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.to_vec().cmp(&b.to_vec()))
    });
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_closed(g: &Group, s: ElemSet) -> bool {
        s.contains(0)
            && s.iter()
                .all(|a| s.contains(g.neg(a)) && s.iter().all(|b| s.contains(g.add(a, b))))
    }

    #[test]
    fn generate_examples() {
        let c4 = Group::cyclic(4).unwrap();
        assert_eq!(generate_subgroup(&c4, [1]).order(), 4);
        let g = Group::new(&[4, 3, 3]).unwrap();
        assert_eq!(generate_subgroup(&g, []).elements, ElemSet::singleton(0));
        let x = g.index(&[2, 1, 0]).unwrap();
        // closure by repeated addition
        let mut multiples = ElemSet::EMPTY;
        let mut y = 0;
        loop {
            multiples.insert(y);
            y = g.add(y, x);
            if y == 0 {
                break;
            }
        }
        assert_eq!(multiples.len(), 6);
        assert_eq!(generate_subgroup(&g, [x]).elements, multiples);
    }

    #[test]
    fn radical_examples() {
        let c4 = Group::cyclic(4).unwrap();
        let x: ElemSet = [1usize, 3].into_iter().collect();
        assert_eq!(radical(&c4, x).unwrap().to_vec(), vec![0, 2]);
        assert_eq!(
            radical(&c4, ElemSet::singleton(1)).unwrap().to_vec(),
            vec![0]
        );
        assert!(radical(&c4, ElemSet::EMPTY).is_err());

        let g = Group::new(&[4, 3, 3]).unwrap();
        let h = generate_subgroup(&g, [3, 1]);
        let c = g.index(&[1, 0, 0]).unwrap();
        let coset = h.coset(&g, c);
        let brute: ElemSet = (0..36)
            .filter(|&t| g.translate(coset, t) == coset)
            .collect();
        assert_eq!(brute.len(), 9);
        assert_eq!(radical(&g, coset).unwrap().elements, brute);
    }

    #[test]
    fn lattice_examples() {
        let c4 = Group::cyclic(4).unwrap();
        let lat = subgroup_lattice(&c4).unwrap();
        let sets: Vec<Vec<usize>> = lat.iter().map(|h| h.to_vec()).collect();
        assert_eq!(sets, vec![vec![0], vec![0, 2], vec![0, 1, 2, 3]]);

        // brute force: closed subsets of C3^2
        let g = Group::new(&[3, 3]).unwrap();
        let brute = (0u32..1 << 9)
            .filter(|m| is_closed(&g, ElemSet::from_bits(*m as u128)))
            .count();
        assert_eq!(brute, 6);
        assert_eq!(subgroup_lattice(&g).unwrap().len(), brute);

        let g = Group::new(&[4, 3, 3]).unwrap();
        let order2 = subgroup_lattice(&g)
            .unwrap()
            .into_iter()
            .filter(|h| h.order() == 2)
            .count();
        assert_eq!(order2, 1);
    }

    #[test]
    fn lattice_respects_bound() {
        let g = Group::new(&[4, 5, 5]).unwrap();
        assert!(matches!(
            subgroup_lattice(&g),
            Err(Error::BudgetExceeded(_))
        ));
        assert_eq!(subgroup_lattice_bounded(&g, 128).unwrap().len(), 3 * 8);
    }

    #[test]
    fn lattice_is_lagrange_and_closed() {
        for f in [&[2usize, 2, 2][..], &[4, 2], &[12], &[4, 3, 3]] {
            let g = Group::new(f).unwrap();
            for h in subgroup_lattice(&g).unwrap() {
                assert!(is_closed(&g, h.elements));
                assert_eq!(g.order() % h.order(), 0);
            }
        }
    }

    proptest! {
        #[test]
        fn radical_is_subgroup_inside_difference_closure(mask in 1u64..(1u64 << 36)) {
            let g = Group::new(&[4, 3, 3]).unwrap();
            let x = ElemSet::from_bits(mask as u128);
            let r = radical(&g, x).unwrap();
            prop_assert!(is_closed(&g, r.elements));
            for h in r.elements {
                prop_assert_eq!(g.translate(x, h), x);
            }
            // rad(X) lies in <X - X>
            let diffs: ElemSet = x.iter().flat_map(|a| x.iter().map(move |b| (a, b)))
                .map(|(a, b)| g.sub(a, b)).collect();
            prop_assert!(r.elements.is_subset(generate_subgroup(&g, diffs.iter()).elements));
        }
    }
}
