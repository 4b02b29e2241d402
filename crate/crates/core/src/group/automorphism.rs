use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{ElemSet, Group, Subgroup, DEFAULT_ORDER_BOUND};
use crate::error::{invalid, Error, Result};

/// Node budget for the generator-image search.
const AUT_SEARCH_BUDGET: usize = 50_000_000;

/// An automorphism of `G`, stored as the image of every element index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupAutomorphism {
    pub image: Vec<u8>,
}

impl GroupAutomorphism {
    pub fn identity(g: &Group) -> GroupAutomorphism {
        GroupAutomorphism {
            image: (0..g.order()).map(|x| x as u8).collect(),
        }
    }

    /// Checks that `image` is a bijective homomorphism of `g`.
    pub fn from_image(g: &Group, image: Vec<usize>) -> Result<GroupAutomorphism> {
        let n = g.order();
        if image.len() != n
            || image.iter().collect::<ElemSet>().len() != n
            || image.iter().any(|&y| y >= n)
        {
            return Err(invalid("automorphism image is not a permutation of G"));
        }
        for a in 0..n {
            for b in 0..n {
                if image[g.add(a, b)] != g.add(image[a], image[b]) {
                    return Err(invalid("automorphism image is not a homomorphism"));
                }
            }
        }
        Ok(GroupAutomorphism {
            image: image.into_iter().map(|y| y as u8).collect(),
        })
    }

    /// The unique automorphism sending `G`'s basis to `images`, if it exists.
    pub fn from_basis_images(g: &Group, images: &[usize]) -> Result<GroupAutomorphism> {
        let image: Vec<usize> = (0..g.order())
            .map(|x| {
                g.coords(x)
                    .iter()
                    .zip(images)
                    .fold(0, |acc, (&c, &y)| g.add(acc, g.pow(y, c as i64)))
            })
            .collect();
        GroupAutomorphism::from_image(g, image)
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    pub fn apply_set(&self, set: ElemSet) -> ElemSet {
        set.iter().map(|x| self.apply(x)).collect()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &GroupAutomorphism) -> GroupAutomorphism {
        GroupAutomorphism {
            image: self
                .image
                .iter()
                .map(|&y| other.image[y as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> GroupAutomorphism {
        let mut inv = vec![0u8; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        GroupAutomorphism { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    pub fn image_vec(&self) -> Vec<usize> {
        self.image.iter().map(|&y| y as usize).collect()
    }
}

/// `Aut(G)` as a full element list plus a generating subset.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    pub group: Group,
    /// All automorphisms, sorted by image vector; the identity comes first.
    pub elements: Vec<GroupAutomorphism>,
    pub generators: Vec<GroupAutomorphism>,
    index: HashMap<Vec<u8>, usize>,
}

impl AutomorphismGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, a: &GroupAutomorphism) -> Option<usize> {
        self.index.get(&a.image).copied()
    }

    /// `table[i][j]` = index of `elements[i]` followed by `elements[j]`.
    pub fn multiplication_table(&self) -> Vec<Vec<u32>> {
        self.elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| self.index[&a.then(b).image] as u32)
                    .collect()
            })
            .collect()
    }

    /// Some `phi` with `S^phi = T`.
    pub fn find_mapping(&self, s: ElemSet, t: ElemSet) -> Option<&GroupAutomorphism> {
        if s.len() != t.len() {
            return None;
        }
        self.elements.iter().find(|a| a.apply_set(s) == t)
    }

    /// Orbit of a set under `Aut(G)`.
    pub fn set_orbit(&self, s: ElemSet) -> Vec<ElemSet> {
        let mut seen: Vec<ElemSet> = self.elements.iter().map(|a| a.apply_set(s)).collect();
        seen.sort();
        seen.dedup();
        seen
    }

    /// The automorphisms fixing every listed set.
    pub fn set_stabilizer(&self, sets: &[ElemSet]) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| sets.iter().all(|&x| self.elements[i].apply_set(x) == x))
            .collect()
    }
}

/// Every automorphism of `G`, found by searching images of the basis
/// elements with matching orders.
pub fn automorphism_group(g: &Group) -> Result<AutomorphismGroup> {
    automorphism_group_bounded(g, DEFAULT_ORDER_BOUND)
}

/// `Aut(G)` for any group within [`MAX_ORDER`](super::MAX_ORDER), memoized per
/// presentation for the lifetime of the process.
pub fn shared_automorphism_group(g: &Group) -> Result<Arc<AutomorphismGroup>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<usize>, Arc<AutomorphismGroup>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(a) = cache.lock().expect("cache lock").get(g.factors()) {
        return Ok(a.clone());
    }
    let a = Arc::new(automorphism_group_bounded(g, super::MAX_ORDER)?);
    cache
        .lock()
        .expect("cache lock")
        .insert(g.factors().to_vec(), a.clone());
    Ok(a)
}

pub fn automorphism_group_bounded(g: &Group, bound: usize) -> Result<AutomorphismGroup> {
    if g.order() > bound {
        return Err(Error::BudgetExceeded(format!(
            "automorphism group of a group of order {} (bound {bound})",
            g.order()
        )));
    }
    let basis = g.basis();
    let factors = g.factors().to_vec();
    let candidates: Vec<Vec<usize>> = factors
        .iter()
        .map(|&n| (0..g.order()).filter(|&y| g.elem_order(y) == n).collect())
        .collect();

    let mut found: Vec<GroupAutomorphism> = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(basis.len());
    let mut nodes = 0usize;
    search(
        g,
        &factors,
        &candidates,
        &mut chosen,
        ElemSet::singleton(0),
        &mut nodes,
        &mut found,
    )?;
    found.sort();

    let index: HashMap<Vec<u8>, usize> = found
        .iter()
        .enumerate()
        .map(|(i, a)| (a.image.clone(), i))
        .collect();
    let generators = greedy_generators(&found);
    Ok(AutomorphismGroup {
        group: g.clone(),
        elements: found,
        generators,
        index,
    })
}

fn search(
    g: &Group,
    factors: &[usize],
    candidates: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    span: ElemSet,
    nodes: &mut usize,
    out: &mut Vec<GroupAutomorphism>,
) -> Result<()> {
    *nodes += 1;
    if *nodes > AUT_SEARCH_BUDGET {
        return Err(Error::BudgetExceeded("automorphism search".into()));
    }
    let k = chosen.len();
    if k == factors.len() {
        if span.len() == g.order() {
            out.push(GroupAutomorphism::from_basis_images(g, chosen)?);
        }
        return Ok(());
    }
    let expected: usize = factors[..=k].iter().product();
    for &y in &candidates[k] {
        // injectivity on <b_0..b_k>: the span must grow by exactly n_k
        let mut next = span;
        let mut shift = span;
        for _ in 1..factors[k] {
            shift = g.translate(shift, y);
            next = next | shift;
        }
        if next.len() != expected {
            continue;
        }
        chosen.push(y);
        search(g, factors, candidates, chosen, next, nodes, out)?;
        chosen.pop();
    }
    Ok(())
}

fn greedy_generators(elements: &[GroupAutomorphism]) -> Vec<GroupAutomorphism> {
    let mut gens: Vec<GroupAutomorphism> = Vec::new();
    let mut closure: HashSet<Vec<u8>> = HashSet::new();
    if let Some(id) = elements.first() {
        closure.insert(id.image.clone());
    }
    for a in elements {
        if closure.contains(&a.image) {
            continue;
        }
        gens.push(a.clone());
        let mut frontier: Vec<GroupAutomorphism> = closure
            .iter()
            .map(|img| GroupAutomorphism { image: img.clone() })
            .collect();
        while let Some(x) = frontier.pop() {
            for s in &gens {
                let y = x.then(s);
                if closure.insert(y.image.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// For `x, y` outside `L` with `|Lx| = |Ly|` in `G/L`, finds `y'` in `Ly`
/// of the same order as `x`. Requires `G` in class E_c and `|x|` an odd
/// prime or 4.
pub fn coset_order_lift(g: &Group, l: &Subgroup, x: usize, y: usize) -> Result<usize> {
    if !g.in_class_ec() {
        return Err(invalid(format!("{g} is not in class E_c")));
    }
    if x >= g.order() || y >= g.order() {
        return Err(invalid("element index out of range"));
    }
    if l.contains(x) || l.contains(y) {
        return Err(invalid("x and y must lie outside L"));
    }
    let k = g.elem_order(x);
    if !(k == 4 || (k % 2 == 1 && super::is_prime(k))) {
        return Err(invalid(format!("|x| = {k} is neither an odd prime nor 4")));
    }
    let coset_order = |a: usize| {
        let mut m = 1;
        let mut z = a;
        while !l.contains(z) {
            z = g.add(z, a);
            m += 1;
        }
        m
    };
    if coset_order(x) != coset_order(y) {
        return Err(invalid("Lx and Ly have different orders in G/L"));
    }
    l.coset(g, y)
        .iter()
        .find(|&z| g.elem_order(z) == k)
        .ok_or_else(|| Error::Internal(format!("no element of order {k} in the coset of {y}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{generate_subgroup, subgroup_lattice, subgroup_lattice_bounded};
    use proptest::prelude::*;

    /// Exhaustive search over all images of the basis, without order filtering.
    fn brute_count(g: &Group) -> usize {
        let basis = g.basis();
        let n = g.order();
        let mut count = 0;
        let total = n.pow(basis.len() as u32);
        for code in 0..total {
            let mut c = code;
            let imgs: Vec<usize> = basis
                .iter()
                .map(|_| {
                    let y = c % n;
                    c /= n;
                    y
                })
                .collect();
            if GroupAutomorphism::from_basis_images(g, &imgs).is_ok() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn counts() {
        let c4 = Group::cyclic(4).unwrap();
        assert_eq!(automorphism_group(&c4).unwrap().order(), 2);
        let g = Group::new(&[3, 3]).unwrap();
        assert_eq!(brute_count(&g), 48);
        assert_eq!(automorphism_group(&g).unwrap().order(), 48);
        let g = Group::new(&[4, 3, 3]).unwrap();
        assert_eq!(brute_count(&g), 96);
        assert_eq!(automorphism_group(&g).unwrap().order(), 96);
        let g = Group::new(&[4, 2, 2]).unwrap();
        assert_eq!(automorphism_group(&g).unwrap().order(), brute_count(&g));
        assert_eq!(automorphism_group(&Group::trivial()).unwrap().order(), 1);
        assert_eq!(
            automorphism_group(&Group::cyclic(8).unwrap())
                .unwrap()
                .order(),
            4
        );
    }

    #[test]
    fn closed_under_composition_and_inverse() {
        for f in [&[4usize, 3, 3][..], &[4, 2, 2], &[8], &[2, 2, 2]] {
            let g = Group::new(f).unwrap();
            let aut = automorphism_group(&g).unwrap();
            assert!(aut.elements[0].is_identity());
            for a in &aut.elements {
                assert!(aut.index_of(&a.inverse()).is_some());
                for b in &aut.elements {
                    assert!(aut.index_of(&a.then(b)).is_some());
                }
            }
            // generators regenerate the group
            assert_eq!(greedy_generators(&aut.elements).len(), aut.generators.len());
            let fact = (1..=g.order()).fold(num_bigint::BigUint::from(1u32), |a, k| a * k);
            assert_eq!(fact % aut.order(), num_bigint::BigUint::from(0u32));
        }
    }

    #[test]
    fn bound_is_enforced() {
        let g = Group::new(&[4, 5, 5]).unwrap();
        assert!(matches!(
            automorphism_group(&g),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn lift_examples() {
        let g = Group::new(&[4, 3, 3]).unwrap();
        let c1 = generate_subgroup(&g, [g.index(&[2, 0, 0]).unwrap()]);
        let x = g.index(&[0, 1, 0]).unwrap();
        let y = g.index(&[2, 0, 1]).unwrap();
        let y2 = coset_order_lift(&g, &c1, x, y).unwrap();
        assert_eq!(g.elem_order(y2), 3);
        assert!(c1.coset(&g, y).contains(y2));

        assert_eq!(coset_order_lift(&g, &Subgroup::trivial(), x, x).unwrap(), x);

        let c = g.index(&[1, 0, 0]).unwrap();
        let z = g.index(&[0, 1, 1]).unwrap();
        let cz = g.add(c, z);
        let h = generate_subgroup(&g, [z]);
        let lifted = coset_order_lift(&g, &h, c, cz).unwrap();
        assert_eq!(g.elem_order(lifted), 4);

        // precondition failures
        assert!(coset_order_lift(&g, &c1, g.index(&[2, 1, 0]).unwrap(), y).is_err());
        assert!(coset_order_lift(&Group::new(&[8]).unwrap(), &Subgroup::trivial(), 2, 2).is_err());
    }

    fn valid_triples(g: &Group, lattice: &[Subgroup]) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (li, l) in lattice.iter().enumerate() {
            for x in 0..g.order() {
                let k = g.elem_order(x);
                if l.contains(x) || !(k == 4 || (k % 2 == 1 && crate::group::is_prime(k))) {
                    continue;
                }
                let rel = |a: usize| {
                    let mut m = 1;
                    let mut z = a;
                    while !l.contains(z) {
                        z = g.add(z, a);
                        m += 1;
                    }
                    m
                };
                for y in 0..g.order() {
                    if !l.contains(y) && rel(x) == rel(y) {
                        out.push((li, x, y));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn lemma_orders_exhaustive_c4_c3_c3() {
        let g = Group::new(&[4, 3, 3]).unwrap();
        let lat = subgroup_lattice(&g).unwrap();
        for (li, x, y) in valid_triples(&g, &lat) {
            coset_order_lift(&g, &lat[li], x, y).unwrap();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn lemma_orders_random(pick in any::<prop::sample::Index>(), which in 0usize..2) {
            let g = if which == 0 { Group::new(&[4, 3, 3]) } else { Group::new(&[4, 5, 5]) }.unwrap();
            let lat = subgroup_lattice_bounded(&g, 128).unwrap();
            let triples = valid_triples(&g, &lat);
            let (li, x, y) = triples[pick.index(triples.len())];
            let y2 = coset_order_lift(&g, &lat[li], x, y).unwrap();
            prop_assert_eq!(g.elem_order(y2), g.elem_order(x));
            prop_assert!(lat[li].coset(&g, y).contains(y2));
        }
    }
}
