//! Finite abelian groups given as direct products of cyclic factors.
//!
//! Elements are addressed by a dense mixed-radix index: for factor orders
//! `[n_0, ..., n_{k-1}]` the element with coordinates `(c_0, ..., c_{k-1})`
//! has index `c_0 * (n_1 ... n_{k-1}) + ... + c_{k-1}`, so the last factor
//! varies fastest. The group operation is written additively.

mod automorphism;
mod elemset;
mod section;
mod subgroup;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

pub use automorphism::{
    automorphism_group, automorphism_group_bounded, coset_order_lift, shared_automorphism_group,
    AutomorphismGroup, GroupAutomorphism,
};
pub use elemset::{ElemSet, ElemSetIter, MAX_ORDER};
pub use section::{make_section, Section};
pub use subgroup::{
    generate_subgroup, radical, subgroup_lattice, subgroup_lattice_bounded, Subgroup,
};

/// Default bound on `|G|` for operations that enumerate subgroups or automorphisms.
pub const DEFAULT_ORDER_BOUND: usize = 64;

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub(crate) fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

/// Wire form of a group: `{"factors":[4,3,3]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub factors: Vec<usize>,
}

struct Inner {
    factors: Vec<usize>,
    order: usize,
    strides: Vec<usize>,
    add: Vec<u8>,
    neg: Vec<u8>,
    orders: Vec<u8>,
}

/// A finite abelian group `C_{n_0} x ... x C_{n_{k-1}}` with precomputed tables.
///
/// Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct Group {
    inner: Arc<Inner>,
}

impl Group {
    /// Builds the direct product of cyclic groups of the given orders.
    ///
    /// An empty factor list is the trivial group.
    pub fn new(factors: &[usize]) -> Result<Group> {
        if let Some(&f) = factors.iter().find(|&&f| f < 2) {
            return Err(invalid(format!("factor order {f} is below 2")));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &f| acc.checked_mul(f))
            .filter(|&n| n <= MAX_ORDER)
            .ok_or_else(|| invalid(format!("group order exceeds {MAX_ORDER}")))?;

        let mut strides = vec![1; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1];
        }
        let coords_of = |x: usize| -> Vec<usize> {
            factors
                .iter()
                .zip(&strides)
                .map(|(&f, &s)| (x / s) % f)
                .collect()
        };
        let index_of = |c: &[usize]| -> usize { c.iter().zip(&strides).map(|(a, s)| a * s).sum() };

        let coords: Vec<Vec<usize>> = (0..order).map(coords_of).collect();
        let mut add = vec![0u8; order * order];
        for a in 0..order {
            for b in 0..order {
                let c: Vec<usize> = coords[a]
                    .iter()
                    .zip(&coords[b])
                    .zip(factors)
                    .map(|((x, y), f)| (x + y) % f)
                    .collect();
                add[a * order + b] = index_of(&c) as u8;
            }
        }
        let neg = (0..order)
            .map(|a| {
                let c: Vec<usize> = coords[a]
                    .iter()
                    .zip(factors)
                    .map(|(x, f)| (f - x) % f)
                    .collect();
                index_of(&c) as u8
            })
            .collect();
        let orders = (0..order)
            .map(|a| {
                coords[a]
                    .iter()
                    .zip(factors)
                    .map(|(&x, &f)| f / gcd(x, f))
                    .fold(1, lcm) as u8
            })
            .collect();

        Ok(Group {
            inner: Arc::new(Inner {
                factors: factors.to_vec(),
                order,
                strides,
                add,
                neg,
                orders,
            }),
        })
    }

    pub fn cyclic(n: usize) -> Result<Group> {
        if n == 1 {
            Group::new(&[])
        } else {
            Group::new(&[n])
        }
    }

    pub fn trivial() -> Group {
        Group::new(&[]).expect("trivial group")
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Group> {
        Group::new(&spec.factors)
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec {
            factors: self.inner.factors.clone(),
        }
    }

    pub fn factors(&self) -> &[usize] {
        &self.inner.factors
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Every element, `{0, ..., |G|-1}`.
    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.order())
    }

    /// `G^#`, the non-identity elements.
    pub fn nonidentity(&self) -> ElemSet {
        self.all() - ElemSet::singleton(0)
    }

    pub fn index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.inner.factors.len() {
            return Err(invalid(format!(
                "expected {} coordinates, got {}",
                self.inner.factors.len(),
                coords.len()
            )));
        }
        let mut idx = 0;
        for ((&c, &f), &s) in coords
            .iter()
            .zip(&self.inner.factors)
            .zip(&self.inner.strides)
        {
            if c >= f {
                return Err(invalid(format!(
                    "coordinate {c} out of range for factor {f}"
                )));
            }
            idx += c * s;
        }
        Ok(idx)
    }

    pub fn coords(&self, x: usize) -> Vec<usize> {
        self.inner
            .factors
            .iter()
            .zip(&self.inner.strides)
            .map(|(&f, &s)| (x / s) % f)
            .collect()
    }

    /// The generator of the `i`-th cyclic factor.
    pub fn basis(&self) -> Vec<usize> {
        self.inner.strides.clone()
    }

    pub fn element(&self, x: usize) -> Element<'_> {
        assert!(x < self.order(), "element index out of range");
        Element {
            group: self,
            index: x,
        }
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.inner.add[a * self.inner.order + b] as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.inner.neg[a] as usize
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `x^m` in multiplicative notation; negative `m` allowed.
    pub fn pow(&self, x: usize, m: i64) -> usize {
        let k = self.elem_order(x) as i64;
        let e = m.rem_euclid(k) as usize;
        let mut acc = 0;
        for _ in 0..e {
            acc = self.add(acc, x);
        }
        acc
    }

    /// `|x|`.
    #[inline]
    pub fn elem_order(&self, x: usize) -> usize {
        self.inner.orders[x] as usize
    }

    pub fn exponent(&self) -> usize {
        self.inner.factors.iter().copied().fold(1, lcm)
    }

    /// True when the group is cyclic, i.e. the factor orders are pairwise coprime.
    pub fn is_cyclic(&self) -> bool {
        self.exponent() == self.order()
    }

    /// Membership in the class of abelian groups whose Sylow subgroups are
    /// elementary abelian or isomorphic to `C_4`.
    pub fn in_class_ec(&self) -> bool {
        for p in prime_factors(self.order()) {
            let mut exps = Vec::new();
            for &f in self.factors() {
                let mut e = 0;
                let mut g = f;
                while g % p == 0 {
                    g /= p;
                    e += 1;
                }
                if e > 0 {
                    exps.push(e);
                }
            }
            let elementary = exps.iter().all(|&e| e == 1);
            let c4 = p == 2 && exps == [2];
            if !(elementary || c4) {
                return false;
            }
        }
        true
    }

    /// Primary invariants: orders of cyclic factors of prime-power order, sorted.
    pub fn primary_invariants(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &f in self.factors() {
            for p in prime_factors(f) {
                let mut q = 1;
                let mut g = f;
                while g % p == 0 {
                    g /= p;
                    q *= p;
                }
                out.push(q);
            }
        }
        out.sort_unstable();
        out
    }

    /// Abstract isomorphism test between abelian groups.
    pub fn is_isomorphic(&self, other: &Group) -> bool {
        self.primary_invariants() == other.primary_invariants()
    }

    /// Number of elements of each order `d`, indexed by `d`.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut prof = vec![0; self.order() + 1];
        for x in 0..self.order() {
            prof[self.elem_order(x)] += 1;
        }
        prof
    }

    /// `X + g`.
    pub fn translate(&self, set: ElemSet, g: usize) -> ElemSet {
        set.iter().map(|x| self.add(x, g)).collect()
    }

    /// `X^{-1}`.
    pub fn inverse_set(&self, set: ElemSet) -> ElemSet {
        set.iter().map(|x| self.neg(x)).collect()
    }

    /// `X^{(m)} = {x^m : x in X}`.
    pub fn power_set(&self, set: ElemSet, m: i64) -> ElemSet {
        set.iter().map(|x| self.pow(x, m)).collect()
    }

    /// `XY = {x + y}`.
    pub fn product_set(&self, a: ElemSet, b: ElemSet) -> ElemSet {
        let mut out = ElemSet::EMPTY;
        for x in a {
            out = out | self.translate(b, x);
        }
        out
    }

    /// Integers `m` in `[1, exp)` coprime to `|G|`, where `exp` is the exponent.
    pub fn units(&self) -> Vec<i64> {
        let e = self.exponent();
        if e == 1 {
            return vec![1];
        }
        (1..e)
            .filter(|&m| gcd(m, self.order()) == 1)
            .map(|m| m as i64)
            .collect()
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Group) -> bool {
        self.inner.factors == other.inner.factors
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group{:?}", self.inner.factors)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.factors.is_empty() {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self.inner.factors.iter().map(|n| format!("C{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = GroupSpec::deserialize(deserializer)?;
        Group::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

/// A group element with access to its owning group.
#[derive(Clone, Copy)]
pub struct Element<'g> {
    group: &'g Group,
    index: usize,
}

impl<'g> Element<'g> {
    pub fn index(self) -> usize {
        self.index
    }

    pub fn coords(self) -> Vec<usize> {
        self.group.coords(self.index)
    }

    pub fn order(self) -> usize {
        self.group.elem_order(self.index)
    }

    pub fn inverse(self) -> Element<'g> {
        Element {
            group: self.group,
            index: self.group.neg(self.index),
        }
    }
}

impl<'g> std::ops::Add for Element<'g> {
    type Output = Element<'g>;
    fn add(self, rhs: Element<'g>) -> Element<'g> {
        Element {
            group: self.group,
            index: self.group.add(self.index, rhs.index),
        }
    }
}

impl PartialEq for Element<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.group == other.group
    }
}

impl fmt::Debug for Element<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}
