//! Runtime checks of the classical S-ring lemmas. Each function computes
//! the object in question and returns a property violation if the expected
//! conclusion fails, which can only happen for an invalid S-ring.

use serde::{Deserialize, Serialize};

use super::SRing;
use crate::error::{invalid, Error, Result};
use crate::group::{gcd, generate_subgroup, is_prime, radical, ElemSet, Group, Subgroup};

/// Outcome of [`SRing::separat_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatVerdict {
    Holds,
    NotApplicable,
}

/// `X^(m) = X` for every `m` coprime to `|G|`.
pub fn is_rational(g: &Group, x: ElemSet) -> bool {
    g.units().into_iter().all(|m| g.power_set(x, m) == x)
}

impl SRing {
    /// `X^(m)` for the basic set with index `x`; it must be a basic set again.
    pub fn power_map_classes(&self, x: usize, m: i64) -> Result<ElemSet> {
        let n = self.group().order();
        if gcd(m.unsigned_abs() as usize, n) != 1 {
            return Err(invalid(format!("multiplier {m} is not coprime to {n}")));
        }
        let image = self.group().power_set(self.classes()[x], m);
        if !self.is_basic(image) {
            return Err(Error::PropertyViolation(format!(
                "X^({m}) = {image:?} is not a basic set (X = {:?})",
                self.classes()[x]
            )));
        }
        Ok(image)
    }

    /// `X^[p] = {x^p : x in X, |X ∩ Hx| ≢ 0 mod p}` with `H = {g : g^p = e}`;
    /// it must be an A-set.
    pub fn sylow_power_set(&self, x: ElemSet, p: usize) -> Result<ElemSet> {
        let g = self.group();
        if !is_prime(p) || g.order() % p != 0 {
            return Err(invalid(format!(
                "{p} is not a prime divisor of {}",
                g.order()
            )));
        }
        if !self.is_a_set(x) {
            return Err(invalid(format!("{x:?} is not an A-set")));
        }
        let h: ElemSet = (0..g.order())
            .filter(|&a| g.pow(a, p as i64) == 0)
            .collect();
        let out: ElemSet = x
            .iter()
            .filter(|&a| (x & g.translate(h, a)).len() % p != 0)
            .map(|a| g.pow(a, p as i64))
            .collect();
        if !self.is_a_set(out) {
            return Err(Error::PropertyViolation(format!(
                "X^[{p}] = {out:?} is not an A-set (X = {x:?})"
            )));
        }
        Ok(out)
    }

    /// The common value of `|X ∩ Hx|` over `x in X`.
    pub fn intersection_numbers(&self, h: &Subgroup, x: usize) -> Result<usize> {
        if !self.is_a_subgroup(h) {
            return Err(invalid(format!("{:?} is not an A-subgroup", h.elements)));
        }
        let g = self.group();
        let class = self.classes()[x];
        let mut values = class.iter().map(|a| (class & h.coset(g, a)).len());
        let first = values.next().expect("classes are nonempty");
        if values.any(|v| v != first) {
            return Err(Error::PropertyViolation(format!(
                "|X ∩ Hx| is not constant on X = {class:?} for H = {:?}",
                h.elements
            )));
        }
        Ok(first)
    }

    /// When `X ∩ H` and `X \ H` are nonempty and `<X ∩ H> <= rad(X \ H)`,
    /// checks `X = <X> \ rad(X)` and `rad(X) <= H`.
    pub fn separat_check(&self, x: usize, h: &Subgroup) -> Result<SeparatVerdict> {
        let g = self.group();
        let class = self.classes()[x];
        let inside = class & h.elements;
        let outside = class - h.elements;
        if inside.is_empty() || outside.is_empty() {
            return Ok(SeparatVerdict::NotApplicable);
        }
        let span_inside = generate_subgroup(g, inside.iter());
        let rad_outside = radical(g, outside)?;
        if !span_inside.is_subgroup_of(&rad_outside) {
            return Ok(SeparatVerdict::NotApplicable);
        }
        let span = generate_subgroup(g, class.iter());
        let rad = radical(g, class)?;
        if class != span.elements - rad.elements || !rad.is_subgroup_of(h) {
            return Err(Error::PropertyViolation(format!(
                "separation fails for X = {class:?}, H = {:?}",
                h.elements
            )));
        }
        Ok(SeparatVerdict::Holds)
    }

    /// Every basic set has `p`-power size. `G` must be a `p`-group.
    pub fn is_p_sring(&self, p: usize) -> Result<bool> {
        let n = self.group().order();
        if !is_prime(p) || !is_power_of(n, p) {
            return Err(invalid(format!("{} is not a {p}-group", self.group())));
        }
        Ok(self.classes().iter().all(|c| is_power_of(c.len(), p)))
    }
}

pub(crate) fn is_power_of(mut n: usize, p: usize) -> bool {
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}
