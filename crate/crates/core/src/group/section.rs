use serde::{Serialize, Serializer};

use super::{generate_subgroup, prime_factors, ElemSet, Group, Subgroup};
use crate::error::{invalid, Error, Result};

/// A section `U/L` of an abelian group together with the canonical
/// epimorphism `pi: U -> U/L`.
///
/// The quotient is presented as a product of cyclic groups of prime-power
/// order (primes ascending, orders descending within a prime).
#[derive(Debug, Clone)]
pub struct Section {
    pub upper: Subgroup,
    pub lower: Subgroup,
    /// `cosets[q]` is the `L`-coset mapped to quotient element `q`.
    pub cosets: Vec<ElemSet>,
    pub quotient: Group,
    project: Vec<Option<usize>>,
}

/// Builds `U/L`. Fails when `L` is not contained in `U`.
pub fn make_section(g: &Group, upper: &Subgroup, lower: &Subgroup) -> Result<Section> {
    if !lower.is_subgroup_of(upper) {
        return Err(invalid(format!(
            "lower subgroup {:?} is not contained in {:?}",
            lower.elements, upper.elements
        )));
    }

    // cosets numbered by first appearance
    let mut coset_id = vec![usize::MAX; g.order()];
    let mut reps: Vec<usize> = Vec::new();
    for u in upper.elements {
        if coset_id[u] == usize::MAX {
            for x in lower.coset(g, u) {
                coset_id[x] = reps.len();
            }
            reps.push(u);
        }
    }
    let n = reps.len();
    let qadd = |a: usize, b: usize| coset_id[g.add(reps[a], reps[b])];
    let qorder = |a: usize| {
        let mut k = 1;
        let mut y = a;
        while y != 0 {
            y = qadd(y, a);
            k += 1;
        }
        k
    };
    let qspan = |gens: &[usize]| -> Vec<bool> {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(y) = stack.pop() {
            for &s in gens {
                let z = qadd(y, s);
                if !seen[z] {
                    seen[z] = true;
                    stack.push(z);
                }
            }
        }
        seen
    };

    // greedy primary decomposition of the quotient
    let mut basis: Vec<(usize, usize)> = Vec::new();
    for p in prime_factors(n) {
        let part: Vec<usize> = (0..n)
            .filter(|&a| prime_factors(qorder(a)).iter().all(|&q| q == p))
            .collect();
        let mut gens: Vec<usize> = Vec::new();
        loop {
            let span = qspan(&gens);
            let span_size = span.iter().filter(|&&b| b).count();
            if part.len() == span_size {
                break;
            }
            // order of a modulo the current span
            let rel_order = |a: usize| {
                let mut k = 1;
                let mut y = a;
                while !span[y] {
                    y = qadd(y, a);
                    k += 1;
                }
                k
            };
            let &best = part
                .iter()
                .max_by_key(|&&a| (rel_order(a), std::cmp::Reverse(a)))
                .expect("nonempty p-part");
            let k = rel_order(best);
            let lifted = (0..n)
                .filter(|&s| span[s])
                .map(|s| qadd(best, s))
                .filter(|&a| qorder(a) == k)
                .min()
                .ok_or_else(|| Error::Internal("no order-preserving lift in quotient".into()))?;
            gens.push(lifted);
            basis.push((lifted, k));
        }
    }

    let factors: Vec<usize> = basis.iter().map(|&(_, k)| k).collect();
    let quotient = Group::new(&factors)?;
    let mut q_to_coset = vec![0usize; n];
    let mut coset_to_q = vec![0usize; n];
    for q in 0..n {
        let mut c = 0;
        for (&coord, &(b, _)) in quotient.coords(q).iter().zip(&basis) {
            for _ in 0..coord {
                c = qadd(c, b);
            }
        }
        q_to_coset[q] = c;
        coset_to_q[c] = q;
    }
    if (0..n).map(|q| q_to_coset[q]).collect::<ElemSet>().len() != n {
        return Err(Error::Internal("quotient basis does not span".into()));
    }
    let cosets = (0..n)
        .map(|q| lower.coset(g, reps[q_to_coset[q]]))
        .collect();
    let project = (0..g.order())
        .map(|x| (coset_id[x] != usize::MAX).then(|| coset_to_q[coset_id[x]]))
        .collect();

    Ok(Section {
        upper: upper.clone(),
        lower: lower.clone(),
        cosets,
        quotient,
        project,
    })
}

impl Section {
    /// `G/L`.
    pub fn of_whole(g: &Group, lower: &Subgroup) -> Result<Section> {
        make_section(g, &Subgroup::whole(g), lower)
    }

    /// `|U/L|`.
    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    /// `pi(x)`, or `None` when `x` lies outside `U`.
    pub fn project(&self, x: usize) -> Option<usize> {
        self.project[x]
    }

    /// `X^pi` for the part of `X` inside `U`.
    pub fn project_set(&self, x: ElemSet) -> ElemSet {
        x.iter().filter_map(|a| self.project[a]).collect()
    }

    /// Full preimage in `U` of a set of quotient elements.
    pub fn preimage(&self, q: ElemSet) -> ElemSet {
        q.iter().fold(ElemSet::EMPTY, |acc, i| acc | self.cosets[i])
    }

    /// Smallest element of the coset mapped to `q`.
    pub fn representative(&self, q: usize) -> usize {
        self.cosets[q].first().expect("cosets are nonempty")
    }

    /// The subgroup of the quotient corresponding to `H` with `L <= H <= U`.
    pub fn project_subgroup(&self, h: &Subgroup) -> Subgroup {
        generate_subgroup(&self.quotient, self.project_set(h.elements).iter())
    }
}

impl Serialize for Section {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Section", 3)?;
        st.serialize_field("upper", &self.upper.elements)?;
        st.serialize_field("lower", &self.lower.elements)?;
        st.serialize_field("quotient", &self.quotient)?;
        st.end()
    }
}
