//! Canonical labeling of colored digraphs and CI testing.
//!
//! Cayley digraphs and the basic-relation graphs of S-rings are encoded as
//! complete color matrices. [`canonize`] computes an exact canonical form by
//! individualization-refinement; the automorphisms found along the way give
//! `Aut(A)` and 2-closures. The CI tests build on the Cayley-representation
//! search of [`crate::perm`].

mod canon;
mod ci;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::group::{ElemSet, Group};
use crate::perm::Permutation;
use crate::sring::SRing;

pub use canon::{
    canonize, canonize_with_automorphisms, color_automorphisms, two_closure, CanonicalForm,
};
pub use ci::{
    cayley_iso, ci_sring, ci_subset, family_member_minimal, g_complete_leq, min_family_elements,
    CiMethod, CiStatus, CiVerdict, Decision, MemberVerdict, MinFamily, NonCiWitness,
    ORBIT_CENSUS_MAX_ORDER,
};

/// Largest vertex count accepted by the canonizer.
pub const MAX_VERTICES: usize = 128;

/// A complete digraph on `n` vertices whose arcs (loops included) carry
/// colors `0..palette`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorDigraph {
    n: usize,
    palette: u32,
    color: Vec<u32>,
}

impl ColorDigraph {
    /// `color` is the row-major `n × n` matrix. Every entry must be below `palette`.
    pub fn new(n: usize, palette: u32, color: Vec<u32>) -> Result<ColorDigraph> {
        if n > MAX_VERTICES {
            return Err(invalid(format!(
                "{n} vertices exceed the limit {MAX_VERTICES}"
            )));
        }
        if color.len() != n * n {
            return Err(invalid(format!("{} entries for {n} vertices", color.len())));
        }
        if let Some(c) = color.iter().find(|&&c| c >= palette) {
            return Err(invalid(format!(
                "color {c} outside the palette 0..{palette}"
            )));
        }
        Ok(ColorDigraph { n, palette, color })
    }

    pub fn from_fn(
        n: usize,
        palette: u32,
        f: impl Fn(usize, usize) -> u32,
    ) -> Result<ColorDigraph> {
        let color = (0..n * n).map(|k| f(k / n, k % n)).collect();
        ColorDigraph::new(n, palette, color)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }

    pub fn color(&self, i: usize, j: usize) -> u32 {
        self.color[i * self.n + j]
    }

    pub fn matrix(&self) -> &[u32] {
        &self.color
    }

    /// The digraph with vertex `i` renamed to `p(i)`.
    pub fn relabel(&self, p: &Permutation) -> ColorDigraph {
        let n = self.n;
        let mut color = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                color[p.apply(i) * n + p.apply(j)] = self.color[i * n + j];
            }
        }
        ColorDigraph {
            n,
            palette: self.palette,
            color,
        }
    }

    /// `color(i, j) = color(p(i), p(j))` for all `i, j`.
    pub fn is_automorphism(&self, p: &Permutation) -> bool {
        p.degree() == self.n && self.is_isomorphism(self, p)
    }

    /// `p` maps `self` onto `other` color by color.
    pub fn is_isomorphism(&self, other: &ColorDigraph, p: &Permutation) -> bool {
        let n = self.n;
        n == other.n
            && p.degree() == n
            && (0..n)
                .all(|i| (0..n).all(|j| self.color(i, j) == other.color(p.apply(i), p.apply(j))))
    }
}

/// The basic-relation graph of `A`: `color[g][h]` is the index of the class
/// containing `h - g`.
pub fn cayley_color_graph(a: &SRing) -> ColorDigraph {
    let g = a.group();
    ColorDigraph::from_fn(g.order(), a.rank() as u32, |x, y| {
        a.class_of(g.sub(y, x)) as u32
    })
    .expect("group order within the vertex limit")
}

/// `Cay(G, S)`: color 1 on arcs `(g, s + g)`, color 0 elsewhere.
pub fn cayley_digraph(g: &Group, s: ElemSet) -> ColorDigraph {
    ColorDigraph::from_fn(g.order(), 2, |x, y| s.contains(g.sub(y, x)) as u32)
        .expect("group order within the vertex limit")
}
