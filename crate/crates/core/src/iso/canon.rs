use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{cayley_color_graph, ColorDigraph};
use crate::build::orbit_sring;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::{PermGroup, Permutation};

/// Canonical form of a color digraph: equal for isomorphic inputs and only
/// for them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: usize,
    /// Color matrix of the canonically relabeled digraph, row-major.
    pub matrix: Vec<u32>,
    /// Vertex `v` goes to position `labeling(v)`.
    pub labeling: Permutation,
    /// First 8 bytes of the SHA-256 of the matrix; for bucketing only.
    pub hash: u64,
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.matrix == other.matrix
    }
}

impl Eq for CanonicalForm {}

impl CanonicalForm {
    /// The canonical digraph itself.
    pub fn digraph(&self, palette: u32) -> Result<ColorDigraph> {
        ColorDigraph::new(self.n, palette, self.matrix.clone())
    }

    /// An isomorphism from the digraph of `self` to that of `other`, when
    /// the forms agree.
    pub fn isomorphism_to(&self, other: &CanonicalForm) -> Option<Permutation> {
        (self == other).then(|| self.labeling.then(&other.labeling.inverse()))
    }
}

fn digest(matrix: &[u32]) -> u64 {
    let mut h = Sha256::new();
    for c in matrix {
        h.update(c.to_le_bytes());
    }
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("8 bytes"))
}

/// Exact canonical form by individualization-refinement.
pub fn canonize(d: &ColorDigraph) -> CanonicalForm {
    canonize_with_automorphisms(d).0
}

/// The canonical form together with generators of `Aut(D)`.
pub fn canonize_with_automorphisms(d: &ColorDigraph) -> (CanonicalForm, Vec<Permutation>) {
    let n = d.n();
    if n == 0 {
        let form = CanonicalForm {
            n,
            matrix: Vec::new(),
            labeling: Permutation::identity(0),
            hash: digest(&[]),
        };
        return (form, Vec::new());
    }
    let mut search = Search {
        d,
        n,
        first: None,
        best: None,
        autos: Vec::new(),
    };
    // initial cells by loop color
    let mut by_loop: Vec<(u32, usize)> = (0..n).map(|v| (d.color(v, v), v)).collect();
    by_loop.sort_unstable();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for (i, &(c, v)) in by_loop.iter().enumerate() {
        if i == 0 || by_loop[i - 1].0 != c {
            cells.push(Vec::new());
        }
        cells.last_mut().expect("just pushed").push(v);
    }
    search.node(cells, &mut Vec::new());

    let best = search.best.expect("the search reaches a leaf");
    let mut pos = vec![0; n];
    for (k, &v) in best.order.iter().enumerate() {
        pos[v] = k;
    }
    let form = CanonicalForm {
        n,
        hash: digest(&best.matrix),
        matrix: best.matrix,
        labeling: Permutation::from_images(pos).expect("positions form a permutation"),
    };
    (form, search.autos)
}

/// Generators of `{f : color(i, j) = color(f(i), f(j))}` closed into a group.
pub fn color_automorphisms(d: &ColorDigraph) -> PermGroup {
    let (_, autos) = canonize_with_automorphisms(d);
    PermGroup::generate(d.n(), &autos).expect("automorphisms have the digraph's degree")
}

/// `K^(2) = Aut(V(K, G))`.
pub fn two_closure(k: &PermGroup, g: &Group) -> Result<PermGroup> {
    let a = orbit_sring(g, k)?;
    let closure = color_automorphisms(&cayley_color_graph(&a));
    if !k.is_subgroup_of(&closure) {
        return Err(Error::Internal(
            "K is not contained in its 2-closure".into(),
        ));
    }
    Ok(closure)
}

struct Leaf {
    order: Vec<usize>,
    matrix: Vec<u32>,
    prefix: Vec<usize>,
}

struct Search<'a> {
    d: &'a ColorDigraph,
    n: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    autos: Vec<Permutation>,
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Search<'_> {
    /// Splits cells by the multiset of (cell, out-color, in-color) over all
    /// vertices until the partition is equitable.
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let n = self.n;
        let p = self.d.palette() as u64;
        let mut cell_of = vec![0u64; n];
        loop {
            for (i, c) in cells.iter().enumerate() {
                for &v in c {
                    cell_of[v] = i as u64;
                }
            }
            let mut out: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
            let mut split = false;
            for c in &cells {
                if c.len() == 1 {
                    out.push(c.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<u64>, usize)> = c
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<u64> = (0..n)
                            .map(|w| {
                                (cell_of[w] * p + self.d.color(v, w) as u64) * p
                                    + self.d.color(w, v) as u64
                            })
                            .collect();
                        sig.sort_unstable();
                        (sig, v)
                    })
                    .collect();
                keyed.sort_unstable();
                let start = out.len();
                for (i, (sig, v)) in keyed.iter().enumerate() {
                    if i == 0 || keyed[i - 1].0 != *sig {
                        out.push(Vec::new());
                    }
                    out.last_mut().expect("just pushed").push(*v);
                }
                if out.len() - start > 1 {
                    split = true;
                }
            }
            cells = out;
            if !split {
                return cells;
            }
        }
    }

    /// Explores the subtree below `cells`. Returns `Some(level)` when the
    /// search should resume at the node with prefix length `level`.
    fn node(&mut self, cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) -> Option<usize> {
        let cells = self.refine(cells);
        if cells.len() == self.n {
            return self.leaf(cells.into_iter().map(|c| c[0]).collect(), prefix);
        }
        let (target, _) = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .expect("a non-singleton cell");
        let mut children = cells[target].clone();
        children.sort_unstable();
        for &v in &children {
            if self.orbit_min(prefix, v) < v {
                continue;
            }
            let mut next = Vec::with_capacity(cells.len() + 1);
            for (i, c) in cells.iter().enumerate() {
                if i == target {
                    next.push(vec![v]);
                    next.push(c.iter().copied().filter(|&w| w != v).collect());
                } else {
                    next.push(c.clone());
                }
            }
            prefix.push(v);
            let jump = self.node(next, prefix);
            prefix.pop();
            if let Some(level) = jump {
                if level < prefix.len() {
                    return Some(level);
                }
            }
        }
        None
    }

    /// Smallest vertex in the orbit of `v` under the known automorphisms
    /// that fix `prefix` pointwise.
    fn orbit_min(&self, prefix: &[usize], v: usize) -> usize {
        let gens: Vec<&Permutation> = self
            .autos
            .iter()
            .filter(|a| prefix.iter().all(|&x| a.fixes(x)))
            .collect();
        if gens.is_empty() {
            return v;
        }
        let mut seen = vec![false; self.n];
        seen[v] = true;
        let mut stack = vec![v];
        let mut min = v;
        while let Some(x) = stack.pop() {
            for a in &gens {
                let y = a.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    min = min.min(y);
                    stack.push(y);
                }
            }
        }
        min
    }

    fn leaf(&mut self, order: Vec<usize>, prefix: &[usize]) -> Option<usize> {
        let n = self.n;
        let mut matrix = Vec::with_capacity(n * n);
        for &i in &order {
            for &j in &order {
                matrix.push(self.d.color(i, j));
            }
        }
        let leaf = Leaf {
            order,
            matrix,
            prefix: prefix.to_vec(),
        };
        let Some(first) = &self.first else {
            self.best = Some(Leaf {
                order: leaf.order.clone(),
                matrix: leaf.matrix.clone(),
                prefix: leaf.prefix.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        if leaf.matrix == first.matrix {
            self.autos.push(map_between(&first.order, &leaf.order));
            return Some(common_prefix(&first.prefix, prefix));
        }
        let best = self.best.as_ref().expect("set with first");
        match leaf.matrix.cmp(&best.matrix) {
            std::cmp::Ordering::Greater => {
                self.best = Some(leaf);
                None
            }
            std::cmp::Ordering::Equal => {
                self.autos.push(map_between(&best.order, &leaf.order));
                Some(common_prefix(&best.prefix, prefix))
            }
            std::cmp::Ordering::Less => None,
        }
    }
}

/// The permutation sending `from[k]` to `to[k]`.
fn map_between(from: &[usize], to: &[usize]) -> Permutation {
    let mut img = vec![0; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        img[a] = b;
    }
    Permutation::from_images(img).expect("leaf orders are permutations")
}
