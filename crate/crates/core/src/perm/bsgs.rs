//! Deterministic Schreier–Sims.

use std::collections::HashSet;

use num_bigint::BigUint;

use super::Permutation;

/// One level of a stabilizer chain: the basic orbit of `point` under the
/// strong generators that fix all earlier base points.
#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub point: usize,
    pub gens: Vec<Permutation>,
    /// Basic orbit in discovery order.
    pub orbit: Vec<usize>,
    /// `transversal[b]` maps `point` to `b`.
    pub transversal: Vec<Option<Permutation>>,
    pub inv_transversal: Vec<Option<Permutation>>,
    checked: HashSet<(u32, u32)>,
}

impl Level {
    fn new(degree: usize, point: usize) -> Level {
        let mut transversal = vec![None; degree];
        transversal[point] = Some(Permutation::identity(degree));
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            inv_transversal: transversal.clone(),
            transversal,
            checked: HashSet::new(),
        }
    }

    fn add_gen(&mut self, g: Permutation) {
        self.gens.push(g);
        // Existing transversal entries are kept, so pairs already checked stay valid.
        let mut i = 0;
        while i < self.orbit.len() {
            let b = self.orbit[i];
            for s in &self.gens {
                let c = s.apply(b);
                if self.transversal[c].is_none() {
                    let u = self.transversal[b].as_ref().unwrap().then(s);
                    self.inv_transversal[c] = Some(u.inverse());
                    self.transversal[c] = Some(u);
                    self.orbit.push(c);
                }
            }
            i += 1;
        }
    }
}

/// A base and strong generating set.
#[derive(Debug, Clone)]
pub(crate) struct Bsgs {
    pub degree: usize,
    pub levels: Vec<Level>,
}

impl Bsgs {
    /// Builds a BSGS for `<gens>` whose base starts with `prefix`.
    ///
    /// When `known_order` is given the construction stops as soon as the
    /// basic orbits account for it.
    pub fn build(
        degree: usize,
        gens: &[Permutation],
        prefix: &[usize],
        known_order: Option<&BigUint>,
    ) -> Bsgs {
        let mut bsgs = Bsgs {
            degree,
            levels: prefix.iter().map(|&p| Level::new(degree, p)).collect(),
        };
        let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        if gens.is_empty() {
            return bsgs;
        }
        if bsgs.levels.is_empty() {
            bsgs.levels.push(Level::new(degree, 0));
        }
        for g in &gens {
            let j = match bsgs.levels.iter().position(|l| !g.fixes(l.point)) {
                Some(j) => j,
                None => {
                    bsgs.push_level_for(g);
                    bsgs.levels.len() - 1
                }
            };
            for l in 0..=j {
                bsgs.levels[l].add_gen(g.clone());
            }
        }
        bsgs.complete(known_order);
        bsgs
    }

    fn push_level_for(&mut self, g: &Permutation) {
        let point = (0..self.degree)
            .filter(|&i| !g.fixes(i))
            .min_by_key(|&i| (g.cycle_len(i), i))
            .expect("non-identity permutation moves a point");
        self.levels.push(Level::new(self.degree, point));
    }

    fn complete(&mut self, known_order: Option<&BigUint>) {
        let mut i = self.levels.len() as isize - 1;
        'outer: while i >= 0 {
            if let Some(k) = known_order {
                if &self.order() == k {
                    return;
                }
            }
            let lvl = i as usize;
            let mut oi = 0;
            while oi < self.levels[lvl].orbit.len() {
                let mut si = 0;
                while si < self.levels[lvl].gens.len() {
                    if !self.levels[lvl].checked.insert((oi as u32, si as u32)) {
                        si += 1;
                        continue;
                    }
                    let level = &self.levels[lvl];
                    let b = level.orbit[oi];
                    let s = &level.gens[si];
                    let c = s.apply(b);
                    let h = level.transversal[b]
                        .as_ref()
                        .unwrap()
                        .then(s)
                        .then(level.inv_transversal[c].as_ref().unwrap());
                    let (r, j) = self.sift(h, lvl + 1);
                    if !r.is_identity() {
                        if j == self.levels.len() {
                            self.push_level_for(&r);
                        }
                        for l in lvl + 1..=j {
                            self.levels[l].add_gen(r.clone());
                        }
                        i = j as isize;
                        continue 'outer;
                    }
                    si += 1;
                }
                oi += 1;
            }
            i -= 1;
        }
    }

    /// Strips `g` through levels `start..`; returns the residue and the
    /// level where it left the chain (`levels.len()` if it passed through).
    pub fn sift(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let b = g.apply(level.point);
            match &level.inv_transversal[b] {
                Some(u) => g = g.then(u),
                None => return (g, l),
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.sift(g.clone(), 0).0.is_identity()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * l.orbit.len())
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> = Vec::new();
        let mut seen = HashSet::new();
        for l in &self.levels {
            for g in &l.gens {
                if seen.insert(g.clone()) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    /// The chain from level `from` on, as a BSGS of the pointwise stabilizer
    /// of the first `from` base points.
    pub fn tail(&self, from: usize) -> Bsgs {
        Bsgs {
            degree: self.degree,
            levels: self.levels[from.min(self.levels.len())..].to_vec(),
        }
    }

    /// Every element, as products of transversal elements.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut acc = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(acc.len() * level.orbit.len());
            for x in &acc {
                for b in &level.orbit {
                    next.push(x.then(level.transversal[*b].as_ref().unwrap()));
                }
            }
            acc = next;
        }
        acc.sort();
        acc
    }
}
