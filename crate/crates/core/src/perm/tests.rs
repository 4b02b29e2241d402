use std::collections::HashSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::group::{automorphism_group, generate_subgroup, make_section, Subgroup};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Closure by breadth-first multiplication; the oracle for group orders.
fn brute_closure(n: usize, gens: &[Permutation]) -> HashSet<Permutation> {
    let mut seen = HashSet::new();
    let id = Permutation::identity(n);
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::from_images(v).unwrap()
}

fn aut_as_perms(g: &Group) -> Vec<Permutation> {
    automorphism_group(g)
        .unwrap()
        .generators
        .iter()
        .map(|a| Permutation::from_images(a.image_vec()).unwrap())
        .collect()
}

/// `G_r` extended by `Aut(G)`.
fn holomorph(g: &Group) -> PermGroup {
    let mut gens = right_regular(g).generators().to_vec();
    gens.extend(aut_as_perms(g));
    PermGroup::generate(g.order(), &gens).unwrap()
}

fn dihedral4() -> PermGroup {
    // automorphisms of the 4-cycle 0-1-2-3
    let r = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
    let f = Permutation::from_cycles(4, &[&[1, 3]]).unwrap();
    PermGroup::generate(4, &[r, f]).unwrap()
}

/// Every subgroup of a small group, from pairs of elements.
fn brute_subgroups(elements: &[Permutation]) -> Vec<HashSet<Permutation>> {
    let n = elements[0].degree();
    let mut out: Vec<HashSet<Permutation>> = Vec::new();
    for a in elements {
        for b in elements {
            let h = brute_closure(n, &[a.clone(), b.clone()]);
            if !out.contains(&h) {
                out.push(h);
            }
        }
    }
    out
}

fn is_regular_set(h: &HashSet<Permutation>, n: usize) -> bool {
    h.len() == n && h.iter().all(|p| p.is_identity() || p.is_fixed_point_free())
}

fn is_cyclic_set(h: &HashSet<Permutation>) -> bool {
    h.iter().any(|p| p.order() == h.len())
}

#[test]
fn right_regular_examples() {
    let c4 = Group::cyclic(4).unwrap();
    let r = right_regular(&c4);
    assert_eq!(r.order(), big(4));
    assert_eq!(r.degree(), 4);
    let g = Group::new(&[4, 3, 3]).unwrap();
    let r = right_regular(&g);
    assert_eq!(r.order(), big(36));
    for p in r.enumerate(100).unwrap() {
        assert!(p.is_identity() || p.is_fixed_point_free());
    }
    assert!(r.is_regular());
    let c2 = right_regular(&Group::cyclic(2).unwrap());
    let els = c2.enumerate(10).unwrap();
    assert_eq!(
        els,
        vec![
            Permutation::identity(2),
            Permutation::from_images(vec![1, 0]).unwrap()
        ]
    );
}

#[test]
fn close_group_examples() {
    let k = close_group(5, &[], 100).unwrap();
    assert_eq!(k.order(), big(1));
    assert_eq!(k.elements().unwrap().len(), 1);
    let cyc = Permutation::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]).unwrap();
    assert_eq!(close_group(7, &[cyc], 100).unwrap().order(), big(7));
    let g = Group::new(&[3, 3]).unwrap();
    let k = close_group(9, &aut_as_perms(&g), 1000).unwrap();
    assert_eq!(k.order(), big(48));
    assert_eq!(k.elements().unwrap().len(), 48);
    // order cap
    let s = PermGroup::symmetric(14);
    assert!(matches!(
        close_group(14, s.generators(), 10),
        Err(Error::BudgetExceeded(_))
    ));
    assert!(close_group(3, &[Permutation::identity(4)], 1).is_err());
}

#[test]
fn symmetric_groups_have_factorial_order() {
    assert_eq!(
        PermGroup::symmetric(36).order().to_string(),
        "371993326789901217467999448150835200000000"
    );
    for n in 1..=6u64 {
        let s = PermGroup::symmetric(n as usize);
        assert_eq!(s.order(), big((1..=n).product()));
        assert_eq!(
            brute_closure(n as usize, s.generators()).len() as u64,
            (1..=n).product::<u64>()
        );
    }
}

#[test]
fn orbit_examples() {
    let k = PermGroup::trivial(5);
    assert_eq!(k.orbits(None).len(), 5);
    let g = Group::new(&[4, 3, 3]).unwrap();
    assert_eq!(right_regular(&g).orbits(None).len(), 1);
    let c4 = Group::cyclic(4).unwrap();
    let stab = holomorph(&c4).point_stabilizer(0);
    assert_eq!(stab.orbits(None), vec![vec![0], vec![1, 3], vec![2]]);
}

#[test]
fn stabilizer_examples() {
    let g = Group::new(&[4, 3, 3]).unwrap();
    assert!(right_regular(&g).point_stabilizer(0).is_trivial());
    let s3 = PermGroup::symmetric(3);
    assert_eq!(s3.point_stabilizer(0).order(), big(2));
    let aut = PermGroup::generate(36, &aut_as_perms(&g)).unwrap();
    assert_eq!(aut.order(), big(96));
    assert_eq!(aut.point_stabilizer(0).order(), big(96));
    let stab = aut.pointwise_stabilizer(&[0, 1]);
    for p in stab.enumerate(1000).unwrap() {
        assert!(p.fixes(0) && p.fixes(1));
        assert!(aut.contains(&p));
    }
}

#[test]
fn section_action_examples() {
    let c4 = Group::cyclic(4).unwrap();
    let l = generate_subgroup(&c4, [2]);
    let s = make_section(&c4, &Subgroup::whole(&c4), &l).unwrap();
    let induced = induced_section_action(&right_regular(&c4), &s, SECTION_ACTION_BUDGET).unwrap();
    assert_eq!(induced.degree(), 2);
    assert_eq!(induced.order(), big(2));
    let induced =
        induced_section_action(&PermGroup::trivial(4), &s, SECTION_ACTION_BUDGET).unwrap();
    assert!(induced.is_trivial());

    let g = Group::new(&[4, 3, 3]).unwrap();
    let c1 = generate_subgroup(&g, [g.index(&[2, 0, 0]).unwrap()]);
    let s = make_section(&g, &Subgroup::whole(&g), &c1).unwrap();
    let aut = PermGroup::generate(36, &aut_as_perms(&g)).unwrap();
    let induced = induced_section_action(&aut, &s, SECTION_ACTION_BUDGET).unwrap();
    // oracle: project every element directly
    let mut projected = HashSet::new();
    for f in aut.enumerate(1000).unwrap() {
        let img: Vec<usize> = (0..s.order())
            .map(|q| s.project(f.apply(s.representative(q))).unwrap())
            .collect();
        projected.insert(Permutation::from_images(img).unwrap());
    }
    assert_eq!(projected.len(), 48);
    assert_eq!(induced.order(), big(projected.len() as u64));
    assert!(projected.iter().all(|p| induced.contains(p)));

    let budget_hit = induced_section_action(
        &PermGroup::symmetric(8),
        &make_section(
            &Group::cyclic(8).unwrap(),
            &Subgroup::whole(&Group::cyclic(8).unwrap()),
            &generate_subgroup(&Group::cyclic(8).unwrap(), [4]),
        )
        .unwrap(),
        100,
    );
    assert!(matches!(budget_hit, Err(Error::BudgetExceeded(_))));
}

#[test]
fn induced_action_of_regular_group_is_regular_on_quotient() {
    for f in [&[4usize, 3, 3][..], &[4, 2, 2], &[8], &[12]] {
        let g = Group::new(f).unwrap();
        for u in crate::group::subgroup_lattice(&g).unwrap() {
            for l in crate::group::subgroup_lattice(&g)
                .unwrap()
                .iter()
                .filter(|l| l.is_subgroup_of(&u))
            {
                let s = make_section(&g, &u, l).unwrap();
                let induced =
                    induced_section_action(&right_regular(&g), &s, SECTION_ACTION_BUDGET).unwrap();
                assert!(
                    induced.is_regular(),
                    "{g} {:?}/{:?}",
                    u.elements,
                    l.elements
                );
                // it is the regular action of the quotient
                let rq = right_regular(&s.quotient);
                assert!(rq.is_subgroup_of(&induced) && induced.is_subgroup_of(&rq));
            }
        }
    }
}

#[test]
fn regular_subgroups_examples() {
    let g = Group::new(&[4, 3, 3]).unwrap();
    let gr = right_regular(&g);
    let found = regular_subgroups(&gr, &g, SearchBudget::default()).unwrap();
    assert!(found.complete);
    assert_eq!(found.groups.len(), 1);
    assert!(found.groups[0].is_subgroup_of(&gr));

    let c4 = Group::cyclic(4).unwrap();
    let d8 = dihedral4();
    assert_eq!(d8.order(), big(8));
    let els = d8.enumerate(100).unwrap();
    let brute = brute_subgroups(&els)
        .into_iter()
        .filter(|h| is_regular_set(h, 4) && is_cyclic_set(h))
        .count();
    assert_eq!(brute, 1);
    assert_eq!(
        regular_subgroups(&d8, &c4, SearchBudget::default())
            .unwrap()
            .groups
            .len(),
        brute
    );

    let s4 = PermGroup::symmetric(4);
    let els = s4.enumerate(100).unwrap();
    let subs = brute_subgroups(&els);
    let klein = Group::new(&[2, 2]).unwrap();
    let brute_klein = subs
        .iter()
        .filter(|h| is_regular_set(h, 4) && !is_cyclic_set(h))
        .count();
    let brute_c4 = subs
        .iter()
        .filter(|h| is_regular_set(h, 4) && is_cyclic_set(h))
        .count();
    assert_eq!(brute_klein, 1);
    assert_eq!(brute_c4, 3);
    assert_eq!(
        regular_subgroups(&s4, &klein, SearchBudget::default())
            .unwrap()
            .groups
            .len(),
        brute_klein
    );
    assert_eq!(
        regular_subgroups(&s4, &c4, SearchBudget::default())
            .unwrap()
            .groups
            .len(),
        brute_c4
    );

    let tiny = regular_subgroups(
        &PermGroup::symmetric(6),
        &Group::cyclic(6).unwrap(),
        SearchBudget { nodes: 3 },
    )
    .unwrap();
    assert!(!tiny.complete);
}

#[test]
fn regular_subgroups_match_brute_force_in_holomorphs() {
    for f in [&[6usize][..], &[2, 2], &[8], &[2, 4]] {
        let g = Group::new(f).unwrap();
        let k = holomorph(&g);
        let els = k.enumerate(10_000).unwrap();
        let brute: Vec<_> = brute_subgroups(&els)
            .into_iter()
            .filter(|h| is_regular_set(h, g.order()))
            .filter(|h| {
                let mut counts = vec![0usize; g.order() + 1];
                for p in h {
                    counts[p.order()] += 1;
                }
                counts == g.order_profile()
            })
            .collect();
        let found = regular_subgroups(&k, &g, SearchBudget::default()).unwrap();
        assert!(found.complete);
        assert_eq!(found.groups.len(), brute.len(), "{g}");
        for r in &found.groups {
            assert!(r.is_regular());
            assert!(r.is_subgroup_of(&k));
        }
    }
}

#[test]
fn conjugacy_examples() {
    let c4 = Group::cyclic(4).unwrap();
    let gr = right_regular(&c4);
    let d8 = dihedral4();
    match conjugate_subgroup_search(&d8, &gr, &gr, SearchBudget::default()).unwrap() {
        ConjugacyOutcome::Found(k) => assert!(gr.conjugate(&k).is_subgroup_of(&gr)),
        other => panic!("{other:?}"),
    }
    let refl = PermGroup::generate(4, &[Permutation::from_cycles(4, &[&[1, 3]]).unwrap()]).unwrap();
    // oracle: no element of D8 conjugates the reflection into the rotations
    for k in d8.enumerate(100).unwrap() {
        assert!(!gr.contains(&refl.generators()[0].conjugate_by(&k)));
    }
    assert_eq!(
        conjugate_subgroup_search(&d8, &refl, &gr, SearchBudget::default()).unwrap(),
        ConjugacyOutcome::NotFound
    );

    let s4 = PermGroup::symmetric(4);
    let regs = regular_subgroups(&s4, &c4, SearchBudget::default())
        .unwrap()
        .groups;
    let (a, b) = (&regs[0], &regs[1]);
    match conjugate_subgroup_search(&s4, a, b, SearchBudget::default()).unwrap() {
        ConjugacyOutcome::Found(k) => {
            assert!(s4.contains(&k));
            assert!(a.conjugate(&k).is_subgroup_of(b));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(
        conjugate_subgroup_search(
            &PermGroup::symmetric(8),
            &PermGroup::trivial(8),
            &PermGroup::trivial(8),
            SearchBudget { nodes: 0 }
        )
        .unwrap(),
        ConjugacyOutcome::Undecided
    );
}

#[test]
fn serde_round_trip_reverifies_order() {
    let k = dihedral4();
    let json = serde_json::to_string(&k).unwrap();
    let back: PermGroup = serde_json::from_str(&json).unwrap();
    assert_eq!(back.order(), big(8));
    let forged = json.replace("\"8\"", "\"9\"");
    assert!(serde_json::from_str::<PermGroup>(&forged).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schreier_sims_matches_closure(seed in any::<u64>(), n in 1usize..8, ngens in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Permutation> = (0..ngens).map(|_| random_perm(&mut rng, n)).collect();
        let k = PermGroup::generate(n, &gens).unwrap();
        let closure = brute_closure(n, &gens);
        prop_assert_eq!(k.order(), big(closure.len() as u64));
        for p in &closure {
            prop_assert!(k.contains(p));
        }
        let outsider = random_perm(&mut rng, n);
        prop_assert_eq!(k.contains(&outsider), closure.contains(&outsider));
        let mut els = k.enumerate(10_000).unwrap();
        let mut brute: Vec<_> = closure.into_iter().collect();
        brute.sort();
        els.dedup();
        prop_assert_eq!(els, brute);
    }

    #[test]
    fn order_independent_of_generator_order(seed in any::<u64>(), n in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gens: Vec<Permutation> = (0..rng.gen_range(1..4)).map(|_| random_perm(&mut rng, n)).collect();
        let a = PermGroup::generate(n, &gens).unwrap();
        gens.shuffle(&mut rng);
        gens.reverse();
        let b = PermGroup::generate(n, &gens).unwrap();
        prop_assert_eq!(a.order(), b.order());
    }

    #[test]
    fn orbit_stabilizer(seed in any::<u64>(), n in 1usize..12, pt in 0usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Permutation> = (0..rng.gen_range(0..3)).map(|_| random_perm(&mut rng, n)).collect();
        let k = PermGroup::generate(n, &gens).unwrap();
        let pt = pt % n;
        let stab = k.point_stabilizer(pt);
        prop_assert_eq!(k.order(), stab.order() * k.orbit(pt).len());
        for g in stab.generators() {
            prop_assert!(g.fixes(pt));
            prop_assert!(k.contains(g));
        }
    }
}
