use proptest::prelude::*;

use super::*;
use crate::group::{automorphism_group, generate_subgroup, make_section};

fn set(xs: &[usize]) -> ElemSet {
    xs.iter().collect()
}

fn wreath_c4() -> SRing {
    let c4 = Group::cyclic(4).unwrap();
    validate_sring(&c4, vec![set(&[0]), set(&[2]), set(&[1, 3])]).unwrap()
}

/// Orbits of the automorphisms picked by `mask` from `Aut(G)`.
fn cyclotomic_partition(g: &Group, mask: u64) -> Vec<ElemSet> {
    let aut = automorphism_group(g).unwrap();
    let chosen: Vec<_> = aut
        .elements
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
        .map(|(_, a)| a)
        .collect();
    let mut parts: Vec<ElemSet> = Vec::new();
    let mut done = ElemSet::EMPTY;
    for x in 0..g.order() {
        if done.contains(x) {
            continue;
        }
        let mut orbit = ElemSet::singleton(x);
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for a in &chosen {
                let z = a.apply(y);
                if !orbit.contains(z) {
                    orbit.insert(z);
                    stack.push(z);
                }
            }
        }
        done = done | orbit;
        parts.push(orbit);
    }
    parts
}

#[test]
fn validate_examples() {
    let c4 = Group::cyclic(4).unwrap();
    let zg = SRing::group_ring(&c4);
    assert_eq!(zg.rank(), 4);
    assert_eq!(wreath_c4().rank(), 3);
    let bad = validate_sring(&c4, vec![set(&[0]), set(&[1]), set(&[2, 3])]);
    assert!(matches!(bad, Err(Error::Axiom2Violation { .. })));
    let bad = validate_sring(&c4, vec![set(&[0, 2]), set(&[1, 3])]);
    assert!(matches!(bad, Err(Error::Axiom1Violation { .. })));
    let c6 = Group::cyclic(6).unwrap();
    assert!(validate_sring(&c6, vec![set(&[0]), set(&[3]), set(&[1, 5, 2, 4])]).is_ok());
    // {c, c^5}^2 hits c^2 and c^4 but not c^3
    let bad = validate_sring(&c6, vec![set(&[0]), set(&[1, 5]), set(&[2, 3, 4])]);
    assert!(matches!(bad, Err(Error::Axiom3Violation { .. })));
    assert!(validate_sring(&c4, vec![set(&[0]), set(&[1, 3])]).is_err());
    assert!(validate_sring(&c4, vec![set(&[0, 1]), set(&[1, 2, 3])]).is_err());
}

#[test]
fn structure_constant_examples() {
    let c3 = Group::cyclic(3).unwrap();
    let r2 = SRing::rank_two(&c3);
    assert_eq!(r2.row(1, 1), &[2, 1]);

    let w = wreath_c4();
    let x = w.class_index(set(&[1, 3])).unwrap();
    let e = w.class_index(set(&[0])).unwrap();
    let c2 = w.class_index(set(&[2])).unwrap();
    // {c,c3}^2 = e + c2 + c2 + e
    assert_eq!(w.structure_constant(x, x, e), 2);
    assert_eq!(w.structure_constant(x, x, c2), 2);
    assert_eq!(w.structure_constant(x, x, x), 0);

    for a in [SRing::group_ring(&c3), w.clone()] {
        for xi in 0..a.rank() {
            for zi in 0..a.rank() {
                assert_eq!(a.structure_constant(xi, 0, zi), (xi == zi) as u32);
            }
        }
    }

    let mut buf = Vec::new();
    r2.write_structure_constants_csv(&mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "X,Y,Z,c\n0,0,0,1\n0,1,1,1\n1,0,1,1\n1,1,0,2\n1,1,1,1\n"
    );
}

#[test]
fn a_subgroup_examples() {
    let g = Group::new(&[4, 3]).unwrap();
    let zg = SRing::group_ring(&g);
    assert_eq!(
        zg.a_subgroups().len(),
        crate::group::subgroup_lattice(&g).unwrap().len()
    );
    let r2 = SRing::rank_two(&Group::cyclic(3).unwrap());
    let subs: Vec<Vec<usize>> = r2.a_subgroups().iter().map(|h| h.to_vec()).collect();
    assert_eq!(subs, vec![vec![0], vec![0, 1, 2]]);
    let subs: Vec<Vec<usize>> = wreath_c4()
        .a_subgroups()
        .iter()
        .map(|h| h.to_vec())
        .collect();
    assert_eq!(subs, vec![vec![0], vec![0, 2], vec![0, 1, 2, 3]]);
    assert!(wreath_c4().is_a_set(set(&[0, 1, 3])));
    assert!(!wreath_c4().is_a_set(set(&[0, 1])));
}

#[test]
fn quotient_examples() {
    let c4 = Group::cyclic(4).unwrap();
    let l = generate_subgroup(&c4, [2]);
    let s = make_section(&c4, &Subgroup::whole(&c4), &l).unwrap();
    let q = SRing::group_ring(&c4).quotient_sring(&s).unwrap();
    assert_eq!(q, SRing::group_ring(&Group::cyclic(2).unwrap()));
    let q = wreath_c4().quotient_sring(&s).unwrap();
    assert_eq!(q, SRing::group_ring(&Group::cyclic(2).unwrap()));
    let s = make_section(&c4, &l, &l).unwrap();
    assert_eq!(wreath_c4().quotient_sring(&s).unwrap().rank(), 1);

    // not an A-section: C4/{e,c2} in the rank-2 ring
    let s = make_section(&c4, &Subgroup::whole(&c4), &l).unwrap();
    assert!(matches!(
        SRing::rank_two(&c4).quotient_sring(&s),
        Err(Error::NotASection(_))
    ));
}

#[test]
fn power_map_examples() {
    let w = wreath_c4();
    let x = w.class_index(set(&[1, 3])).unwrap();
    assert_eq!(w.power_map_classes(x, 1).unwrap(), set(&[1, 3]));
    assert_eq!(w.power_map_classes(x, 3).unwrap(), set(&[1, 3]));
    assert!(w.power_map_classes(x, 2).is_err());
    let c5 = Group::cyclic(5).unwrap();
    let r2 = SRing::rank_two(&c5);
    assert_eq!(r2.power_map_classes(1, 2).unwrap(), c5.nonidentity());
}

#[test]
fn sylow_power_examples() {
    let c4 = Group::cyclic(4).unwrap();
    let w = wreath_c4();
    assert_eq!(w.sylow_power_set(set(&[1, 3]), 2).unwrap(), ElemSet::EMPTY);
    let zg = SRing::group_ring(&c4);
    assert_eq!(zg.sylow_power_set(set(&[1]), 2).unwrap(), set(&[2]));
    assert!(zg.sylow_power_set(set(&[1]), 3).is_err());

    let g = Group::new(&[4, 3, 3]).unwrap();
    let h = generate_subgroup(&g, [1, 3]);
    let coset = h.coset(&g, g.index(&[1, 0, 0]).unwrap());
    // brute force: every x in the coset sees all 9 elements of Hx
    let hp: ElemSet = (0..36).filter(|&a| g.pow(a, 3) == 0).collect();
    assert_eq!(hp, h.elements);
    for x in coset {
        assert_eq!((coset & g.translate(hp, x)).len(), 9);
    }
    let a = validate_sring(&g, {
        let mut p: Vec<ElemSet> = (0..36)
            .filter(|x| !coset.contains(*x))
            .map(ElemSet::singleton)
            .collect();
        p.push(coset);
        p
    });
    // Hc alone is not inverse-closed; take ZH wreathed with the cosets instead
    assert!(a.is_err());
    let cosets: Vec<ElemSet> = (0..4).map(|i| h.coset(&g, 9 * i)).collect();
    let mut part: Vec<ElemSet> = h.elements.iter().map(ElemSet::singleton).collect();
    part.extend(cosets[1..].iter().copied());
    let a = validate_sring(&g, part).unwrap();
    assert_eq!(a.sylow_power_set(coset, 3).unwrap(), ElemSet::EMPTY);
}

#[test]
fn intersection_examples() {
    let w = wreath_c4();
    let c4 = Group::cyclic(4).unwrap();
    let h = generate_subgroup(&c4, [2]);
    let x = w.class_index(set(&[1, 3])).unwrap();
    assert_eq!(w.intersection_numbers(&h, x).unwrap(), 2);
    assert_eq!(
        w.intersection_numbers(&h, w.class_index(set(&[2])).unwrap())
            .unwrap(),
        1
    );
    let g = Group::new(&[3, 3]).unwrap();
    let r2 = SRing::rank_two(&g);
    assert_eq!(r2.intersection_numbers(&Subgroup::whole(&g), 1).unwrap(), 8);
    assert!(r2
        .intersection_numbers(&generate_subgroup(&g, [1]), 1)
        .is_err());
}

#[test]
fn separat_examples() {
    let c4 = Group::cyclic(4).unwrap();
    let h = generate_subgroup(&c4, [2]);
    let w = wreath_c4();
    assert_eq!(
        w.separat_check(w.class_index(set(&[2])).unwrap(), &h)
            .unwrap(),
        SeparatVerdict::NotApplicable
    );
    let r2 = SRing::rank_two(&c4);
    // X ∩ H = {c2}, X \ H = {c, c3}, rad({c,c3}) = {e,c2} contains <c2>
    assert_eq!(r2.separat_check(1, &h).unwrap(), SeparatVerdict::Holds);
    let zg = SRing::group_ring(&c4);
    assert_eq!(
        zg.separat_check(zg.class_of(1), &h).unwrap(),
        SeparatVerdict::NotApplicable
    );
}

#[test]
fn p_sring_and_rationality() {
    let c4 = Group::cyclic(4).unwrap();
    assert!(SRing::group_ring(&c4).is_p_sring(2).unwrap());
    assert!(!SRing::rank_two(&c4).is_p_sring(2).unwrap());
    assert!(SRing::group_ring(&Group::cyclic(6).unwrap())
        .is_p_sring(2)
        .is_err());
    assert!(is_rational(&c4, set(&[1, 3])));
    assert!(!is_rational(&c4, set(&[1])));
}

#[test]
fn json_round_trip() {
    let w = wreath_c4();
    let json = serde_json::to_string(&w).unwrap();
    assert_eq!(
        json,
        r#"{"group":{"factors":[4]},"classes":[[0],[2],[1,3]]}"#
    );
    let back: SRing = serde_json::from_str(&json).unwrap();
    assert_eq!(back, w);
    assert!(serde_json::from_str::<SRing>(
        r#"{"group":{"factors":[4]},"classes":[[0],[1],[2,3]]}"#
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_rings_satisfy_identities(which in 0usize..5, mask in any::<u64>()) {
        let factors: &[usize] = [&[4usize, 3, 3][..], &[8], &[3, 3], &[4, 2, 2], &[12]][which];
        let g = Group::new(factors).unwrap();
        let a = validate_sring(&g, cyclotomic_partition(&g, mask)).unwrap();
        let rank = a.rank();
        for x in 0..rank {
            for y in 0..rank {
                let total: usize = a.row(x, y).iter().zip(a.classes()).map(|(&c, z)| c as usize * z.len()).sum();
                prop_assert_eq!(total, a.classes()[x].len() * a.classes()[y].len());
                // products with a singleton are basic sets
                if a.classes()[x].len() == 1 || a.classes()[y].len() == 1 {
                    prop_assert!(a.is_basic(g.product_set(a.classes()[x], a.classes()[y])));
                }
            }
        }
        // quotients re-validate and lemmas hold
        for u in a.a_subgroups() {
            for l in a.a_subgroups().iter().filter(|l| l.is_subgroup_of(&u)) {
                let s = make_section(&g, &u, l).unwrap();
                prop_assert!(a.quotient_sring(&s).is_ok());
            }
            for x in 0..rank {
                a.intersection_numbers(&u, x).unwrap();
                a.separat_check(x, &u).unwrap();
            }
        }
        for x in 0..rank {
            for m in g.units() {
                a.power_map_classes(x, m).unwrap();
            }
        }
        for p in crate::group::prime_factors(g.order()) {
            for &x in a.classes() {
                a.sylow_power_set(x, p).unwrap();
            }
        }
    }
}
