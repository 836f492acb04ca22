use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f4() -> FieldTower {
    FieldTower::new(FieldSpec {
        p: 2,
        degrees: vec![2],
        moduli: vec![vec![1, 1, 1]], // x^2 + x + 1
    })
    .unwrap()
}

#[test]
fn prime_field_f13() {
    let t = FieldTower::prime(13).unwrap();
    assert_eq!(t.num_levels(), 1);
    assert_eq!(t.size(0), 13);
    let a = t.scalar(7);
    let b = t.scalar(9);
    assert_eq!(t.index(&t.mul(&a, &b)), 63 % 13);
    assert_eq!(t.index(&t.add(&a, &b)), 3);
}

#[test]
fn non_prime_characteristic_rejected() {
    assert_eq!(
        FieldTower::prime(6).unwrap_err(),
        FieldError::NonPrimeCharacteristic(6)
    );
}

#[test]
fn reducible_modulus_rejected() {
    // x^2 + 1 = (x+1)^2 over F_2
    let err = FieldTower::new(FieldSpec {
        p: 2,
        degrees: vec![2],
        moduli: vec![vec![1, 0, 1]],
    })
    .unwrap_err();
    assert_eq!(err, FieldError::ReduciblePolynomial { step: 0 });
}

#[test]
fn degree_divisibility_violation() {
    assert_eq!(
        FieldTower::construction_tower(3, 2, 3).unwrap_err(),
        FieldError::DegreeDivisibilityViolation { m1: 2, m: 3 }
    );
}

#[test]
fn f4_has_four_elements_and_field_axioms() {
    let t = f4();
    assert_eq!(t.size(1), 4);
    exhaustive_axioms(&t, 1);
}

#[test]
fn canonical_modulus_for_f4_is_x2_x_1() {
    let t = FieldTower::with_canonical_moduli(2, &[2]).unwrap();
    assert_eq!(t.spec().moduli, vec![vec![1, 1, 1]]);
}

#[test]
fn tower_f2_f4_f16() {
    let t = FieldTower::with_canonical_moduli(2, &[2, 2]).unwrap();
    assert_eq!(t.num_levels(), 3);
    assert_eq!(t.size(2), 16);
    let all: Vec<Element> = (0..16).map(|i| t.from_index(2, i).unwrap()).collect();
    for (i, x) in all.iter().enumerate() {
        assert_eq!(t.index(x), i as u128);
    }
    exhaustive_axioms(&t, 2);
}

/// Exhaustive field axioms for levels of size <= 256.
fn exhaustive_axioms(t: &FieldTower, level: usize) {
    let q = t.size(level) as usize;
    assert!(q <= 256);
    let elems: Vec<Element> = (0..q)
        .map(|i| t.from_index(level, i as u128).unwrap())
        .collect();
    let zero = t.zero(level);
    let one = t.one(level);
    for a in &elems {
        assert!(t.eq(&t.add(a, &zero), a));
        assert!(t.eq(&t.mul(a, &one), a));
        assert!(t.eq(&t.add(a, &t.neg(a)), &zero));
        if !t.is_zero(a) {
            let inv = t.inv(a).unwrap();
            assert!(t.is_one(&t.mul(a, &inv)));
        }
    }
    for a in &elems {
        for b in &elems {
            assert!(t.eq(&t.add(a, b), &t.add(b, a)));
            assert!(t.eq(&t.mul(a, b), &t.mul(b, a)));
            for c in &elems {
                let left = t.mul(a, &t.add(b, c));
                let right = t.add(&t.mul(a, b), &t.mul(a, c));
                assert!(t.eq(&left, &right));
                let assoc_l = t.mul(&t.mul(a, b), c);
                let assoc_r = t.mul(a, &t.mul(b, c));
                assert!(t.eq(&assoc_l, &assoc_r));
            }
        }
    }
}

#[test]
fn randomized_axioms_on_larger_tower() {
    // F_3 -> F_27 -> F_729: top level above the exhaustive threshold
    let t = FieldTower::with_canonical_moduli(3, &[3, 2]).unwrap();
    assert_eq!(t.size(2), 729);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let a = t.from_index(2, rng.gen_range(0..729)).unwrap();
        let b = t.from_index(2, rng.gen_range(0..729)).unwrap();
        let c = t.from_index(2, rng.gen_range(0..729)).unwrap();
        let left = t.mul(&a, &t.add(&b, &c));
        let right = t.add(&t.mul(&a, &b), &t.mul(&a, &c));
        assert!(t.eq(&left, &right));
        assert!(t.eq(&t.mul(&t.mul(&a, &b), &c), &t.mul(&a, &t.mul(&b, &c))));
        if !t.is_zero(&a) {
            assert!(t.is_one(&t.mul(&a, &t.inv(&a).unwrap())));
        }
    }
}

#[test]
fn subfield_embedding_respects_arithmetic() {
    let t = FieldTower::with_canonical_moduli(3, &[3, 2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = t.from_index(1, rng.gen_range(0..27)).unwrap();
        let b = t.from_index(1, rng.gen_range(0..27)).unwrap();
        let prod_low = t.mul(&a, &b);
        let prod_high = t.mul(&t.embed(&a, 2).unwrap(), &t.embed(&b, 2).unwrap());
        assert!(t.eq(&prod_low, &prod_high));
    }
}

#[test]
fn frobenius_on_f4_squares_beta() {
    let t = f4();
    let beta = t.from_index(1, 2).unwrap(); // coords (0,1)
    let frob = t.frobenius(&beta, 0).unwrap();
    // beta^2 = beta + 1 mod x^2+x+1, coords (1,1) = index 3
    assert_eq!(t.index(&frob), 3);
}

#[test]
fn frobenius_fixes_base_level() {
    let t = f4();
    for i in 0..2u64 {
        let c = t.embed(&t.scalar(i), 1).unwrap();
        assert!(t.eq(&t.frobenius(&c, 0).unwrap(), &c));
    }
}

#[test]
fn frobenius_order_is_step_degree() {
    let t = FieldTower::with_canonical_moduli(2, &[2, 2]).unwrap();
    for i in 0..16 {
        let x = t.from_index(2, i).unwrap();
        let mut y = x.clone();
        for _ in 0..2 {
            y = t.frobenius(&y, 1).unwrap();
        }
        assert!(t.eq(&y, &x), "Frobenius over F_4 must have order 2 on F_16");
    }
}

#[test]
fn frobenius_is_additive_and_multiplicative() {
    let t = FieldTower::with_canonical_moduli(3, &[3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let x = t.from_index(1, rng.gen_range(0..27)).unwrap();
        let y = t.from_index(1, rng.gen_range(0..27)).unwrap();
        let f = |e: &Element| t.frobenius(e, 0).unwrap();
        assert!(t.eq(&f(&t.add(&x, &y)), &t.add(&f(&x), &f(&y))));
        assert!(t.eq(&f(&t.mul(&x, &y)), &t.mul(&f(&x), &f(&y))));
    }
}

#[test]
fn primitive_element_f13_is_2() {
    let t = FieldTower::prime(13).unwrap();
    let g = t.primitive_element(0).unwrap();
    assert_eq!(t.index(&g), 2);
    // independent oracle: 2^j != 1 for 1 <= j <= 11
    for j in 1..12u128 {
        assert!(!t.is_one(&t.pow(&g, j)));
    }
    assert!(t.is_one(&t.pow(&g, 12)));
}

#[test]
fn primitive_element_f4_has_order_3() {
    let t = f4();
    let g = t.primitive_element(1).unwrap();
    assert_eq!(t.multiplicative_order(&g).unwrap(), 3);
    // a primitive element of F_4 is a root of x^2 + x + 1
    let val = t.add(&t.add(&t.mul(&g, &g), &g), &t.one(1));
    assert!(t.is_zero(&val));
}

#[test]
fn primitive_element_f2_fails() {
    let t = FieldTower::prime(2).unwrap();
    assert_eq!(
        t.primitive_element(0).unwrap_err(),
        FieldError::FieldTooSmall
    );
}

#[test]
fn find_subgroup_f13() {
    let t = FieldTower::prime(13).unwrap();
    let g = t.find_subgroup(0, 4, 2).unwrap();
    assert_eq!(g.order, 4);
    let mut members: Vec<u128> = g.members(&t).iter().map(|e| t.index(e)).collect();
    members.sort_unstable();
    assert_eq!(members, vec![1, 5, 8, 12]);
    assert_eq!(g.coset_reps.len(), 3);
}

#[test]
fn find_subgroup_impossible() {
    let t = FieldTower::prime(13).unwrap();
    assert!(matches!(
        t.find_subgroup(0, 13, 1),
        Err(FieldError::NoSuitableSubgroup { .. })
    ));
}

#[test]
fn find_subgroup_f41() {
    let t = FieldTower::prime(41).unwrap();
    let g = t.find_subgroup(0, 5, 4).unwrap();
    assert_eq!(g.order, 5);
    assert_eq!(g.coset_reps.len(), 8);
    // independent oracle: enumerate powers of the generator
    let members = g.members(&t);
    assert_eq!(members.len(), 5);
    assert!(t.is_one(&t.pow(&g.generator, 5)));
    for j in 1..5u128 {
        assert!(!t.is_one(&t.pow(&g.generator, j)));
    }
}

#[test]
fn subgroup_cosets_partition_group() {
    let t = FieldTower::prime(13).unwrap();
    let g = t.find_subgroup(0, 4, 2).unwrap();
    // pairwise distinct cosets: rep_a / rep_b not in the subgroup
    for (i, a) in g.coset_reps.iter().enumerate() {
        for (j, b) in g.coset_reps.iter().enumerate() {
            if i != j {
                let ratio = t.div(a, b).unwrap();
                assert!(!g.contains(&t, &ratio));
            }
        }
    }
    // materialized cosets cover the group exactly once
    let mut seen = std::collections::HashSet::new();
    for rep in &g.coset_reps {
        for m in g.members(&t) {
            assert!(seen.insert(t.index(&t.mul(rep, &m))));
        }
    }
    assert_eq!(seen.len() as u64, g.order * g.coset_reps.len() as u64);
    assert_eq!(seen.len(), 12);
}

#[test]
fn flatten_examples() {
    let t = f4();
    let z = t.flatten(&t.zero(1), 0).unwrap();
    assert!(z.iter().all(|e| t.is_zero(e)));
    // beta = (0,1), beta+1 = (1,1) in the canonical basis {1, beta}
    let beta = t.from_index(1, 2).unwrap();
    let flat = t.flatten(&beta, 0).unwrap();
    assert_eq!(
        flat.iter().map(|e| t.index(e)).collect::<Vec<_>>(),
        vec![0, 1]
    );
    let beta1 = t.add(&beta, &t.one(1));
    let flat = t.flatten(&beta1, 0).unwrap();
    assert_eq!(
        flat.iter().map(|e| t.index(e)).collect::<Vec<_>>(),
        vec![1, 1]
    );
}

#[test]
fn flatten_rejects_level_order_violation() {
    let t = f4();
    let x = t.scalar(1);
    assert!(matches!(
        t.flatten(&x, 0),
        Err(FieldError::LevelOrderViolation { .. })
    ));
}

#[test]
fn flatten_roundtrips_everywhere() {
    // all elements of fields with <= 4096 elements
    for (p, degrees) in [
        (2u64, vec![2usize, 2]),
        (3, vec![3]),
        (5, vec![2]),
        (2, vec![2, 2, 3]),
    ] {
        let t = FieldTower::with_canonical_moduli(p, &degrees).unwrap();
        let top = t.top_level();
        assert!(t.size(top) <= 4096);
        for over in 0..top {
            for i in 0..t.size(top) {
                let x = t.from_index(top, i).unwrap();
                let flat = t.flatten(&x, over).unwrap();
                let back = t.unflatten(&flat, over, top).unwrap();
                assert!(t.eq(&back, &x));
            }
        }
    }
}

#[test]
fn flatten_is_linear_over_base() {
    let t = FieldTower::with_canonical_moduli(3, &[3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let x = t.from_index(1, rng.gen_range(0..27)).unwrap();
        let y = t.from_index(1, rng.gen_range(0..27)).unwrap();
        let a = t.scalar(rng.gen_range(0..3));
        let b = t.scalar(rng.gen_range(0..3));
        let lhs = t.add(
            &t.mul(&t.embed(&a, 1).unwrap(), &x),
            &t.mul(&t.embed(&b, 1).unwrap(), &y),
        );
        let fx = t.flatten(&x, 0).unwrap();
        let fy = t.flatten(&y, 0).unwrap();
        let flhs = t.flatten(&lhs, 0).unwrap();
        for i in 0..fx.len() {
            let expect = t.add(&t.mul(&a, &fx[i]), &t.mul(&b, &fy[i]));
            assert!(t.eq(&flhs[i], &expect));
        }
    }
}

#[test]
fn pow_zero_exponent_is_one() {
    let t = FieldTower::prime(7).unwrap();
    assert!(t.is_one(&t.pow(&t.zero(0), 0)));
    assert!(t.is_one(&t.pow(&t.scalar(5), 0)));
}

#[test]
fn packed_ops_match_coordinate_ops() {
    for (p, degrees) in [(13u64, vec![]), (2u64, vec![2usize, 2]), (3, vec![3])] {
        let t = FieldTower::with_canonical_moduli(p, &degrees).unwrap();
        let level = t.top_level();
        let ctx = t.packed_ctx(level).expect("table level");
        let q = t.size(level);
        for i in 0..q {
            for j in 0..q {
                let a = t.from_index(level, i).unwrap();
                let b = t.from_index(level, j).unwrap();
                let pa = ctx.from_index(i as usize);
                let pb = ctx.from_index(j as usize);
                assert_eq!(
                    ctx.to_index(ctx.mul(pa, pb)) as u128,
                    t.index(&t.mul(&a, &b))
                );
                assert_eq!(
                    ctx.to_index(ctx.add(pa, pb)) as u128,
                    t.index(&t.add(&a, &b))
                );
                assert_eq!(
                    ctx.to_index(ctx.sub(pa, pb)) as u128,
                    t.index(&t.sub(&a, &b))
                );
            }
            let a = t.from_index(level, i).unwrap();
            let pa = ctx.from_index(i as usize);
            assert_eq!(ctx.to_index(ctx.neg(pa)) as u128, t.index(&t.neg(&a)));
            if i != 0 {
                assert_eq!(
                    ctx.to_index(ctx.inv(pa)) as u128,
                    t.index(&t.inv(&a).unwrap())
                );
            }
        }
    }
}

#[test]
fn extend_preserves_lower_levels() {
    let base = FieldTower::with_canonical_moduli(3, &[3]).unwrap();
    let ext = base.extend(2).unwrap();
    assert_eq!(ext.num_levels(), 3);
    assert_eq!(ext.size(2), 729);
    // elements built against the base tower remain valid
    let x = base.from_index(1, 17).unwrap();
    let y = base.from_index(1, 22).unwrap();
    assert!(ext.eq(&ext.mul(&x, &y), &base.mul(&x, &y)));
}

#[test]
fn big_level_fermat_inverse() {
    // 5^5 = 3125 has tables; one more step exceeds the table threshold
    let t = FieldTower::with_canonical_moduli(5, &[5, 2]).unwrap();
    assert!(t.size(2) > 65536);
    assert!(!t.has_tables(2));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..25 {
        let idx = rng.gen_range(1..t.size(2));
        let x = t.from_index(2, idx).unwrap();
        assert!(t.is_one(&t.mul(&x, &t.inv(&x).unwrap())));
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn flatten_unflatten_roundtrip(idx in 0u64..729) {
            let t = FieldTower::with_canonical_moduli(3, &[3, 2]).unwrap();
            let x = t.from_index(2, idx as u128).unwrap();
            for over in 0..2 {
                let flat = t.flatten(&x, over).unwrap();
                let back = t.unflatten(&flat, over, 2).unwrap();
                prop_assert!(t.eq(&back, &x));
            }
        }

        #[test]
        fn field_inverse_cancels(idx in 1u64..2187) {
            let t = FieldTower::with_canonical_moduli(3, &[7]).unwrap();
            let x = t.from_index(1, idx as u128).unwrap();
            prop_assert!(t.is_one(&t.mul(&x, &t.inv(&x).unwrap())));
        }
    }
}
