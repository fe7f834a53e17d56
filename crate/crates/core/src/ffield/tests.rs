use super::*;
use proptest::prelude::*;

/// Trial factorization: `f` is irreducible iff no monic polynomial of degree
/// 1..=deg/2 divides it.
fn irreducible_by_trial_division(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    for k in 1..=d / 2 {
        let count = p.pow(k as u32);
        for idx in 0..count {
            let mut g: Vec<u64> = (0..k).map(|i| (idx / p.pow(i as u32)) % p).collect();
            g.push(1);
            if poly::rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[test]
fn prime_field_modulus_is_x() {
    let f = AmbientField::new(2, 1).unwrap();
    assert_eq!(f.modulus(), &[0, 1]);
    assert_eq!(f.size(), 2);
}

#[test]
fn f4_modulus() {
    let f = AmbientField::new(2, 2).unwrap();
    assert_eq!(f.modulus(), &[1, 1, 1]);
}

#[test]
fn f81_modulus_matches_sieve() {
    // Smallest monic irreducible quartic over F_3, low-degree-first:
    // 1 + x^2 + x^3 + x^4 (frozen from an exhaustive product sieve).
    let f = AmbientField::new(3, 4).unwrap();
    assert_eq!(f.modulus(), &[1, 0, 1, 1, 1]);
    assert!(irreducible_by_trial_division(f.modulus(), 3));
    // every lexicographically smaller monic quartic is reducible
    let mut smaller = 0;
    for idx in 0..81u64 {
        let coeffs: Vec<u64> = (0..4).map(|i| (idx / 3u64.pow(3 - i)) % 3).collect();
        let mut g = coeffs.clone();
        g.push(1);
        if g == f.modulus() {
            break;
        }
        smaller += 1;
        assert!(!irreducible_by_trial_division(&g, 3), "{g:?}");
    }
    assert!(smaller > 0);
}

#[test]
fn ben_or_agrees_with_trial_division() {
    for (p, d) in [(2u64, 4usize), (2, 5), (3, 3), (5, 2), (3, 4)] {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g: Vec<u64> = (0..d).map(|i| (idx / p.pow(i as u32)) % p).collect();
            g.push(1);
            assert_eq!(poly::is_irreducible(&g, p), irreducible_by_trial_division(&g, p), "{g:?}");
        }
    }
}

#[test]
fn construction_errors() {
    assert_eq!(AmbientField::new(4, 1).unwrap_err(), Error::NotPrime(4));
    assert_eq!(AmbientField::new(2, 0).unwrap_err(), Error::ZeroDegree);
    assert!(matches!(
        AmbientField::with_bound(2, 25, 1 << 24),
        Err(Error::FieldTooLarge { .. })
    ));
    assert!(matches!(AmbientField::new(2, 70), Err(Error::FieldTooLarge { .. })));
}

#[test]
fn deterministic_modulus() {
    for (p, d) in [(2, 8), (3, 5), (7, 3), (5, 12)] {
        let a = AmbientField::new(p, d).unwrap();
        let b = AmbientField::new(p, d).unwrap();
        assert_eq!(a.modulus(), b.modulus());
    }
}

#[test]
fn frobenius_on_f4_generator() {
    let f = AmbientField::new(2, 2).unwrap();
    let t = f.generator_t();
    // t^2 = t + 1 under x^2 + x + 1
    assert_eq!(f.frobenius_power(t, 1), f.add(t, f.one()));
    assert_eq!(f.frobenius_power(t, 2), t);
}

#[test]
fn prime_field_is_frobenius_fixed() {
    let f = AmbientField::new(5, 3).unwrap();
    for c in 0..5 {
        let x = f.from_int(c);
        for e in 0..4 {
            assert_eq!(f.frobenius_power(x, e), x);
        }
    }
}

#[test]
fn subfield_membership_in_f16() {
    let f = AmbientField::new(2, 4).unwrap();
    let count = (0..16).filter(|&c| f.in_subfield(Fe(c), 2).unwrap()).count();
    assert_eq!(count, 4);
    assert!(f.in_subfield(f.one(), 1).unwrap());
    let g = f.subfield_primitive(4).unwrap();
    assert_eq!(f.order_dividing(g, 15), 15);
    assert!(!f.in_subfield(g, 2).unwrap());
    assert_eq!(f.in_subfield(g, 3), Err(Error::NotDivisor { d: 3, degree: 4 }));
}

#[test]
fn subfield_enumeration_counts_and_order() {
    for (p, d) in [(2u64, 6usize), (3, 4), (5, 2), (2, 12)] {
        let f = AmbientField::new(p, d).unwrap();
        for sub in (1..=d).filter(|s| d % s == 0) {
            let elems = f.enumerate_subfield(sub).unwrap();
            assert_eq!(elems.len() as u64, p.pow(sub as u32));
            assert!(elems.windows(2).all(|w| w[0] < w[1]));
            assert!(elems.iter().all(|&x| f.in_subfield(x, sub).unwrap()));
        }
    }
    let f = AmbientField::new(2, 4).unwrap();
    assert!(f.enumerate_subfield(3).is_err());
}

#[test]
fn tables_agree_with_polynomial_arithmetic() {
    let f = AmbientField::new(3, 5).unwrap();
    assert!(f.tables.is_some());
    for a in (1..243).step_by(7) {
        for b in (1..243).step_by(11) {
            assert_eq!(f.mul(Fe(a), Fe(b)), f.mul_poly(Fe(a), Fe(b)));
        }
    }
}

#[test]
fn large_field_inverse_and_pow() {
    let f = AmbientField::new(7, 12).unwrap();
    assert!(f.tables.is_none());
    let x = f.from_coeffs(&[3, 1, 4, 1, 5]);
    let xi = f.inv(x).unwrap();
    assert_eq!(f.mul(x, xi), f.one());
    assert_eq!(f.pow(x, (f.size() - 1) as u128), f.one());
    assert_eq!(f.frobenius_power(x, 12), x);
}

#[test]
fn kth_roots_and_roots_of_unity() {
    // cube roots of unity live in F_4 but not F_2
    let f2 = AmbientField::new(2, 1).unwrap();
    assert_eq!(RootSolver::new(&f2, 3).unwrap().roots_of_unity().len(), 1);
    let f4 = AmbientField::new(2, 2).unwrap();
    assert_eq!(RootSolver::new(&f4, 3).unwrap().roots_of_unity().len(), 3);
    let f9 = AmbientField::new(3, 2).unwrap();
    let sq = RootSolver::new(&f9, 2).unwrap();
    assert_eq!(sq.roots_of_unity(), {
        let mut v = vec![f9.one(), f9.from_int(-1)];
        v.sort();
        v
    });
    // exactly half the units of F_9 are squares
    let squares = (1..9).filter(|&c| !sq.roots(Fe(c)).is_empty()).count();
    assert_eq!(squares, 4);
    let big = AmbientField::new(5, 12).unwrap();
    let solver = RootSolver::new(&big, 4).unwrap();
    let x = big.from_coeffs(&[2, 0, 1]);
    let roots = solver.roots(big.pow(x, 4));
    assert_eq!(roots.len(), 4);
    assert!(roots.contains(&x));
    for r in roots {
        assert_eq!(big.pow(r, 4), big.pow(x, 4));
    }
}

#[test]
fn cube_root_of_unity() {
    let f = AmbientField::new(7, 1).unwrap();
    let xi = f.primitive_cube_root().unwrap();
    assert_eq!(f.add(f.add(f.mul(xi, xi), xi), f.one()), f.zero());
    assert!(AmbientField::new(5, 1).unwrap().primitive_cube_root().is_none());
    assert!(AmbientField::new(3, 2).unwrap().primitive_cube_root().is_none());
}

proptest! {
    #[test]
    fn frobenius_is_a_field_automorphism(a in 0u64..729, b in 0u64..729, e in 0u64..6) {
        let f = AmbientField::new(3, 6).unwrap();
        let (x, y) = (Fe(a), Fe(b));
        prop_assert_eq!(f.frobenius_power(f.mul(x, y), e), f.mul(f.frobenius_power(x, e), f.frobenius_power(y, e)));
        prop_assert_eq!(f.frobenius_power(f.add(x, y), e), f.add(f.frobenius_power(x, e), f.frobenius_power(y, e)));
    }

    #[test]
    fn field_axioms_hold(a in 0u64..3125, b in 0u64..3125, c in 0u64..3125) {
        let f = AmbientField::new(5, 5).unwrap();
        let (x, y, z) = (Fe(a), Fe(b), Fe(c));
        prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        prop_assert_eq!(f.add(x, f.neg(x)), f.zero());
        prop_assert_eq!(f.pow(x, 3125), x);
        if !x.is_zero() {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
        }
    }
}

#[test]
fn frobenius_automorphism_on_full_grid() {
    let f = AmbientField::new(2, 6).unwrap();
    for a in 0..64 {
        for b in 0..64 {
            let (x, y) = (Fe(a), Fe(b));
            assert_eq!(f.frobenius_power(f.mul(x, y), 1), f.mul(f.frobenius_power(x, 1), f.frobenius_power(y, 1)));
            assert_eq!(f.frobenius_power(f.add(x, y), 1), f.add(f.frobenius_power(x, 1), f.frobenius_power(y, 1)));
        }
    }
}
