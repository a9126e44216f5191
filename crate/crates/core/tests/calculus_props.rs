use algebroid_core::calculus::{
    de_rham, de_rham_invariant, interior, lie_bracket, lie_derivative, schouten,
};
use algebroid_core::random::Generator;
use algebroid_core::{KForm, KVector, Poly};
use proptest::prelude::*;

const VARS: [u32; 4] = [0, 1, 2, 3];

fn gen(seed: u64) -> Generator {
    Generator::new(seed, &VARS, 3)
}

fn signed<T: Clone + std::ops::Neg<Output = T>>(exponent: usize, t: &T) -> T {
    if exponent % 2 == 0 {
        t.clone()
    } else {
        -t.clone()
    }
}

/// Sum that tolerates zero operands of a different nominal grade.
fn plus(a: &KVector, b: &KVector) -> KVector {
    if a.is_zero() {
        b.clone()
    } else if b.is_zero() {
        a.clone()
    } else {
        a + b
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), k in 0usize..3) {
        let w = gen(seed).form(k);
        prop_assert!(de_rham(&de_rham(&w)).is_zero());
    }

    #[test]
    fn d_matches_invariant_formula(seed in any::<u64>(), k in 0usize..3) {
        let mut g = gen(seed);
        let w = g.form(k);
        let fields: Vec<KVector> = (0..=k).map(|_| g.vector(1)).collect();
        prop_assert_eq!(de_rham(&w).evaluate(&fields).unwrap(), de_rham_invariant(&w, &fields).unwrap());
    }

    #[test]
    fn d_is_a_graded_derivation(seed in any::<u64>(), p in 0usize..3, q in 0usize..2) {
        let mut g = gen(seed);
        let (a, b) = (g.form(p), g.form(q));
        let lhs = de_rham(&a.wedge(&b));
        let rhs = &de_rham(&a).wedge(&b) + &signed(p, &a.wedge(&de_rham(&b)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_laws(seed in any::<u64>(), p in 0usize..3, q in 0usize..3, r in 0usize..2) {
        let mut g = gen(seed);
        let (a, b, c) = (g.form(p), g.form(q), g.form(r));
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
        prop_assert_eq!(a.wedge(&b), signed(p * q, &b.wedge(&a)));
        if p % 2 == 1 {
            prop_assert!(a.wedge(&a).is_zero());
        }
    }

    #[test]
    fn interior_squares_to_zero(seed in any::<u64>(), k in 2usize..4) {
        let mut g = gen(seed);
        let w = g.form(k);
        let x = g.vector(1);
        prop_assert!(interior(&x, &interior(&x, &w).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn interior_is_an_antiderivation(seed in any::<u64>(), p in 1usize..3, q in 1usize..3) {
        let mut g = gen(seed);
        let (a, b, x) = (g.form(p), g.form(q), g.vector(1));
        let lhs = interior(&x, &a.wedge(&b)).unwrap();
        let rhs = &interior(&x, &a).unwrap().wedge(&b) + &signed(p, &a.wedge(&interior(&x, &b).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_bracket_jacobi_and_leibniz(seed in any::<u64>()) {
        let mut g = gen(seed);
        let (x, y, z) = (g.vector(1), g.vector(1), g.vector(1));
        let f = g.poly();
        let br = |a: &KVector, b: &KVector| lie_bracket(a, b).unwrap();
        let cyc = &(&br(&x, &br(&y, &z)) + &br(&y, &br(&z, &x))) + &br(&z, &br(&x, &y));
        prop_assert!(cyc.is_zero());
        prop_assert!((&br(&x, &y) + &br(&y, &x)).is_zero());
        prop_assert_eq!(br(&x, &y.scale(&f)), &br(&x, &y).scale(&f) + &y.scale(&x.apply(&f)));
    }

    #[test]
    fn lie_derivative_identities(seed in any::<u64>(), k in 0usize..3) {
        let mut g = gen(seed);
        let (x, y, w) = (g.vector(1), g.vector(1), g.form(k));
        let l = |v: &KVector, t: &KForm| lie_derivative(v, t).unwrap();
        // L_[X,Y] = [L_X, L_Y]
        let lhs = l(&lie_bracket(&x, &y).unwrap(), &w);
        let rhs = &l(&x, &l(&y, &w)) - &l(&y, &l(&x, &w));
        prop_assert_eq!(lhs, rhs);
        // L_X commutes with d
        prop_assert_eq!(de_rham(&l(&x, &w)), l(&x, &de_rham(&w)));
    }

    #[test]
    fn schouten_graded_antisymmetry(seed in any::<u64>(), p in 0usize..4, q in 0usize..4) {
        let mut g = gen(seed);
        let (a, b) = (g.vector(p), g.vector(q));
        let lhs = schouten(&a, &b);
        let rhs = signed(p * q, &schouten(&b, &a));
        prop_assert!(plus(&lhs, &-&rhs).is_zero());
    }

    #[test]
    fn schouten_graded_jacobi(seed in any::<u64>(), p in 0usize..3, q in 0usize..3, r in 0usize..3) {
        // [a, [b, c]] = (-1)^(p-1) [[a, b], c] + (-1)^((p+1)(q+1)) [b, [a, c]]
        let mut g = Generator::new(seed, &VARS, 2);
        let (a, b, c) = (g.vector(p), g.vector(q), g.vector(r));
        let lhs = schouten(&a, &schouten(&b, &c));
        let t1 = signed(p + 1, &schouten(&schouten(&a, &b), &c));
        let t2 = signed((p + 1) * (q + 1), &schouten(&b, &schouten(&a, &c)));
        prop_assert!(plus(&plus(&lhs, &-&t1), &-&t2).is_zero());
    }

    #[test]
    fn schouten_biderivation(seed in any::<u64>(), p in 0usize..3, q in 0usize..3, r in 0usize..3) {
        // [a, b ^ c] = [a, b] ^ c + (-1)^(q(p+1)) b ^ [a, c]
        let mut g = Generator::new(seed, &VARS, 2);
        let (a, b, c) = (g.vector(p), g.vector(q), g.vector(r));
        let lhs = schouten(&a, &b.wedge(&c));
        let rhs = plus(&schouten(&a, &b).wedge(&c), &signed(q * (p + 1), &b.wedge(&schouten(&a, &c))));
        prop_assert!(plus(&lhs, &-&rhs).is_zero());
    }

    #[test]
    fn schouten_extends_lie_bracket(seed in any::<u64>()) {
        let mut g = gen(seed);
        let (x, y) = (g.vector(1), g.vector(1));
        let f = g.poly();
        prop_assert_eq!(schouten(&x, &y), lie_bracket(&x, &y).unwrap());
        prop_assert_eq!(schouten(&x, &KVector::scalar(f.clone())), KVector::scalar(x.apply(&f)));
    }
}

#[test]
fn schouten_jacobi_on_fixed_triple() {
    let x = |i| Poly::var(i);
    let e = KVector::unit;
    let a = e(0).wedge(&e(1));
    let b = e(2).scale(&x(1));
    let c = e(0).scale(&x(2));
    let lhs = schouten(&a, &schouten(&b, &c));
    let t1 = -&schouten(&schouten(&a, &b), &c);
    let t2 = schouten(&b, &schouten(&a, &c));
    assert_eq!(lhs, &t1 + &t2);
}
