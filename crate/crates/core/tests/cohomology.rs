use std::collections::BTreeMap;

use algebroid_core::blade::Blade;
use algebroid_core::cohomology::{
    casimir_space, compute_cohomology, compute_cohomology_shuffled, h1_decomposition, theorem_check, Complex,
    TruncationSpec,
};
use algebroid_core::calculus::{de_rham, lie_derivative};
use algebroid_core::random::Generator;
use algebroid_core::scalar::{int, ratio};
use algebroid_core::sigma::sigma;
use algebroid_core::symplectic::{flat, hamiltonian_vf, sharp, ConstantSymplectic};
use algebroid_core::{Error, KForm, KVector, Poly};
use proptest::prelude::*;

/// Polynomial Poincare homotopy: `h(x^a dx_I) = x^a i_E dx_I / (|a| + |I|)`
/// with `E` the Euler field. Satisfies `dh + hd = id` in positive degree and
/// `hd f = f - f(0)` on functions.
fn homotopy(w: &KForm) -> KForm {
    let k = w.grade();
    let mut out = KForm::zero(k.saturating_sub(1));
    if k == 0 {
        return out;
    }
    for (blade, p) in w.terms() {
        for (m, c) in p.terms() {
            let weight = ratio(1, (m.degree() as i64) + k as i64);
            for (pos, &i) in blade.indices().iter().enumerate() {
                let rest: Vec<u32> = blade.indices().iter().copied().filter(|&j| j != i).collect();
                let coeff = Poly::term(m.clone(), c * &weight) * Poly::var(i);
                let coeff = if pos % 2 == 0 { coeff } else { -coeff };
                out.add_term(Blade::from_unsorted(&rest).unwrap().1, coeff);
            }
        }
    }
    out
}

fn wedge_all<T: Clone>(items: Vec<T>, unit: T, wedge: impl Fn(&T, &T) -> T) -> T {
    items.iter().fold(unit, |acc, t| wedge(&acc, t))
}

fn flat_all(w: &ConstantSymplectic, x: &KVector) -> KForm {
    let mut out = KForm::zero(x.grade());
    for (b, p) in x.terms() {
        let parts: Vec<KForm> = b.indices().iter().map(|&i| flat(w, &KVector::unit(i)).unwrap()).collect();
        out = &out + &wedge_all(parts, KForm::scalar(p.clone()), |a, b| a.wedge(b));
    }
    out
}

fn sharp_all(w: &ConstantSymplectic, f: &KForm) -> KVector {
    let mut out = KVector::zero(f.grade());
    for (b, p) in f.terms() {
        let parts: Vec<KVector> = b.indices().iter().map(|&i| sharp(w, &KForm::unit(i)).unwrap()).collect();
        out = &out + &wedge_all(parts, KVector::scalar(p.clone()), |a, b| a.wedge(b));
    }
    out
}

/// The homotopy transported to multivector fields.
fn lp_homotopy(w: &ConstantSymplectic, x: &KVector) -> KVector {
    let k = x.grade();
    let h = homotopy(&flat_all(w, x));
    let t = sharp_all(w, &h);
    // sharp o flat on 1-vectors is -1, so each slot contributes a sign
    if k % 2 == 0 { -&t } else { t }
}

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
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn de_rham_homotopy_oracle(seed in any::<u64>(), k in 0usize..4) {
        let w = Generator::new(seed, &[0, 1, 2, 3], 3).form(k);
        let mut back = &de_rham(&homotopy(&w)) + &homotopy(&de_rham(&w));
        if k == 0 {
            let f = w.as_poly().unwrap();
            back = &back + &KForm::scalar(Poly::constant(f.constant_term()));
        }
        prop_assert_eq!(back, w);
    }

    #[test]
    fn lp_homotopy_oracle(seed in any::<u64>(), k in 0usize..4) {
        let w = ConstantSymplectic::standard();
        let x = Generator::new(seed, &[0, 1, 2, 3], 3).vector(k);
        let mut back = plus(
            &sigma(&w, &lp_homotopy(&w, &x)).unwrap(),
            &lp_homotopy(&w, &sigma(&w, &x).unwrap()),
        );
        if k == 0 {
            let f = x.as_poly().unwrap();
            back = plus(&back, &KVector::scalar(Poly::constant(f.constant_term())));
        }
        prop_assert_eq!(back, x);
    }
}

#[test]
fn lp_standard_four_variables() {
    let spec = TruncationSpec::new([0, 1, 2, 3], 3, 0..=2);
    let r = compute_cohomology(&Complex::Lp(ConstantSymplectic::standard()), &spec).unwrap();
    assert_eq!(r.dims(), vec![1, 0, 0]);
    for g in &r.grades {
        assert_eq!(g.dim_quotient, g.dim_cocycles - g.dim_coboundaries);
    }
}

#[test]
fn de_rham_two_variables() {
    let spec = TruncationSpec::new([0, 1], 2, 0..=1);
    let r = compute_cohomology(&Complex::CeTangent, &spec).unwrap();
    assert_eq!(r.dims(), vec![1, 0]);
}

#[test]
fn zero_pairing_on_empty_support() {
    let spec = TruncationSpec::new([], 3, 0..=2);
    let r = compute_cohomology(&Complex::Lp(ConstantSymplectic::zero()), &spec).unwrap();
    assert_eq!(r.dims(), vec![1, 0, 0]);
}

#[test]
fn degenerate_form_has_more_cohomology() {
    let w = ConstantSymplectic::explicit(vec![0, 1], vec![vec![int(0), int(1)], vec![int(-1), int(0)]]).unwrap();
    let spec = TruncationSpec::new([0, 1, 2], 2, 0..=1);
    let r = compute_cohomology(&Complex::Lp(w.clone()), &spec).unwrap();
    // the Casimirs 1, x2, x2^2 and the field e[2] and its multiples survive
    assert_eq!(r.grade(0).unwrap().dim_quotient, 3);
    assert!(r.grade(1).unwrap().dim_quotient > 0);
    let ce = compute_cohomology(&Complex::CeCotangent(w), &spec).unwrap();
    assert_eq!(r.grades, ce.grades);
}

#[test]
fn permutation_independence() {
    let spec = TruncationSpec::new([0, 1, 2, 3], 2, 0..=2);
    for complex in [Complex::Lp(ConstantSymplectic::standard()), Complex::CeTangent] {
        let base = compute_cohomology(&complex, &spec).unwrap();
        for seed in [1, 2, 3] {
            let shuffled = compute_cohomology_shuffled(&complex, &spec, Some(seed)).unwrap();
            assert_eq!(base, shuffled);
        }
    }
}

#[test]
fn casimir_examples() {
    let w = ConstantSymplectic::standard();
    let c = casimir_space(&w, &TruncationSpec::new([0, 1], 3, 0..=0)).unwrap();
    assert_eq!(c, vec![Poly::one()]);
    let w = ConstantSymplectic::explicit(vec![0, 1], vec![vec![int(0), int(1)], vec![int(-1), int(0)]]).unwrap();
    let c = casimir_space(&w, &TruncationSpec::new([0, 1, 2], 3, 0..=0)).unwrap();
    let x2 = Poly::var(2);
    assert_eq!(c, vec![Poly::one(), x2.clone(), x2.pow(2), x2.pow(3)]);
}

#[test]
fn h1_examples() {
    let w = ConstantSymplectic::standard();
    let spec = TruncationSpec::new([0, 1], 2, 1..=1);
    let h = h1_decomposition(&w, &spec).unwrap();
    assert_eq!(h.dim_quotient, 0);
    assert_eq!(h.lp_h1, 0);
    assert!(h.agrees);

    // Hamiltonian fields preserve the form
    let omega = w.materialize(&[0, 1].into_iter().collect());
    let mut g = Generator::new(5, &[0, 1], 3);
    for _ in 0..20 {
        let xf = hamiltonian_vf(&w, &g.poly()).unwrap();
        assert!(lie_derivative(&xf, &omega).unwrap().is_zero());
    }
    // constant fields are symplectic
    for i in [0, 1] {
        assert!(lie_derivative(&KVector::unit(i), &omega).unwrap().is_zero());
    }
}

#[test]
fn theorem_check_passes() {
    let w = ConstantSymplectic::standard();
    let spec = TruncationSpec::new([0, 1, 2, 3], 2, 0..=2);
    let r = theorem_check(&w, 40, &spec, 17).unwrap();
    assert!(r.passed, "{:?}", r.witness);
    assert_eq!(r.per_grade.iter().map(|g| g.trials).sum::<usize>(), 40);
    assert_eq!(r.seed, 17);
    assert_eq!(r.lp.dims(), r.ce_cotangent.dims());
}

#[test]
fn truncation_cap() {
    let spec = TruncationSpec::new(0..8, 5, 0..=3).with_max_basis(1000);
    let err = compute_cohomology(&Complex::CeTangent, &spec).unwrap_err();
    assert!(matches!(err, Error::TruncationTooLarge { cap: 1000, .. }));
}

#[test]
fn basis_enumeration_is_deterministic() {
    let spec = TruncationSpec::new([2, 0, 1], 1, 0..=1);
    let a = spec.basis(1, 1).unwrap();
    let b = spec.basis(1, 1).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 3 * 4);
    let counts: BTreeMap<_, usize> = a.iter().fold(BTreeMap::new(), |mut m, (b, _)| {
        *m.entry(b.clone()).or_default() += 1;
        m
    });
    assert!(counts.values().all(|&c| c == 4));
}
