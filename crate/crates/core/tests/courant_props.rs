use algebroid_core::algebroid::Section;
use algebroid_core::calculus::de_rham;
use algebroid_core::courant::{
    check_courant_axioms, check_dirac, contract_twice, courant_bracket, delta_operator, dorfman_bracket,
    orthogonal_complement, random_generator_fields, tm_pairing, DiracStructure, GeneralizedSection,
};
use algebroid_core::random::Generator;
use algebroid_core::scalar::{int, ratio};
use algebroid_core::symplectic::ConstantSymplectic;
use algebroid_core::{KForm, Poly};
use proptest::prelude::*;

const VARS: [u32; 4] = [0, 1, 2, 3];

fn section(g: &mut Generator) -> GeneralizedSection {
    GeneralizedSection::new(g.vector(1), g.form(1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pairing_is_symmetric_and_bilinear(seed in any::<u64>()) {
        let mut g = Generator::new(seed, &VARS, 2);
        let (a, b, c) = (section(&mut g), section(&mut g), section(&mut g));
        prop_assert_eq!(tm_pairing(&a, &b), tm_pairing(&b, &a));
        let two = Poly::constant(int(2));
        let half = Poly::constant(ratio(1, 2));
        let combo = a.scale(&two).add(&c.scale(&half));
        prop_assert_eq!(
            tm_pairing(&combo, &b),
            &(&two * &tm_pairing(&a, &b)) + &(&half * &tm_pairing(&c, &b))
        );
    }

    #[test]
    fn courant_is_antisymmetrized_dorfman(seed in any::<u64>()) {
        let mut g = Generator::new(seed, &VARS, 2);
        let (a, b) = (section(&mut g), section(&mut g));
        let half = Poly::constant(ratio(1, 2));
        let anti = dorfman_bracket(&a, &b).unwrap().sub(&dorfman_bracket(&b, &a).unwrap()).scale(&half);
        prop_assert_eq!(courant_bracket(&a, &b).unwrap(), anti);
        prop_assert!(courant_bracket(&a, &b).unwrap().add(&courant_bracket(&b, &a).unwrap()).is_zero());
    }

    #[test]
    fn dorfman_symmetric_part_is_delta(seed in any::<u64>()) {
        let mut g = Generator::new(seed, &VARS, 2);
        let (a, b) = (section(&mut g), section(&mut g));
        let sym = dorfman_bracket(&a, &b).unwrap().add(&dorfman_bracket(&b, &a).unwrap());
        prop_assert_eq!(sym, delta_operator(&tm_pairing(&a, &b)));
    }

    #[test]
    fn courant_axioms_on_random_triples(seed in any::<u64>()) {
        let mut g = Generator::new(seed, &VARS, 2).with_limits(2, 2);
        let sections: Vec<_> = (0..3).map(|_| section(&mut g)).collect();
        let f = g.poly();
        let r = check_courant_axioms(&sections, &[f]).unwrap();
        prop_assert!(r.passed(), "{:?}", r.first_failure());
    }

    #[test]
    fn delta_defining_property(seed in any::<u64>()) {
        let mut g = Generator::new(seed, &VARS, 3);
        let f = g.poly();
        let s = section(&mut g);
        prop_assert_eq!(tm_pairing(&delta_operator(&f), &s), s.vector.apply(&f));
    }

    #[test]
    fn involutivity_defect_is_contraction_of_dw(seed in any::<u64>()) {
        let mut g = Generator::new(seed, &[0, 1, 2], 2).with_limits(2, 2);
        let w = g.form(2);
        prop_assume!(!w.is_zero());
        let d = DiracStructure::graph_of_form(w.clone(), [0, 1, 2]).unwrap();
        let fields = random_generator_fields(&d, 2, seed);
        let (a, b) = (d.generate(&fields[0]).unwrap(), d.generate(&fields[1]).unwrap());
        let br = courant_bracket(&a, &b).unwrap();
        let defect = &br.form - &d.generate(&br.vector).unwrap().form;
        let oracle = contract_twice(&de_rham(&w), &fields[0], &fields[1]).unwrap();
        prop_assert_eq!(defect, oracle);
    }
}

#[test]
fn graph_of_closed_forms_is_dirac() {
    let std = DiracStructure::graph_of_symplectic(ConstantSymplectic::standard(), [0, 1, 2, 3]);
    let r = check_dirac(&std, 5, 3).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.algebroid.passed());

    // a closed non-constant form
    let x = Poly::var;
    let w = KForm::unit(0).wedge(&KForm::unit(1)).scale(&(&x(0) * &x(1)));
    let graph = DiracStructure::graph_of_form(w, [0, 1]).unwrap();
    let r = check_dirac(&graph, 4, 9).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn non_closed_form_fails_involutivity() {
    let x = Poly::var;
    let w = KForm::unit(1).wedge(&KForm::unit(2)).scale(&x(0));
    let d = DiracStructure::graph_of_form(w, [0, 1, 2]).unwrap();
    let r = check_dirac(&d, 4, 1).unwrap();
    assert!(r.isotropy.passed);
    assert!(!r.involutivity.passed);
    assert!(r.involutivity.witness.as_ref().unwrap().contains("i_Y i_X dw"));
}

#[test]
fn equal_generators_bracket_to_zero() {
    let std = DiracStructure::graph_of_symplectic(ConstantSymplectic::standard(), [0, 1]);
    let s = std.generate(&algebroid_core::KVector::unit(0).scale(&Poly::var(1))).unwrap();
    assert!(courant_bracket(&s, &s).unwrap().is_zero());
}

#[test]
fn fiber_dimensions() {
    let std = DiracStructure::graph_of_symplectic(ConstantSymplectic::standard(), [0, 1]);
    let r = orthogonal_complement(&std).unwrap();
    assert_eq!((r.dim, r.dim_perp, r.fiber_dim), (2, 2, 4));
    assert!(r.lagrangian);

    let w = ConstantSymplectic::explicit(vec![0, 1], vec![vec![int(0), int(1)], vec![int(-1), int(0)]]).unwrap();
    let r = orthogonal_complement(&DiracStructure::graph_of_symplectic(w, [0, 1, 2])).unwrap();
    assert!(r.dim < r.dim_perp);
    assert!(!r.lagrangian);

    let r = orthogonal_complement(&DiracStructure::zero([0, 1, 2])).unwrap();
    assert_eq!(r.dim_perp, r.fiber_dim);
}
