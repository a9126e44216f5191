//! Lie algebroids: an anchor to vector fields plus a bracket on sections,
//! checked against the algebroid axioms, and the Chevalley-Eilenberg
//! differential of tensorial cochains.
//!
//! Cochains are restricted to their `C^inf(M)`-multilinear part: a k-cochain on
//! the tangent algebroid is a k-form, on the cotangent algebroid a k-vector
//! field. That is the part on which the contravariant differential is defined.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::blade::Blade;
use crate::calculus::{add_signed, lie_bracket, omit};
use crate::error::{Error, Result};
use crate::graded::{Graded, KForm, KVector, Variance};
use crate::poly::{Poly, VarIndex};
use crate::symplectic::{oneform_bracket, poisson_sharp, ConstantSymplectic};

/// Sections of an algebroid's bundle form a module over the polynomials.
pub trait Section: Clone + PartialEq + fmt::Display + Send + Sync {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, f: &Poly) -> Self;
    fn is_zero(&self) -> bool;
}

impl<V: Variance> Section for Graded<V> {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, f: &Poly) -> Self {
        Graded::scale(self, f)
    }
    fn is_zero(&self) -> bool {
        Graded::is_zero(self)
    }
}

pub trait Algebroid: Sync {
    type Section: Section;
    fn name(&self) -> String;
    fn anchor(&self, s: &Self::Section) -> Result<KVector>;
    fn bracket(&self, a: &Self::Section, b: &Self::Section) -> Result<Self::Section>;
}

/// An algebroid with a coordinate frame of pairwise commuting sections, so
/// that cochains can be materialized as tensors by evaluating on the frame.
pub trait Framed: Algebroid {
    fn frame(&self, i: VarIndex) -> Self::Section;
    /// Indices `i` whose frame section's anchor differentiates some variable
    /// in `vars`.
    fn reach(&self, vars: &BTreeSet<VarIndex>) -> BTreeSet<VarIndex>;
}

/// A `C^inf(M)`-multilinear alternating cochain on sections of type `S`.
pub trait Cochain<S>: fmt::Display {
    fn grade(&self) -> usize;
    fn eval(&self, args: &[S]) -> Result<Poly>;
}

impl Cochain<KVector> for KForm {
    fn grade(&self) -> usize {
        Graded::grade(self)
    }
    fn eval(&self, args: &[KVector]) -> Result<Poly> {
        self.evaluate(args)
    }
}

impl Cochain<KForm> for KVector {
    fn grade(&self) -> usize {
        Graded::grade(self)
    }
    fn eval(&self, args: &[KForm]) -> Result<Poly> {
        self.evaluate(args)
    }
}

/// `TM` with the identity anchor and the Lie bracket.
#[derive(Clone, Copy, Debug, Default)]
pub struct TangentAlgebroid;

impl Algebroid for TangentAlgebroid {
    type Section = KVector;
    fn name(&self) -> String {
        "tangent".into()
    }
    fn anchor(&self, s: &KVector) -> Result<KVector> {
        if s.grade() != 1 {
            return Err(Error::grade("anchor", "1", s.grade()));
        }
        Ok(s.clone())
    }
    fn bracket(&self, a: &KVector, b: &KVector) -> Result<KVector> {
        lie_bracket(a, b)
    }
}

impl Framed for TangentAlgebroid {
    fn frame(&self, i: VarIndex) -> KVector {
        KVector::unit(i)
    }
    fn reach(&self, vars: &BTreeSet<VarIndex>) -> BTreeSet<VarIndex> {
        vars.clone()
    }
}

/// The cotangent algebroid of a symplectic form: anchor `sharp`, bracket of
/// 1-forms `{a, b} = L_{sharp a} b - L_{sharp b} a - d w(a, b)`.
#[derive(Clone, Debug)]
pub struct CotangentAlgebroid {
    pub symplectic: ConstantSymplectic,
}

impl CotangentAlgebroid {
    pub fn new(symplectic: ConstantSymplectic) -> Self {
        CotangentAlgebroid { symplectic }
    }
}

impl Algebroid for CotangentAlgebroid {
    type Section = KForm;
    fn name(&self) -> String {
        "cotangent".into()
    }
    fn anchor(&self, s: &KForm) -> Result<KVector> {
        poisson_sharp(&self.symplectic, s)
    }
    fn bracket(&self, a: &KForm, b: &KForm) -> Result<KForm> {
        oneform_bracket(&self.symplectic, a, b)
    }
}

impl Framed for CotangentAlgebroid {
    fn frame(&self, i: VarIndex) -> KForm {
        KForm::unit(i)
    }
    fn reach(&self, vars: &BTreeSet<VarIndex>) -> BTreeSet<VarIndex> {
        self.symplectic.reach(vars)
    }
}

/// Outcome of one axiom over all supplied instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub instances: usize,
    pub passed: bool,
    /// The first failing instance, in model-language syntax.
    pub witness: Option<String>,
}

impl AxiomCheck {
    pub(crate) fn new(axiom: &str) -> Self {
        AxiomCheck {
            axiom: axiom.to_string(),
            instances: 0,
            passed: true,
            witness: None,
        }
    }

    /// Records one instance; `defect` is `None` when the identity holds.
    pub(crate) fn record(&mut self, defect: Option<String>) {
        self.instances += 1;
        if let Some(w) = defect {
            if self.passed {
                self.passed = false;
                self.witness = Some(w);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub structure: String,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// Verifies, exactly and on every supplied pair or triple: antisymmetry and
/// Jacobi for the bracket, that the anchor maps brackets to Lie brackets, and
/// the Leibniz rule `[s1, f s2] = f [s1, s2] + anchor(s1)(f) s2`.
pub fn check_algebroid_axioms<A: Algebroid>(
    alg: &A,
    sections: &[A::Section],
    functions: &[Poly],
) -> Result<AxiomReport> {
    if sections.len() < 2 || functions.is_empty() {
        return Err(Error::Invalid(
            "axiom check needs at least two sections and one function".into(),
        ));
    }
    let n = sections.len();
    let mut antisym = AxiomCheck::new("antisymmetry");
    let mut jacobi = AxiomCheck::new("jacobi");
    let mut homomorphism = AxiomCheck::new("anchor-homomorphism");
    let mut leibniz = AxiomCheck::new("leibniz");

    for i in 0..n {
        for j in i..n {
            let (a, b) = (&sections[i], &sections[j]);
            let ab = alg.bracket(a, b)?;
            let ba = alg.bracket(b, a)?;
            let sum = ab.add(&ba);
            antisym.record((!sum.is_zero()).then(|| {
                format!("s1 = {a}; s2 = {b}; [s1,s2] + [s2,s1] = {sum}")
            }));
            if i < j {
                let lhs = alg.anchor(&ab)?;
                let rhs = lie_bracket(&alg.anchor(a)?, &alg.anchor(b)?)?;
                let defect = &lhs - &rhs;
                homomorphism.record((!defect.is_zero()).then(|| {
                    format!("s1 = {a}; s2 = {b}; anchor([s1,s2]) - [anchor s1, anchor s2] = {defect}")
                }));
            }
            for k in j..n {
                let c = &sections[k];
                let t1 = alg.bracket(a, &alg.bracket(b, c)?)?;
                let t2 = alg.bracket(b, &alg.bracket(c, a)?)?;
                let t3 = alg.bracket(c, &ab)?;
                let sum = t1.add(&t2).add(&t3);
                jacobi.record((!sum.is_zero()).then(|| {
                    format!("s1 = {a}; s2 = {b}; s3 = {c}; cyclic sum = {sum}")
                }));
            }
        }
    }
    for a in sections {
        let anchor_a = alg.anchor(a)?;
        for b in sections {
            let ab = alg.bracket(a, b)?;
            for f in functions {
                let lhs = alg.bracket(a, &b.scale(f))?;
                let rhs = ab.scale(f).add(&b.scale(&anchor_a.apply(f)));
                let defect = lhs.sub(&rhs);
                leibniz.record((!defect.is_zero()).then(|| {
                    format!("s1 = {a}; s2 = {b}; f = {f}; [s1, f s2] - f[s1,s2] - anchor(s1)(f) s2 = {defect}")
                }));
            }
        }
    }
    Ok(AxiomReport {
        structure: alg.name(),
        checks: vec![antisym, jacobi, homomorphism, leibniz],
    })
}

/// `(d_L l)(s_0, ..., s_k) = sum_i (-1)^i anchor(s_i)(l(..^i..))
///  + sum_{i<j} (-1)^{i+j} l([s_i, s_j], ..^i..^j..)`.
pub fn ce_differential<A, C>(alg: &A, cochain: &C, args: &[A::Section]) -> Result<Poly>
where
    A: Algebroid,
    C: Cochain<A::Section> + ?Sized,
{
    let k = cochain.grade();
    if args.len() != k + 1 {
        return Err(Error::Arity {
            expected: k + 1,
            found: args.len(),
        });
    }
    let mut acc = Poly::zero();
    for i in 0..=k {
        let value = cochain.eval(&omit(args, &[i]))?;
        if !value.is_zero() {
            add_signed(&mut acc, i, &alg.anchor(&args[i])?.apply(&value));
        }
    }
    for i in 0..=k {
        for j in i + 1..=k {
            let br = alg.bracket(&args[i], &args[j])?;
            if br.is_zero() {
                continue;
            }
            let mut rest = vec![br];
            rest.extend(omit(args, &[i, j]));
            add_signed(&mut acc, i + j, &cochain.eval(&rest)?);
        }
    }
    Ok(acc)
}

/// `d_L l` as a tensor, read off by evaluating the differential on the
/// coordinate frame.
pub fn ce_operator<A, V>(alg: &A, cochain: &Graded<V>) -> Result<Graded<V>>
where
    V: Variance,
    A: Framed<Section = Graded<V::Dual>>,
    Graded<V>: Cochain<Graded<V::Dual>>,
{
    let k = cochain.grade();
    let mut indices = cochain.blade_indices();
    indices.extend(alg.reach(&cochain.coefficient_vars()));
    let indices: Vec<VarIndex> = indices.into_iter().collect();
    let mut out = Graded::zero(k + 1);
    for blade in Blade::subsets(&indices, k + 1) {
        let frame: Vec<Graded<V::Dual>> = blade.indices().iter().map(|&i| alg.frame(i)).collect();
        let v = ce_differential(alg, cochain, &frame)?;
        out.add_term(blade, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::de_rham;

    fn x(i: VarIndex) -> Poly {
        Poly::var(i)
    }
    fn dx(i: VarIndex) -> KForm {
        KForm::unit(i)
    }
    fn e(i: VarIndex) -> KVector {
        KVector::unit(i)
    }

    #[test]
    fn tangent_axioms_pass() {
        let sections = vec![e(0), e(1).scale(&x(0)), e(0).scale(&x(1).pow(2))];
        let report = check_algebroid_axioms(&TangentAlgebroid, &sections, &[&x(0) * &x(1)]).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.check("jacobi").unwrap().instances, 10);
    }

    #[test]
    fn cotangent_axioms_pass() {
        let alg = CotangentAlgebroid::new(ConstantSymplectic::standard());
        let sections = vec![dx(0), dx(1), dx(1).scale(&x(0))];
        let report = check_algebroid_axioms(&alg, &sections, &[x(1)]).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    struct Corrupted;
    impl Algebroid for Corrupted {
        type Section = KVector;
        fn name(&self) -> String {
            "corrupted".into()
        }
        fn anchor(&self, s: &KVector) -> Result<KVector> {
            Ok(s.clone())
        }
        fn bracket(&self, a: &KVector, _b: &KVector) -> Result<KVector> {
            Ok(KVector::zero(a.grade()))
        }
    }

    #[test]
    fn zero_bracket_with_nonzero_anchor_fails_leibniz() {
        let report = check_algebroid_axioms(&Corrupted, &[e(0), e(1)], &[x(0)]).unwrap();
        assert!(!report.passed());
        assert_eq!(report.first_failure().unwrap().axiom, "leibniz");
        assert!(report.check("leibniz").unwrap().witness.as_ref().unwrap().contains("f = x0"));
    }

    #[test]
    fn too_few_inputs_is_an_error() {
        assert!(check_algebroid_axioms(&TangentAlgebroid, &[e(0)], &[x(0)]).is_err());
        assert!(check_algebroid_axioms(&TangentAlgebroid, &[e(0), e(1)], &[]).is_err());
    }

    #[test]
    fn ce_on_tangent_is_de_rham() {
        let w = &dx(1).scale(&x(0)) + &dx(2).scale(&x(1).pow(2));
        let args = [e(0).scale(&x(2)), &e(1) + &e(2).scale(&x(0))];
        let ce = ce_differential(&TangentAlgebroid, &w, &args).unwrap();
        assert_eq!(ce, de_rham(&w).evaluate(&args).unwrap());
        assert_eq!(ce_operator(&TangentAlgebroid, &w).unwrap(), de_rham(&w));
    }

    #[test]
    fn ce_degree_zero() {
        let f = KForm::scalar(&x(0) * &x(1));
        let s = e(1).scale(&x(3));
        assert_eq!(ce_differential(&TangentAlgebroid, &f, std::slice::from_ref(&s)).unwrap(), s.apply(&(&x(0) * &x(1))));
        // cotangent: sharp(dx0)(f) = d_1 f
        let alg = CotangentAlgebroid::new(ConstantSymplectic::standard());
        let g = KVector::scalar(&x(0) * &x(1).pow(2));
        assert_eq!(
            ce_differential(&alg, &g, &[dx(0)]).unwrap(),
            (&x(0) * &x(1).pow(2)).partial(1)
        );
    }

    #[test]
    fn arity_is_checked() {
        let w = dx(0);
        assert_eq!(
            ce_differential(&TangentAlgebroid, &w, &[e(0)]),
            Err(Error::Arity { expected: 2, found: 1 })
        );
    }
}
