//! The generalized tangent bundle `TM + T*M`: its pairing, the Dorfman and
//! Courant brackets, Courant algebroid axioms, and Dirac structures given as
//! graphs of 2-forms.
//!
//! The orthogonal complement of a subbundle `L` is taken fiberwise relative to
//! `L`: `L^perp = {s : <s, l> = 0 for all l in L}`. Quantifying over every
//! section of the whole bundle instead would make it trivially zero.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::algebroid::{check_algebroid_axioms, Algebroid, AxiomCheck, AxiomReport, Section};
use crate::calculus::{de_rham, differential, interior, lie_bracket, lie_derivative};
use crate::error::{Error, Result};
use crate::graded::{pair, KForm, KVector};
use crate::linalg::generic_rank;
use crate::poly::{Poly, VarIndex};
use crate::random::Generator;
use crate::scalar;
use crate::symplectic::{flat, ConstantSymplectic};

/// A section `(X, a)` of `TM + T*M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneralizedSection {
    pub vector: KVector,
    pub form: KForm,
}

impl GeneralizedSection {
    pub fn new(vector: KVector, form: KForm) -> Result<Self> {
        if vector.grade() != 1 {
            return Err(Error::grade("generalized section", "1", vector.grade()));
        }
        if form.grade() != 1 {
            return Err(Error::grade("generalized section", "1", form.grade()));
        }
        Ok(GeneralizedSection { vector, form })
    }

    pub fn zero() -> Self {
        GeneralizedSection {
            vector: KVector::zero(1),
            form: KForm::zero(1),
        }
    }

    pub fn from_vector(vector: KVector) -> Result<Self> {
        Self::new(vector, KForm::zero(1))
    }

    pub fn from_form(form: KForm) -> Result<Self> {
        Self::new(KVector::zero(1), form)
    }

    pub fn support(&self) -> BTreeSet<VarIndex> {
        let mut s = self.vector.support();
        s.extend(self.form.support());
        s
    }
}

impl fmt::Display for GeneralizedSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vector, self.form)
    }
}

impl Section for GeneralizedSection {
    fn add(&self, other: &Self) -> Self {
        GeneralizedSection {
            vector: &self.vector + &other.vector,
            form: &self.form + &other.form,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        GeneralizedSection {
            vector: &self.vector - &other.vector,
            form: &self.form - &other.form,
        }
    }
    fn scale(&self, f: &Poly) -> Self {
        GeneralizedSection {
            vector: self.vector.scale(f),
            form: self.form.scale(f),
        }
    }
    fn is_zero(&self) -> bool {
        self.vector.is_zero() && self.form.is_zero()
    }
}

/// `<(X, a), (Y, b)> = a(Y) + b(X)`.
pub fn tm_pairing(s1: &GeneralizedSection, s2: &GeneralizedSection) -> Poly {
    &pair(&s1.form, &s2.vector) + &pair(&s2.form, &s1.vector)
}

/// `[(X, a), (Y, b)] = ([X, Y], L_X b - i_Y da)`.
pub fn dorfman_bracket(s1: &GeneralizedSection, s2: &GeneralizedSection) -> Result<GeneralizedSection> {
    let vector = lie_bracket(&s1.vector, &s2.vector)?;
    let mut form = lie_derivative(&s1.vector, &s2.form)?;
    if !s2.vector.is_zero() {
        form = &form - &interior(&s2.vector, &de_rham(&s1.form))?;
    }
    Ok(GeneralizedSection { vector, form })
}

/// `[[(X, a), (Y, b)]] = ([X, Y], L_X b - L_Y a + 1/2 d(a(Y) - b(X)))`.
pub fn courant_bracket(s1: &GeneralizedSection, s2: &GeneralizedSection) -> Result<GeneralizedSection> {
    let vector = lie_bracket(&s1.vector, &s2.vector)?;
    let half = scalar::ratio(1, 2);
    let skew = &pair(&s1.form, &s2.vector) - &pair(&s2.form, &s1.vector);
    let form = &(&lie_derivative(&s1.vector, &s2.form)? - &lie_derivative(&s2.vector, &s1.form)?)
        + &differential(&skew).scale_scalar(&half);
    Ok(GeneralizedSection { vector, form })
}

/// `Delta f = (0, df)`, the section with `<Delta f, (Y, b)> = Y(f)`.
pub fn delta_operator(f: &Poly) -> GeneralizedSection {
    GeneralizedSection {
        vector: KVector::zero(1),
        form: differential(f),
    }
}

/// Whether the pairing is nondegenerate on the fiber over `indices`, which
/// makes the section solving `<Delta f, s> = anchor(s) f` unique there.
pub fn delta_is_unique(indices: &BTreeSet<VarIndex>) -> bool {
    let basis = fiber_basis(indices);
    let gram: Vec<Vec<Poly>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| tm_pairing(a, b)).collect())
        .collect();
    generic_rank(&gram, basis.len()).0 == basis.len()
}

fn fiber_basis(indices: &BTreeSet<VarIndex>) -> Vec<GeneralizedSection> {
    let mut out: Vec<GeneralizedSection> = indices
        .iter()
        .map(|&i| GeneralizedSection {
            vector: KVector::unit(i),
            form: KForm::zero(1),
        })
        .collect();
    out.extend(indices.iter().map(|&i| GeneralizedSection {
        vector: KVector::zero(1),
        form: KForm::unit(i),
    }));
    out
}

/// Courant axioms for the Dorfman bracket, the pairing and the anchor
/// `(X, a) -> X`.
pub fn check_courant_axioms(sections: &[GeneralizedSection], functions: &[Poly]) -> Result<AxiomReport> {
    check_courant_axioms_with(tm_pairing, dorfman_bracket, sections, functions)
}

/// As [`check_courant_axioms`] with a substitute pairing and bracket.
///
/// Checks, on all supplied triples and pairs:
/// * `jacobi`: `[s1, [s2, s3]] = [[s1, s2], s3] + [s2, [s1, s3]]`
/// * `anchor-pairing`: `X1 <s2, s3> = <[s1, s2], s3> + <s2, [s1, s3]>`
/// * `symmetric-part`: `[s1, s2] + [s2, s1] = Delta <s1, s2>`
/// * `delta`: `<Delta f, s> = X(f)`
/// * `leibniz`: `[s1, f s2] = f [s1, s2] + X1(f) s2`
pub fn check_courant_axioms_with<P, B>(
    pairing: P,
    bracket: B,
    sections: &[GeneralizedSection],
    functions: &[Poly],
) -> Result<AxiomReport>
where
    P: Fn(&GeneralizedSection, &GeneralizedSection) -> Poly,
    B: Fn(&GeneralizedSection, &GeneralizedSection) -> Result<GeneralizedSection>,
{
    if sections.len() < 3 {
        return Err(Error::Invalid("Courant axiom check needs at least three sections".into()));
    }
    let mut jacobi = AxiomCheck::new("jacobi");
    let mut anchor_pairing = AxiomCheck::new("anchor-pairing");
    let mut symmetric = AxiomCheck::new("symmetric-part");
    let mut delta = AxiomCheck::new("delta");
    let mut leibniz = AxiomCheck::new("leibniz");

    for s1 in sections {
        for s2 in sections {
            let b12 = bracket(s1, s2)?;
            for s3 in sections {
                let b13 = bracket(s1, s3)?;
                let lhs = bracket(s1, &bracket(s2, s3)?)?;
                let rhs = bracket(&b12, s3)?.add(&bracket(s2, &b13)?);
                let defect = lhs.sub(&rhs);
                jacobi.record((!defect.is_zero()).then(|| {
                    format!("s1 = {s1}; s2 = {s2}; s3 = {s3}; defect = {defect}")
                }));

                let lhs = s1.vector.apply(&pairing(s2, s3));
                let rhs = &pairing(&b12, s3) + &pairing(s2, &b13);
                let defect = &lhs - &rhs;
                anchor_pairing.record((!defect.is_zero()).then(|| {
                    format!("s1 = {s1}; s2 = {s2}; s3 = {s3}; defect = {defect}")
                }));
            }
            let sym = b12.add(&bracket(s2, s1)?);
            let defect = sym.sub(&delta_operator(&pairing(s1, s2)));
            symmetric.record((!defect.is_zero()).then(|| {
                format!("s1 = {s1}; s2 = {s2}; defect = {defect}")
            }));
            for f in functions {
                let lhs = bracket(s1, &s2.scale(f))?;
                let rhs = b12.scale(f).add(&s2.scale(&s1.vector.apply(f)));
                let defect = lhs.sub(&rhs);
                leibniz.record((!defect.is_zero()).then(|| {
                    format!("s1 = {s1}; s2 = {s2}; f = {f}; defect = {defect}")
                }));
            }
        }
        for f in functions {
            let defect = &pairing(&delta_operator(f), s1) - &s1.vector.apply(f);
            delta.record((!defect.is_zero()).then(|| format!("s = {s1}; f = {f}; defect = {defect}")));
        }
    }
    let mut indices = BTreeSet::new();
    for s in sections {
        indices.extend(s.support());
    }
    for f in functions {
        indices.extend(f.vars());
    }
    let mut unique = AxiomCheck::new("delta-unique");
    unique.record((!delta_is_unique(&indices)).then(|| "pairing degenerate on the fiber".to_string()));

    Ok(AxiomReport {
        structure: "generalized-tangent".into(),
        checks: vec![jacobi, anchor_pairing, symmetric, delta, leibniz, unique],
    })
}

/// The 2-form whose graph is taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiracForm {
    Constant(ConstantSymplectic),
    Form(KForm),
}

impl DiracForm {
    fn contract(&self, x: &KVector) -> Result<KForm> {
        match self {
            DiracForm::Constant(w) => flat(w, x),
            DiracForm::Form(w) => {
                if w.is_zero() {
                    Ok(KForm::zero(1))
                } else {
                    interior(x, w)
                }
            }
        }
    }

    fn exterior_derivative(&self) -> KForm {
        match self {
            DiracForm::Constant(_) => KForm::zero(3),
            DiracForm::Form(w) => de_rham(w),
        }
    }
}

/// The subbundle spanned by `(X, i_X w)` for vector fields `X` along the
/// generator coordinates, over a finite support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracStructure {
    pub form: DiracForm,
    pub support: Vec<VarIndex>,
    pub generators: Vec<VarIndex>,
}

impl DiracStructure {
    /// The graph of a constant form, generated along the support coordinates
    /// the form pairs.
    pub fn graph_of_symplectic(w: ConstantSymplectic, support: impl IntoIterator<Item = VarIndex>) -> Self {
        let support: BTreeSet<VarIndex> = support.into_iter().collect();
        let generators = support.iter().copied().filter(|&i| w.covers(i)).collect();
        DiracStructure {
            form: DiracForm::Constant(w),
            support: support.into_iter().collect(),
            generators,
        }
    }

    /// The graph of an arbitrary polynomial 2-form over the support.
    pub fn graph_of_form(w: KForm, support: impl IntoIterator<Item = VarIndex>) -> Result<Self> {
        if w.grade() != 2 {
            return Err(Error::grade("graph_of_form", "2", w.grade()));
        }
        let mut support: BTreeSet<VarIndex> = support.into_iter().collect();
        support.extend(w.support());
        let support: Vec<VarIndex> = support.into_iter().collect();
        Ok(DiracStructure {
            form: DiracForm::Form(w),
            generators: support.clone(),
            support,
        })
    }

    /// The zero subbundle.
    pub fn zero(support: impl IntoIterator<Item = VarIndex>) -> Self {
        let support: BTreeSet<VarIndex> = support.into_iter().collect();
        DiracStructure {
            form: DiracForm::Constant(ConstantSymplectic::zero()),
            support: support.into_iter().collect(),
            generators: Vec::new(),
        }
    }

    pub fn generate(&self, x: &KVector) -> Result<GeneralizedSection> {
        if let Some(i) = x.blade_indices().into_iter().find(|i| !self.generators.contains(i)) {
            return Err(Error::Invalid(format!("e[{i}] is not a generator direction")));
        }
        GeneralizedSection::new(x.clone(), self.form.contract(x)?)
    }
}

/// The Dirac structure as a Lie algebroid: Courant bracket, anchor `(X, a) -> X`.
pub struct DiracAlgebroid<'a> {
    pub structure: &'a DiracStructure,
}

impl Algebroid for DiracAlgebroid<'_> {
    type Section = GeneralizedSection;
    fn name(&self) -> String {
        "dirac".into()
    }
    fn anchor(&self, s: &GeneralizedSection) -> Result<KVector> {
        Ok(s.vector.clone())
    }
    fn bracket(&self, a: &GeneralizedSection, b: &GeneralizedSection) -> Result<GeneralizedSection> {
        courant_bracket(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub fiber_indices: Vec<VarIndex>,
    pub fiber_dim: usize,
    pub dim: usize,
    pub dim_perp: usize,
    pub isotropic: bool,
    pub lagrangian: bool,
}

/// Dimensions of `D` and its orthogonal complement at the generic fiber over
/// the support, by exact rank computations over the rational functions.
pub fn orthogonal_complement(d: &DiracStructure) -> Result<FiberReport> {
    let mut indices: BTreeSet<VarIndex> = d.support.iter().copied().collect();
    let generated: Vec<GeneralizedSection> = d
        .generators
        .iter()
        .map(|&i| d.generate(&KVector::unit(i)))
        .collect::<Result<_>>()?;
    for g in &generated {
        indices.extend(g.support());
    }
    let basis = fiber_basis(&indices);
    let gram: Vec<Vec<Poly>> = generated
        .iter()
        .map(|g| basis.iter().map(|b| tm_pairing(g, b)).collect())
        .collect();
    let (rank_gram, _) = generic_rank(&gram, basis.len());
    // generators expressed in the fiber basis
    let coords: Vec<Vec<Poly>> = generated
        .iter()
        .map(|g| {
            let mut row: Vec<Poly> = indices.iter().map(|&i| g.vector.component(i)).collect();
            row.extend(indices.iter().map(|&i| g.form.component(i)));
            row
        })
        .collect();
    let (dim, _) = generic_rank(&coords, basis.len());
    let isotropic = generated
        .iter()
        .all(|a| generated.iter().all(|b| tm_pairing(a, b).is_zero()));
    let dim_perp = basis.len() - rank_gram;
    Ok(FiberReport {
        fiber_indices: indices.into_iter().collect(),
        fiber_dim: basis.len(),
        dim,
        dim_perp,
        isotropic,
        lagrangian: isotropic && dim == dim_perp,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiracReport {
    pub seed: u64,
    pub trials: usize,
    pub isotropy: AxiomCheck,
    pub involutivity: AxiomCheck,
    pub algebroid: AxiomReport,
    pub passed: bool,
}

/// Random vector fields along the generator directions with coefficients of
/// degree `<= 2` in the support variables.
pub fn random_generator_fields(d: &DiracStructure, count: usize, seed: u64) -> Vec<KVector> {
    let mut g = Generator::new(seed, &d.support, 2).with_limits(2, 1);
    (0..count)
        .map(|_| {
            let mut x = KVector::zero(1);
            if d.generators.is_empty() {
                return x;
            }
            while x.is_zero() {
                for &i in &d.generators {
                    if g.rng().gen_bool(0.6) {
                        x.add_term(crate::blade::Blade::single(i), g.poly());
                    }
                }
            }
            x
        })
        .collect()
}

/// Isotropy and involutivity of `D` on random generated sections, then the
/// Lie algebroid axioms for the Courant bracket restricted to `D`.
///
/// The involutivity witness reports the defect next to `i_Y i_X dw`, which it
/// equals.
pub fn check_dirac(d: &DiracStructure, trials: usize, seed: u64) -> Result<DiracReport> {
    let fields = random_generator_fields(d, trials.max(2), seed);
    let sections: Vec<GeneralizedSection> = fields.iter().map(|x| d.generate(x)).collect::<Result<_>>()?;
    let dw = d.form.exterior_derivative();

    let mut isotropy = AxiomCheck::new("isotropy");
    let mut involutivity = AxiomCheck::new("involutivity");
    for (i, a) in sections.iter().enumerate() {
        for b in &sections[i..] {
            let p = tm_pairing(a, b);
            isotropy.record((!p.is_zero()).then(|| format!("s1 = {a}; s2 = {b}; pairing = {p}")));

            let br = courant_bracket(a, b)?;
            let expected = d.generate(&br.vector)?;
            let defect = &br.form - &expected.form;
            involutivity.record((!defect.is_zero()).then(|| {
                let oracle = contract_twice(&dw, &a.vector, &b.vector)
                    .map(|f| f.to_string())
                    .unwrap_or_else(|e| e.to_string());
                format!("s1 = {a}; s2 = {b}; defect = {defect}; i_Y i_X dw = {oracle}")
            }));
        }
    }
    let mut g = Generator::new(seed ^ 0x9E37_79B9, &d.support, 2);
    let functions: Vec<Poly> = (0..2).map(|_| g.nonzero_poly()).collect();
    let algebroid = check_algebroid_axioms(&DiracAlgebroid { structure: d }, &sections, &functions)?;
    let passed = isotropy.passed && involutivity.passed && algebroid.passed();
    Ok(DiracReport {
        seed,
        trials: sections.len(),
        isotropy,
        involutivity,
        algebroid,
        passed,
    })
}

/// `i_Y i_X t` for a 3-form `t`.
pub fn contract_twice(t: &KForm, x: &KVector, y: &KVector) -> Result<KForm> {
    if t.is_zero() {
        return Ok(KForm::zero(t.grade().saturating_sub(2)));
    }
    interior(y, &interior(x, t)?)
}
