//! Dimensions of truncated cochain complexes by exact linear algebra.
//!
//! A truncation fixes a finite set of coordinates, a coefficient degree bound
//! `D` and a range of grades. The grade-k cochains are spanned by
//! `p * b` with `b` a blade over the support and `p` a monomial over the
//! support of degree `<= D`. Cocycles are counted there. Coboundaries are the
//! images of grade-(k-1) cochains of degree `<= D + 1` that land back inside
//! the truncated space, since the differentials of constant structures lower
//! coefficient degree by one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebroid::{ce_differential, ce_operator, CotangentAlgebroid, TangentAlgebroid};
use crate::blade::Blade;
use crate::calculus::lie_derivative;
use crate::error::{Error, Result};
use crate::graded::{KForm, KVector};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::poly::{Monomial, Poly, VarIndex};
use crate::random::Generator;
use crate::scalar::{self, Scalar};
use crate::sigma::sigma;
use crate::symplectic::{hamiltonian_vf, ConstantSymplectic};

pub const DEFAULT_MAX_BASIS: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationSpec {
    pub support: Vec<VarIndex>,
    pub degree: u32,
    pub min_grade: usize,
    pub max_grade: usize,
    /// Largest number of basis elements any single matrix may have.
    pub max_basis: usize,
}

impl TruncationSpec {
    pub fn new(support: impl IntoIterator<Item = VarIndex>, degree: u32, grades: std::ops::RangeInclusive<usize>) -> Self {
        let support: BTreeSet<VarIndex> = support.into_iter().collect();
        TruncationSpec {
            support: support.into_iter().collect(),
            degree,
            min_grade: *grades.start(),
            max_grade: *grades.end(),
            max_basis: DEFAULT_MAX_BASIS,
        }
    }

    pub fn with_max_basis(mut self, cap: usize) -> Self {
        self.max_basis = cap;
        self
    }

    pub fn support_set(&self) -> BTreeSet<VarIndex> {
        self.support.iter().copied().collect()
    }

    pub fn grades(&self) -> std::ops::RangeInclusive<usize> {
        self.min_grade..=self.max_grade
    }

    /// Basis of grade-`k` cochains with coefficients of degree `<= degree`, in
    /// blade-major order.
    pub fn basis(&self, k: usize, degree: u32) -> Result<Vec<(Blade, Monomial)>> {
        let blades = Blade::subsets(&self.support, k);
        let monomials = Monomial::enumerate(&self.support, degree);
        let size = blades.len().saturating_mul(monomials.len());
        if size > self.max_basis {
            return Err(Error::TruncationTooLarge {
                size,
                cap: self.max_basis,
            });
        }
        let mut out = Vec::with_capacity(size);
        for b in &blades {
            for m in &monomials {
                out.push((b.clone(), m.clone()));
            }
        }
        Ok(out)
    }

    fn contains(&self, blade: &Blade, m: &Monomial) -> bool {
        m.degree() <= self.degree
            && blade.indices().iter().all(|i| self.support.binary_search(i).is_ok())
            && m.vars().all(|i| self.support.binary_search(&i).is_ok())
    }
}

/// The three complexes whose truncated cohomology is computed.
#[derive(Clone, Debug)]
pub enum Complex {
    /// Multivector fields under the contravariant differential.
    Lp(ConstantSymplectic),
    /// Forms under the tangent algebroid differential, i.e. de Rham.
    CeTangent,
    /// Multivector fields as cochains of the cotangent algebroid.
    CeCotangent(ConstantSymplectic),
}

impl Complex {
    pub fn name(&self) -> &'static str {
        match self {
            Complex::Lp(_) => "LP",
            Complex::CeTangent => "CE-tangent",
            Complex::CeCotangent(_) => "CE-cotangent",
        }
    }

    /// The differential of `p * blade`, as a list of blade coefficients.
    pub fn differential(&self, k: usize, blade: &Blade, p: Poly) -> Result<Vec<(Blade, Poly)>> {
        let terms = match self {
            Complex::Lp(w) => {
                let x = KVector::from_terms(k, [(blade.clone(), p)])?;
                collect(sigma(w, &x)?.terms())
            }
            Complex::CeCotangent(w) => {
                let x = KVector::from_terms(k, [(blade.clone(), p)])?;
                collect(ce_operator(&CotangentAlgebroid::new(w.clone()), &x)?.terms())
            }
            Complex::CeTangent => {
                let f = KForm::from_terms(k, [(blade.clone(), p)])?;
                collect(ce_operator(&TangentAlgebroid, &f)?.terms())
            }
        };
        Ok(terms)
    }
}

fn collect<'a>(it: impl Iterator<Item = (&'a Blade, &'a Poly)>) -> Vec<(Blade, Poly)> {
    it.map(|(b, p)| (b.clone(), p.clone())).collect()
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradeDimensions {
    pub grade: usize,
    pub basis_size: usize,
    pub dim_cocycles: usize,
    pub dim_coboundaries: usize,
    pub dim_quotient: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub complex: String,
    pub truncation: TruncationSpec,
    /// Cochains are the `C^inf(M)`-multilinear (tensorial) ones.
    pub cochains: &'static str,
    pub grades: Vec<GradeDimensions>,
}

impl CohomologyReport {
    pub fn dims(&self) -> Vec<usize> {
        self.grades.iter().map(|g| g.dim_quotient).collect()
    }

    pub fn grade(&self, k: usize) -> Option<&GradeDimensions> {
        self.grades.iter().find(|g| g.grade == k)
    }

    /// True when both reports have the same dimension tables.
    pub fn same_table(&self, other: &CohomologyReport) -> bool {
        self.truncation == other.truncation && self.grades == other.grades
    }
}

type RowKey = (Blade, Monomial);

/// A differential materialized on a basis; rows are keyed lazily.
struct Materialized {
    basis: Vec<RowKey>,
    columns: Vec<Vec<(RowKey, Scalar)>>,
}

fn materialize(complex: &Complex, spec: &TruncationSpec, k: usize, degree: u32) -> Result<Materialized> {
    let basis = spec.basis(k, degree)?;
    let columns = basis
        .par_iter()
        .map(|(b, m)| {
            let terms = complex.differential(k, b, Poly::term(m.clone(), scalar::one()))?;
            let mut col = Vec::new();
            for (blade, p) in terms {
                for (mono, c) in p.terms() {
                    col.push(((blade.clone(), mono.clone()), c.clone()));
                }
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Materialized { basis, columns })
}

impl Materialized {
    /// Numeric matrix over the columns selected by `keep_col`, with rows in
    /// sorted key order, optionally permuted. Returns the matrix and the row
    /// keys by index.
    fn matrix(&self, keep_col: impl Fn(&RowKey) -> bool, shuffle: Option<&mut ChaCha8Rng>) -> (SparseMatrix, Vec<RowKey>) {
        let mut keys: BTreeSet<&RowKey> = BTreeSet::new();
        let mut cols: Vec<usize> = Vec::new();
        for (j, b) in self.basis.iter().enumerate() {
            if keep_col(b) {
                cols.push(j);
                keys.extend(self.columns[j].iter().map(|(key, _)| key));
            }
        }
        let mut keys: Vec<RowKey> = keys.into_iter().cloned().collect();
        if let Some(rng) = shuffle {
            keys.shuffle(rng);
            cols.shuffle(rng);
        }
        let index: BTreeMap<&RowKey, usize> = keys.iter().enumerate().map(|(i, key)| (key, i)).collect();
        let columns: Vec<SparseVec> = cols
            .iter()
            .map(|&j| {
                let mut col = SparseVec::new();
                for (key, c) in &self.columns[j] {
                    col.insert(index[key], c.clone());
                }
                col
            })
            .collect();
        (SparseMatrix::from_columns(keys.len(), columns), keys)
    }
}

/// `dim(image ∩ W)` for the image of `m` and `W` the span of the rows kept by
/// `inside`: `rank(m) - rank(m restricted to the rows outside W)`.
fn image_within(m: &SparseMatrix, keys: &[RowKey], inside: impl Fn(&RowKey) -> bool) -> usize {
    let outside = m.select_rows(|r| !inside(&keys[r]));
    m.rank() - outside.rank()
}

pub fn compute_cohomology(complex: &Complex, spec: &TruncationSpec) -> Result<CohomologyReport> {
    compute_cohomology_shuffled(complex, spec, None)
}

/// As [`compute_cohomology`], with basis and row order permuted by a seeded
/// shuffle. The dimensions must not depend on it.
pub fn compute_cohomology_shuffled(complex: &Complex, spec: &TruncationSpec, shuffle: Option<u64>) -> Result<CohomologyReport> {
    if spec.min_grade > spec.max_grade {
        return Err(Error::Invalid(format!(
            "empty grade range {}..{}",
            spec.min_grade, spec.max_grade
        )));
    }
    let mut rng = shuffle.map(ChaCha8Rng::seed_from_u64);
    // the differential of grade j with coefficients of degree <= D + 1
    let mut wide: BTreeMap<usize, Materialized> = BTreeMap::new();
    let first = spec.min_grade.saturating_sub(1);
    for j in first..=spec.max_grade {
        wide.insert(j, materialize(complex, spec, j, spec.degree + 1)?);
    }
    let mut grades = Vec::new();
    for k in spec.grades() {
        let d = spec.degree;
        let (z_matrix, _) = wide[&k].matrix(|(_, m)| m.degree() <= d, rng.as_mut());
        let basis_size = z_matrix.ncols();
        let dim_cocycles = z_matrix.nullity();
        let dim_coboundaries = if k == 0 {
            0
        } else {
            let (b_matrix, keys) = wide[&(k - 1)].matrix(|_| true, rng.as_mut());
            image_within(&b_matrix, &keys, |(b, m)| spec.contains(b, m))
        };
        debug_assert!(dim_coboundaries <= dim_cocycles);
        grades.push(GradeDimensions {
            grade: k,
            basis_size,
            dim_cocycles,
            dim_coboundaries,
            dim_quotient: dim_cocycles - dim_coboundaries,
        });
    }
    Ok(CohomologyReport {
        complex: complex.name().to_string(),
        truncation: spec.clone(),
        cochains: "tensorial",
        grades,
    })
}

/// Functions in the truncation annihilated by the contravariant differential,
/// as a canonical rational basis sorted by leading monomial.
pub fn casimir_space(w: &ConstantSymplectic, spec: &TruncationSpec) -> Result<Vec<Poly>> {
    let complex = Complex::Lp(w.clone());
    let mat = materialize(&complex, spec, 0, spec.degree)?;
    let (m, _) = mat.matrix(|_| true, None);
    let mut out: Vec<Poly> = m
        .kernel()
        .into_iter()
        .map(|v| {
            Poly::from_terms(v.into_iter().map(|(j, c)| (mat.basis[j].1.clone(), c)))
        })
        .map(monic)
        .collect();
    out.sort_by(|a, b| a.leading().map(|t| t.0).cmp(&b.leading().map(|t| t.0)));
    Ok(out)
}

fn monic(p: Poly) -> Poly {
    match p.leading() {
        Some((_, c)) => {
            let inv = scalar::one() / c;
            p.scale(&inv)
        }
        None => p,
    }
}

/// Symplectic vector fields modulo Hamiltonian ones on a truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Decomposition {
    pub truncation: TruncationSpec,
    /// `dim {X : L_X w = 0}` over vector fields of degree `<= D`.
    pub dim_symplectic: usize,
    /// Dimension of the span of `X_f`, `deg f <= D + 1`, inside the
    /// truncation.
    pub dim_hamiltonian: usize,
    /// Whether every Hamiltonian field in the truncation is symplectic.
    pub hamiltonian_within_symplectic: bool,
    pub dim_quotient: usize,
    /// First cohomology of the contravariant complex on the same truncation.
    pub lp_h1: usize,
    pub agrees: bool,
}

pub fn h1_decomposition(w: &ConstantSymplectic, spec: &TruncationSpec) -> Result<H1Decomposition> {
    let support = spec.support_set();
    let omega = w.materialize(&w.closure(&support));
    let d = spec.degree;

    let fields = spec.basis(1, d)?;
    let lie_columns = fields
        .par_iter()
        .map(|(b, m)| {
            let x = KVector::from_terms(1, [(b.clone(), Poly::term(m.clone(), scalar::one()))])?;
            lie_derivative(&x, &omega)
        })
        .collect::<Result<Vec<KForm>>>()?;
    let lie = keyed_matrix(lie_columns.iter().map(|f| collect(f.terms())).collect());
    let dim_symplectic = lie.0.nullity();

    let functions = spec.basis(0, d + 1)?;
    let ham_columns = functions
        .par_iter()
        .map(|(_, m)| hamiltonian_vf_total(w, &Poly::term(m.clone(), scalar::one())))
        .collect::<Result<Vec<KVector>>>()?;
    let (ham, keys) = keyed_matrix(ham_columns.iter().map(|v| collect(v.terms())).collect());
    let dim_hamiltonian = image_within(&ham, &keys, |(b, m)| spec.contains(b, m));

    let hamiltonian_within_symplectic = ham_columns
        .par_iter()
        .map(|x| lie_derivative(x, &omega).map(|l| l.is_zero()))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|ok| ok);

    let lp = compute_cohomology(&Complex::Lp(w.clone()), &TruncationSpec { min_grade: 1, max_grade: 1, ..spec.clone() })?;
    let lp_h1 = lp.grades[0].dim_quotient;
    let dim_quotient = dim_symplectic.saturating_sub(dim_hamiltonian);
    Ok(H1Decomposition {
        truncation: spec.clone(),
        dim_symplectic,
        dim_hamiltonian,
        hamiltonian_within_symplectic,
        dim_quotient,
        lp_h1,
        agrees: hamiltonian_within_symplectic && dim_quotient == lp_h1,
    })
}

/// `X_f = sharp(df)` with the sharp map extended by zero off the form's
/// support, so that it is defined for degenerate constant forms too.
fn hamiltonian_vf_total(w: &ConstantSymplectic, f: &Poly) -> Result<KVector> {
    if w.is_invertible() && f.vars().iter().all(|&i| w.covers(i)) {
        return hamiltonian_vf(w, f);
    }
    Ok(-&sigma(w, &KVector::scalar(f.clone()))?)
}

/// Matrix of expanded graded elements with rows keyed by `(blade, monomial)`.
fn keyed_matrix(columns: Vec<Vec<(Blade, Poly)>>) -> (SparseMatrix, Vec<RowKey>) {
    let expanded: Vec<Vec<(RowKey, Scalar)>> = columns
        .into_iter()
        .map(|terms| {
            let mut col = Vec::new();
            for (b, p) in terms {
                for (m, c) in p.terms() {
                    col.push(((b.clone(), m.clone()), c.clone()));
                }
            }
            col
        })
        .collect();
    let mat = Materialized {
        basis: vec![(Blade::empty(), Monomial::one()); expanded.len()],
        columns: expanded,
    };
    mat.matrix(|_| true, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradeTrials {
    pub grade: usize,
    pub trials: usize,
    pub agreements: usize,
}

/// Comparison of the cotangent algebroid differential with the contravariant
/// differential, on random inputs and on cohomology tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub seed: u64,
    pub per_grade: Vec<GradeTrials>,
    /// The first disagreement, if any.
    pub witness: Option<String>,
    pub lp: CohomologyReport,
    pub ce_cotangent: CohomologyReport,
    pub tables_identical: bool,
    pub passed: bool,
}

pub fn theorem_check(w: &ConstantSymplectic, trials: usize, spec: &TruncationSpec, seed: u64) -> Result<TheoremReport> {
    let max_k = spec.support.len().min(3);
    let mut generator = Generator::new(seed, &spec.support, spec.degree);
    let inputs: Vec<(KVector, Vec<KForm>)> = (0..trials)
        .map(|t| {
            let k = t % (max_k + 1);
            let x = generator.vector(k);
            let args = (0..=k).map(|_| generator.form(1)).collect();
            (x, args)
        })
        .collect();
    let alg = CotangentAlgebroid::new(w.clone());
    let outcomes = inputs
        .par_iter()
        .map(|(x, args)| {
            let ce = ce_differential(&alg, x, args)?;
            let s = sigma(w, x)?.evaluate(args)?;
            Ok((ce == s).then_some(()).ok_or((ce, s)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_grade: Vec<GradeTrials> = (0..=max_k)
        .map(|grade| GradeTrials {
            grade,
            trials: 0,
            agreements: 0,
        })
        .collect();
    let mut witness = None;
    for ((x, args), outcome) in inputs.iter().zip(&outcomes) {
        let slot = &mut per_grade[x.grade()];
        slot.trials += 1;
        match outcome {
            Ok(()) => slot.agreements += 1,
            Err((ce, s)) if witness.is_none() => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                witness = Some(format!(
                    "X = {x}; args = ({}); ce = {ce}; sigma = {s}",
                    args.join(", ")
                ));
            }
            Err(_) => {}
        }
    }

    let lp = compute_cohomology(&Complex::Lp(w.clone()), spec)?;
    let ce_cotangent = compute_cohomology(&Complex::CeCotangent(w.clone()), spec)?;
    let tables_identical = lp.grades == ce_cotangent.grades;
    let passed = witness.is_none() && tables_identical;
    Ok(TheoremReport {
        seed,
        per_grade,
        witness,
        lp,
        ce_cotangent,
        tables_identical,
        passed,
    })
}
