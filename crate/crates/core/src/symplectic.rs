//! Constant-coefficient symplectic structures on the coordinate space, the
//! musical maps, Hamiltonian vector fields and the induced brackets.
//!
//! Sign conventions: `sharp(a)` is the field `X` with `i_X w = -a`, so that
//! `X_f = sharp(df)` satisfies `df = -w(X_f, .)`, and the induced pairing of
//! 1-forms is `w(a, b) = b(sharp a)`. With these, `{f, g} = w(X_f, X_g)`,
//! `w(df, dg) = {f, g}` and the contravariant differential of a function is
//! `-X_f`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::blade::Blade;
use crate::calculus::{de_rham, differential, lie_derivative};
use crate::error::{Error, Result};
use crate::graded::{pair, KForm, KVector};
use crate::linalg;
use crate::poly::{Poly, VarIndex};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymplecticKind {
    /// Pairs `(2i, 2i+1)` for every `i` with `w(d_{2i}, d_{2i+1}) = 1`;
    /// materialized lazily on whatever support an operation touches.
    Standard,
    /// An antisymmetric matrix `w(d_i, d_j)` over a finite index set; the
    /// form vanishes on every other coordinate.
    Explicit {
        indices: Vec<VarIndex>,
        matrix: Vec<Vec<Scalar>>,
    },
}

/// A closed 2-form with constant coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantSymplectic {
    kind: SymplecticKind,
    position: BTreeMap<VarIndex, usize>,
    inverse: Option<Vec<Vec<Scalar>>>,
}

impl ConstantSymplectic {
    pub fn standard() -> Self {
        ConstantSymplectic {
            kind: SymplecticKind::Standard,
            position: BTreeMap::new(),
            inverse: None,
        }
    }

    /// An explicit form on `indices`. The matrix must be square and
    /// antisymmetric; it may be singular, in which case the sharp map fails
    /// with `NotInvertible`.
    pub fn explicit(indices: Vec<VarIndex>, matrix: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = indices.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!(
                "symplectic matrix must be {n}x{n} to match its index list"
            )));
        }
        let position: BTreeMap<VarIndex, usize> =
            indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        if position.len() != n {
            return Err(Error::Invalid("symplectic index list repeats an index".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if matrix[i][j] != -matrix[j][i].clone() {
                    return Err(Error::Invalid(format!(
                        "symplectic matrix is not antisymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let inverse = invert(&matrix);
        Ok(ConstantSymplectic {
            kind: SymplecticKind::Explicit { indices, matrix },
            position,
            inverse,
        })
    }

    /// The zero form on no coordinates.
    pub fn zero() -> Self {
        Self::explicit(Vec::new(), Vec::new()).expect("empty matrix is valid")
    }

    pub fn kind(&self) -> &SymplecticKind {
        &self.kind
    }

    pub fn is_invertible(&self) -> bool {
        match self.kind {
            SymplecticKind::Standard => true,
            SymplecticKind::Explicit { .. } => self.inverse.is_some(),
        }
    }

    /// Whether `i` lies in the range where the form is defined (every index for
    /// the standard form).
    pub fn covers(&self, i: VarIndex) -> bool {
        match self.kind {
            SymplecticKind::Standard => true,
            SymplecticKind::Explicit { .. } => self.position.contains_key(&i),
        }
    }

    /// `w(d_i, d_j)`.
    pub fn omega(&self, i: VarIndex, j: VarIndex) -> Scalar {
        match &self.kind {
            SymplecticKind::Standard => {
                if i % 2 == 0 && j == i + 1 {
                    Scalar::one()
                } else if j % 2 == 0 && i == j + 1 {
                    -Scalar::one()
                } else {
                    Scalar::zero()
                }
            }
            SymplecticKind::Explicit { matrix, .. } => match (self.position.get(&i), self.position.get(&j)) {
                (Some(&a), Some(&b)) => matrix[a][b].clone(),
                _ => Scalar::zero(),
            },
        }
    }

    /// Indices `j` with `w(d_i, d_j) != 0`, with the value.
    pub fn partners(&self, i: VarIndex) -> Vec<(VarIndex, Scalar)> {
        match &self.kind {
            SymplecticKind::Standard => {
                let j = i ^ 1;
                vec![(j, self.omega(i, j))]
            }
            SymplecticKind::Explicit { indices, matrix } => match self.position.get(&i) {
                Some(&a) => indices
                    .iter()
                    .zip(&matrix[a])
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(&j, v)| (j, v.clone()))
                    .collect(),
                None => Vec::new(),
            },
        }
    }

    /// Components of `sharp(dx_i)`: pairs `(j, c)` with
    /// `sharp(dx_i) = sum c * d_j`. Empty outside the covered range.
    pub fn sharp_components(&self, i: VarIndex) -> Result<Vec<(VarIndex, Scalar)>> {
        match &self.kind {
            SymplecticKind::Standard => {
                // inverse of [[0, 1], [-1, 0]] is [[0, -1], [1, 0]]
                let j = i ^ 1;
                let c = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                Ok(vec![(j, c)])
            }
            SymplecticKind::Explicit { indices, .. } => {
                let inv = self.inverse.as_ref().ok_or(Error::NotInvertible { index: None })?;
                let Some(&a) = self.position.get(&i) else {
                    return Ok(Vec::new());
                };
                Ok(indices
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| !inv[*b][a].is_zero())
                    .map(|(b, &j)| (j, inv[b][a].clone()))
                    .collect())
            }
        }
    }

    /// Indices `i` for which `sharp(dx_i)` differentiates some variable in
    /// `vars`: the coordinates a contravariant operator can reach from them.
    pub fn reach(&self, vars: &BTreeSet<VarIndex>) -> BTreeSet<VarIndex> {
        match &self.kind {
            SymplecticKind::Standard => vars.iter().map(|&v| v ^ 1).collect(),
            SymplecticKind::Explicit { .. } => {
                let mut out = BTreeSet::new();
                for &v in vars {
                    for (j, _) in self.partners(v) {
                        out.insert(j);
                    }
                }
                out
            }
        }
    }

    /// `support` together with all partner indices.
    pub fn closure(&self, support: &BTreeSet<VarIndex>) -> BTreeSet<VarIndex> {
        let mut out = support.clone();
        for &i in support {
            out.extend(self.partners(i).into_iter().map(|(j, _)| j));
        }
        out
    }

    /// The 2-form `sum_{i<j} w(d_i, d_j) dx_i ^ dx_j` restricted to the terms
    /// touching `support`.
    pub fn materialize(&self, support: &BTreeSet<VarIndex>) -> KForm {
        let mut out = KForm::zero(2);
        for &i in support {
            for (j, v) in self.partners(i) {
                if i < j || !support.contains(&j) {
                    let (flip, b) = Blade::from_unsorted(&[i, j]).expect("distinct");
                    // coefficient of dx_min ^ dx_max is w(d_min, d_max)
                    let c = if flip { -v } else { v };
                    out.add_term(b, Poly::constant(c));
                }
            }
        }
        out
    }
}

fn invert(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = linalg::rref(&mut aug, 2 * n);
    if pivots.len() < n || pivots[..n] != (0..n).collect::<Vec<_>>()[..] {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn require_grade<V: crate::graded::Variance>(
    op: &'static str,
    t: &crate::graded::Graded<V>,
    grade: usize,
) -> Result<()> {
    if t.grade() != grade {
        return Err(Error::grade(op, grade.to_string(), t.grade()));
    }
    Ok(())
}

/// `i_X w`.
pub fn flat(w: &ConstantSymplectic, x: &KVector) -> Result<KForm> {
    require_grade("flat", x, 1)?;
    let mut out = KForm::zero(1);
    for (b, c) in x.terms() {
        let i = b.indices()[0];
        for (j, v) in w.partners(i) {
            out.add_term(Blade::single(j), c.scale(&v));
        }
    }
    Ok(out)
}

/// The unique `X` with `i_X w = -a`. Fails with `NotInvertible` when the
/// form is singular or `a` has a component outside the form's range.
pub fn sharp(w: &ConstantSymplectic, a: &KForm) -> Result<KVector> {
    require_grade("sharp", a, 1)?;
    for (b, _) in a.terms() {
        let i = b.indices()[0];
        if !w.covers(i) {
            return Err(Error::NotInvertible { index: Some(i) });
        }
    }
    poisson_sharp(w, a)
}

/// Contraction with the Poisson bivector of `w`: agrees with [`sharp`]
/// wherever that is defined and sends components outside an explicit form's
/// range to zero (those coordinates are Casimirs).
pub fn poisson_sharp(w: &ConstantSymplectic, a: &KForm) -> Result<KVector> {
    require_grade("sharp", a, 1)?;
    let mut out = KVector::zero(1);
    for (b, c) in a.terms() {
        for (j, v) in w.sharp_components(b.indices()[0])? {
            out.add_term(Blade::single(j), c.scale(&v));
        }
    }
    Ok(out)
}

/// The symplectic gradient `X_f = sharp(df)`, so `df = -i_{X_f} w`.
pub fn hamiltonian_vf(w: &ConstantSymplectic, f: &Poly) -> Result<KVector> {
    sharp(w, &differential(f))
}

/// `w(a, b) = b(sharp a)` on 1-forms.
pub fn induced_pairing(w: &ConstantSymplectic, a: &KForm, b: &KForm) -> Result<Poly> {
    require_grade("induced_pairing", b, 1)?;
    Ok(pair(b, &poisson_sharp(w, a)?))
}

/// `{f, g} = w(X_f, X_g)`, computed as `w(df, dg)`.
pub fn poisson_bracket(w: &ConstantSymplectic, f: &Poly, g: &Poly) -> Result<Poly> {
    induced_pairing(w, &differential(f), &differential(g))
}

/// `{a, b} = L_{sharp a} b - L_{sharp b} a - d w(a, b)`.
pub fn oneform_bracket(w: &ConstantSymplectic, a: &KForm, b: &KForm) -> Result<KForm> {
    require_grade("oneform_bracket", a, 1)?;
    require_grade("oneform_bracket", b, 1)?;
    let la = lie_derivative(&poisson_sharp(w, a)?, b)?;
    let lb = lie_derivative(&poisson_sharp(w, b)?, a)?;
    let dp = differential(&induced_pairing(w, a, b)?);
    Ok(&(&la - &lb) - &dp)
}

/// A 2-form handed to the weak-symplectic check.
#[derive(Clone, Copy, Debug)]
pub enum TwoForm<'a> {
    Form(&'a KForm),
    Constant(&'a ConstantSymplectic),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum WeakSymplecticVerdict {
    Pass,
    NotClosed,
    NotInjective,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakSymplecticReport {
    pub support: Vec<VarIndex>,
    pub closed: bool,
    /// `dw` when it is nonzero.
    pub closedness_witness: Option<KForm>,
    /// Rank of the flat map over the field of rational functions.
    pub rank: usize,
    pub injective: bool,
    /// A vector field in the kernel of the flat map, when one exists.
    pub kernel_witness: Option<KVector>,
    /// Non-constant pivots; injectivity may fail on their zero sets.
    pub caveats: Vec<Poly>,
}

impl WeakSymplecticReport {
    pub fn verdict(&self) -> WeakSymplecticVerdict {
        if !self.closed {
            WeakSymplecticVerdict::NotClosed
        } else if !self.injective {
            WeakSymplecticVerdict::NotInjective
        } else {
            WeakSymplecticVerdict::Pass
        }
    }
}

/// Checks closedness and injectivity of `v -> i_v w` on the tangent fibre
/// spanned by `support`. For polynomial forms the rank is taken at the
/// generic point; the zero sets of the non-constant pivots are listed as
/// caveats rather than analyzed.
pub fn check_weak_symplectic(w: TwoForm<'_>, support: &BTreeSet<VarIndex>) -> Result<WeakSymplecticReport> {
    let form = match w {
        TwoForm::Form(f) => {
            require_grade("check_weak_symplectic", f, 2)?;
            f.clone()
        }
        TwoForm::Constant(c) => c.materialize(support),
    };
    let dw = de_rham(&form);
    let cols: Vec<VarIndex> = support.iter().copied().collect();
    let mut row_idx: BTreeSet<VarIndex> = support.clone();
    row_idx.extend(form.blade_indices());
    let rows: Vec<VarIndex> = row_idx.into_iter().collect();
    let images: Vec<KForm> = cols
        .iter()
        .map(|&i| form.contract(&KVector::unit(i)))
        .collect::<Result<_>>()?;
    let matrix: Vec<Vec<Poly>> = rows
        .iter()
        .map(|&j| images.iter().map(|img| img.component(j)).collect())
        .collect();
    let (rank, pivots) = linalg::generic_rank(&matrix, cols.len());
    let mut caveats: Vec<Poly> = pivots.iter().map(normalize).collect();
    caveats.sort_by_key(|p| p.to_string());
    caveats.dedup();
    let kernel_witness = linalg::kernel_witness(&matrix, cols.len()).map(|v| {
        let v: Vec<Poly> = {
            let lead = v.iter().find(|p| !p.is_zero()).and_then(|p| p.leading().map(|(_, c)| c.clone()));
            let inv = lead.map(|c| c.recip()).unwrap_or_else(scalar::one);
            v.iter().map(|p| p.scale(&inv)).collect()
        };
        KVector::from_components(cols.iter().copied().zip(v))
    });
    Ok(WeakSymplecticReport {
        support: cols.clone(),
        closed: dw.is_zero(),
        closedness_witness: (!dw.is_zero()).then_some(dw),
        rank,
        injective: rank == cols.len(),
        kernel_witness,
        caveats,
    })
}

/// Scales a polynomial so its leading coefficient is 1.
fn normalize(p: &Poly) -> Poly {
    match p.leading() {
        Some((_, c)) => p.scale(&c.recip()),
        None => p.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::lie_bracket;
    use crate::scalar::int;

    fn x(i: VarIndex) -> Poly {
        Poly::var(i)
    }
    fn dx(i: VarIndex) -> KForm {
        KForm::unit(i)
    }
    fn e(i: VarIndex) -> KVector {
        KVector::unit(i)
    }
    fn std() -> ConstantSymplectic {
        ConstantSymplectic::standard()
    }
    fn set(ix: &[VarIndex]) -> BTreeSet<VarIndex> {
        ix.iter().copied().collect()
    }

    #[test]
    fn flat_examples() {
        assert_eq!(flat(&std(), &e(0)).unwrap(), dx(1));
        assert_eq!(flat(&std(), &e(1)).unwrap(), -dx(0));
        assert!(flat(&std(), &KVector::zero(1)).unwrap().is_zero());
        // agrees with contraction into the materialized form
        let w = std().materialize(&set(&[0, 1, 2, 3]));
        let v = &e(0).scale(&x(3)) + &e(3);
        assert_eq!(flat(&std(), &v).unwrap(), w.contract(&v).unwrap());
    }

    #[test]
    fn sharp_examples() {
        assert_eq!(sharp(&std(), &dx(0)).unwrap(), e(1));
        let v = &e(0).scale(&x(2)) - &e(5);
        assert_eq!(sharp(&std(), &flat(&std(), &v).unwrap()).unwrap(), -&v);
        assert!(sharp(&std(), &KForm::zero(1)).unwrap().is_zero());
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian_vf(&std(), &x(0)).unwrap(), e(1));
        assert_eq!(hamiltonian_vf(&std(), &x(1)).unwrap(), -e(0));
        assert!(hamiltonian_vf(&std(), &Poly::int(4)).unwrap().is_zero());
    }

    #[test]
    fn poisson_bracket_examples() {
        assert_eq!(poisson_bracket(&std(), &x(0), &x(1)).unwrap(), Poly::one());
        let f = &x(0) * &x(3) + x(2);
        assert!(poisson_bracket(&std(), &f, &f).unwrap().is_zero());
        assert!(poisson_bracket(&std(), &x(0), &x(2)).unwrap().is_zero());
        // {f, g} = w(X_f, X_g) by the defining formula
        let g = x(1).pow(2);
        let xf = hamiltonian_vf(&std(), &f).unwrap();
        let xg = hamiltonian_vf(&std(), &g).unwrap();
        let w = std().materialize(&set(&[0, 1, 2, 3]));
        assert_eq!(
            poisson_bracket(&std(), &f, &g).unwrap(),
            w.evaluate(&[xf, xg]).unwrap()
        );
    }

    #[test]
    fn oneform_bracket_examples() {
        assert!(oneform_bracket(&std(), &dx(0), &dx(1)).unwrap().is_zero());
        let a = &dx(0).scale(&x(1)) + &dx(2);
        assert!(oneform_bracket(&std(), &a, &a).unwrap().is_zero());
        let lhs = oneform_bracket(&std(), &differential(&x(0).pow(2)), &dx(1)).unwrap();
        assert_eq!(lhs, dx(0).scale(&Poly::int(2)));
        let rhs = differential(&poisson_bracket(&std(), &x(0).pow(2), &x(1)).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn induced_pairing_examples() {
        assert_eq!(induced_pairing(&std(), &dx(0), &dx(1)).unwrap(), Poly::one());
        let a = &dx(3).scale(&x(0)) + &dx(1);
        assert!(induced_pairing(&std(), &a, &a).unwrap().is_zero());
        let f = &x(0) * &x(1);
        let g = x(1);
        assert_eq!(
            induced_pairing(&std(), &differential(&f), &differential(&g)).unwrap(),
            poisson_bracket(&std(), &f, &g).unwrap()
        );
    }

    #[test]
    fn explicit_form_and_casimir_directions() {
        let w = ConstantSymplectic::explicit(vec![0, 1], vec![vec![int(0), int(1)], vec![int(-1), int(0)]]).unwrap();
        assert_eq!(sharp(&w, &dx(0)).unwrap(), e(1));
        assert_eq!(
            sharp(&w, &dx(2)),
            Err(Error::NotInvertible { index: Some(2) })
        );
        assert!(poisson_sharp(&w, &dx(2)).unwrap().is_zero());
        let singular = ConstantSymplectic::explicit(vec![0, 1], vec![vec![int(0), int(0)], vec![int(0), int(0)]]).unwrap();
        assert_eq!(sharp(&singular, &dx(0)), Err(Error::NotInvertible { index: None }));
        assert!(ConstantSymplectic::explicit(vec![0, 1], vec![vec![int(0), int(1)], vec![int(1), int(0)]]).is_err());
    }

    #[test]
    fn weak_symplectic_checks() {
        let r = check_weak_symplectic(TwoForm::Constant(&std()), &set(&[0, 1, 2, 3])).unwrap();
        assert_eq!(r.verdict(), WeakSymplecticVerdict::Pass);
        assert_eq!(r.rank, 4);

        let w = dx(0).wedge(&dx(1));
        let r = check_weak_symplectic(TwoForm::Form(&w), &set(&[0, 1, 2])).unwrap();
        assert_eq!(r.verdict(), WeakSymplecticVerdict::NotInjective);
        assert_eq!(r.kernel_witness, Some(e(2)));

        let w = dx(0).wedge(&dx(1)).scale(&x(0));
        let r = check_weak_symplectic(TwoForm::Form(&w), &set(&[0, 1])).unwrap();
        assert!(r.closed);
        assert_eq!(r.verdict(), WeakSymplecticVerdict::Pass);
        assert_eq!(r.caveats, vec![x(0), x(0).pow(2)]);

        let w = dx(1).wedge(&dx(2)).scale(&x(0));
        let r = check_weak_symplectic(TwoForm::Form(&w), &set(&[0, 1, 2])).unwrap();
        assert_eq!(r.verdict(), WeakSymplecticVerdict::NotClosed);
        assert_eq!(r.closedness_witness, Some(dx(0).wedge(&dx(1)).wedge(&dx(2))));
    }

    #[test]
    fn anchor_is_a_homomorphism_on_coordinate_forms() {
        let a = dx(0).scale(&x(1));
        let b = &dx(1).scale(&x(0).pow(2)) + &dx(3);
        let lhs = poisson_sharp(&std(), &oneform_bracket(&std(), &a, &b).unwrap()).unwrap();
        let rhs = lie_bracket(&poisson_sharp(&std(), &a).unwrap(), &poisson_sharp(&std(), &b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
