//! Differential forms and multivector fields with polynomial coefficients.
//!
//! Both are sums `sum_I c_I * b_I` over canonical blades `b_I`; they differ
//! only in variance, which is tracked at the type level so that forms and
//! multivectors can never be mixed by accident. Evaluation uses the
//! determinant convention: `(dx0 ^ dx1)(d0, d1) = 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::poly::{Poly, VarIndex};
use crate::scalar::Scalar;

pub trait Variance:
    Clone + Copy + PartialEq + Eq + Hash + fmt::Debug + Default + Send + Sync + 'static
{
    type Dual: Variance<Dual = Self>;
    /// Basis symbol in the model language (`dx` or `e`).
    const BASIS: &'static str;
}

/// Covariant: differential forms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Co;

/// Contravariant: vector and multivector fields.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Contra;

impl Variance for Co {
    type Dual = Contra;
    const BASIS: &'static str = "dx";
}

impl Variance for Contra {
    type Dual = Co;
    const BASIS: &'static str = "e";
}

/// A homogeneous element of grade `k` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graded<V: Variance> {
    grade: usize,
    terms: BTreeMap<Blade, Poly>,
    _variance: PhantomData<V>,
}

/// A differential k-form.
pub type KForm = Graded<Co>;
/// A k-vector field.
pub type KVector = Graded<Contra>;

impl<V: Variance> Graded<V> {
    pub fn zero(grade: usize) -> Self {
        Graded {
            grade,
            terms: BTreeMap::new(),
            _variance: PhantomData,
        }
    }

    pub fn scalar(p: Poly) -> Self {
        let mut out = Self::zero(0);
        out.add_term(Blade::empty(), p);
        out
    }

    pub fn basis(blade: Blade) -> Self {
        let mut out = Self::zero(blade.grade());
        out.add_term(blade, Poly::one());
        out
    }

    /// The grade-1 basis element `dx_i` or `e_i`.
    pub fn unit(i: VarIndex) -> Self {
        Self::basis(Blade::single(i))
    }

    /// Builds a grade-1 element from `(index, coefficient)` pairs.
    pub fn from_components<I: IntoIterator<Item = (VarIndex, Poly)>>(components: I) -> Self {
        let mut out = Self::zero(1);
        for (i, p) in components {
            out.add_term(Blade::single(i), p);
        }
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (Blade, Poly)>>(grade: usize, terms: I) -> Result<Self> {
        let mut out = Self::zero(grade);
        for (b, p) in terms {
            if b.grade() != grade {
                return Err(Error::grade("from_terms", grade.to_string(), b.grade()));
            }
            out.add_term(b, p);
        }
        Ok(out)
    }

    /// Adds `p * blade`. The blade must have this element's grade.
    pub fn add_term(&mut self, blade: Blade, p: Poly) {
        debug_assert_eq!(blade.grade(), self.grade, "blade grade mismatch");
        if p.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &p;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add_signed(&mut self, flip: bool, blade: Blade, p: Poly) {
        self.add_term(blade, if flip { -p } else { p });
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, blade: &Blade) -> Poly {
        self.terms.get(blade).cloned().unwrap_or_default()
    }

    /// Coefficient of the grade-1 basis element with index `i`.
    pub fn component(&self, i: VarIndex) -> Poly {
        if self.grade != 1 {
            return Poly::zero();
        }
        self.coefficient(&Blade::single(i))
    }

    /// The coefficient of a grade-0 element.
    pub fn as_poly(&self) -> Option<Poly> {
        (self.grade == 0).then(|| self.coefficient(&Blade::empty()))
    }

    /// Indices occurring in blades.
    pub fn blade_indices(&self) -> BTreeSet<VarIndex> {
        self.terms.keys().flat_map(|b| b.indices().iter().copied()).collect()
    }

    /// Variables occurring in coefficients.
    pub fn coefficient_vars(&self) -> BTreeSet<VarIndex> {
        self.terms.values().flat_map(|p| p.vars()).collect()
    }

    /// Every coordinate this element references.
    pub fn support(&self) -> BTreeSet<VarIndex> {
        let mut s = self.blade_indices();
        s.extend(self.coefficient_vars());
        s
    }

    /// Largest total degree among the coefficients.
    pub fn max_degree(&self) -> u32 {
        self.terms.values().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&Poly) -> Poly) -> Self {
        let mut out = Self::zero(self.grade);
        for (b, p) in &self.terms {
            out.add_term(b.clone(), f(p));
        }
        out
    }

    pub fn scale(&self, f: &Poly) -> Self {
        self.map_coefficients(|p| p * f)
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Self {
        self.map_coefficients(|p| p.scale(c))
    }

    /// Sum of two elements; fails on a grade mismatch unless one side is zero.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.grade != other.grade {
            if other.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(other.clone());
            }
            return Err(Error::grade("add", self.grade.to_string(), other.grade));
        }
        let mut out = self.clone();
        for (b, p) in &other.terms {
            out.add_term(b.clone(), p.clone());
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.grade + other.grade);
        for (ba, pa) in &self.terms {
            for (bb, pb) in &other.terms {
                if let Some((flip, b)) = ba.wedge(bb) {
                    out.add_signed(flip, b, pa * pb);
                }
            }
        }
        out
    }

    /// Insertion of a grade-1 dual element into the first slot:
    /// `(i_v t)(a_1, ..., a_{k-1}) = t(v, a_1, ..., a_{k-1})`.
    pub fn contract(&self, v: &Graded<V::Dual>) -> Result<Self> {
        if v.grade != 1 {
            return Err(Error::grade("contract", "1", v.grade));
        }
        if self.grade == 0 {
            return Err(Error::grade("contract", ">= 1", 0));
        }
        let mut out = Self::zero(self.grade - 1);
        for (vb, vp) in &v.terms {
            let i = vb.indices()[0];
            for (b, p) in &self.terms {
                if let Some((flip, rest)) = b.remove(i) {
                    out.add_signed(flip, rest, vp * p);
                }
            }
        }
        Ok(out)
    }

    /// Full evaluation `t(a_1, ..., a_k)` on grade-1 dual arguments.
    pub fn evaluate(&self, args: &[Graded<V::Dual>]) -> Result<Poly> {
        if args.len() != self.grade {
            return Err(Error::Arity {
                expected: self.grade,
                found: args.len(),
            });
        }
        if self.grade == 0 {
            return Ok(self.coefficient(&Blade::empty()));
        }
        // Expand multilinearly over basis components of the arguments.
        let mut acc = Poly::zero();
        for (b, p) in &self.terms {
            acc += &(p * &blade_determinant(b, args));
        }
        Ok(acc)
    }

    /// Renders a blade in the model language, e.g. `dx[0]^^dx[2]`.
    pub fn blade_symbol(b: &Blade) -> String {
        b.indices()
            .iter()
            .map(|i| format!("{}[{i}]", V::BASIS))
            .collect::<Vec<_>>()
            .join("^^")
    }
}

/// `det[ a_j(component i_m) ]` for the blade indices `i_1 < ... < i_k`:
/// the value of the basis blade on the given arguments.
fn blade_determinant<W: Variance>(b: &Blade, args: &[Graded<W>]) -> Poly {
    let idx = b.indices();
    let k = idx.len();
    let matrix: Vec<Vec<Poly>> = args
        .iter()
        .map(|a| idx.iter().map(|&i| a.component(i)).collect())
        .collect();
    // Laplace expansion along the first row; k is tiny.
    fn det(m: &[Vec<Poly>], cols: &mut Vec<usize>, row: usize) -> Poly {
        if row == m.len() {
            return Poly::one();
        }
        let mut acc = Poly::zero();
        let mut sign_neg = false;
        for pos in 0..cols.len() {
            let c = cols[pos];
            let entry = &m[row][c];
            if !entry.is_zero() {
                let removed = cols.remove(pos);
                let minor = det(m, cols, row + 1);
                cols.insert(pos, removed);
                let t = entry * &minor;
                if sign_neg {
                    acc -= &t;
                } else {
                    acc += &t;
                }
            }
            sign_neg = !sign_neg;
        }
        acc
    }
    let mut cols: Vec<usize> = (0..k).collect();
    det(&matrix, &mut cols, 0)
}

impl KVector {
    /// Applies a vector field to a function as a derivation: `X(f)`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut acc = Poly::zero();
        if self.grade != 1 {
            return acc;
        }
        for (b, p) in &self.terms {
            let d = f.partial(b.indices()[0]);
            if !d.is_zero() {
                acc += &(p * &d);
            }
        }
        acc
    }
}

/// `a(X)` for a 1-form and a vector field.
pub fn pair(a: &KForm, x: &KVector) -> Poly {
    let mut acc = Poly::zero();
    for (b, p) in a.terms() {
        let q = x.component(b.indices()[0]);
        if !q.is_zero() {
            acc += &(p * &q);
        }
    }
    acc
}

impl<V: Variance> Add for &Graded<V> {
    type Output = Graded<V>;
    fn add(self, rhs: &Graded<V>) -> Graded<V> {
        self.checked_add(rhs).expect("grade mismatch in addition")
    }
}

impl<V: Variance> Add for Graded<V> {
    type Output = Graded<V>;
    fn add(self, rhs: Graded<V>) -> Graded<V> {
        &self + &rhs
    }
}

impl<V: Variance> Neg for &Graded<V> {
    type Output = Graded<V>;
    fn neg(self) -> Graded<V> {
        self.map_coefficients(|p| -p)
    }
}

impl<V: Variance> Neg for Graded<V> {
    type Output = Graded<V>;
    fn neg(self) -> Graded<V> {
        -&self
    }
}

impl<V: Variance> Sub for &Graded<V> {
    type Output = Graded<V>;
    fn sub(self, rhs: &Graded<V>) -> Graded<V> {
        self + &(-rhs)
    }
}

impl<V: Variance> Sub for Graded<V> {
    type Output = Graded<V>;
    fn sub(self, rhs: Graded<V>) -> Graded<V> {
        &self - &rhs
    }
}

impl<V: Variance> fmt::Display for Graded<V> {
    /// Model-language syntax, e.g. `x0*dx[1]^^dx[2] - (x1 + 1)*dx[0]^^dx[2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.grade == 0 {
            return write!(f, "{}", self.coefficient(&Blade::empty()));
        }
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (b, p)) in self.terms.iter().enumerate() {
            let sym = Self::blade_symbol(b);
            let neg_one = -Poly::one();
            let term = if *p == Poly::one() {
                sym
            } else if *p == neg_one {
                format!("-{sym}")
            } else if p.num_terms() == 1 {
                format!("{p}*{sym}")
            } else {
                format!("({p})*{sym}")
            };
            match (k, term.strip_prefix('-')) {
                (0, _) => f.write_str(&term)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: VarIndex) -> Poly {
        Poly::var(i)
    }

    fn dx(i: VarIndex) -> KForm {
        KForm::unit(i)
    }

    fn e(i: VarIndex) -> KVector {
        KVector::unit(i)
    }

    fn blade(ix: &[VarIndex]) -> Blade {
        Blade::from_unsorted(ix).unwrap().1
    }

    #[test]
    fn wedge_basis_and_antisymmetry() {
        let w = dx(0).wedge(&dx(1));
        assert_eq!(w.coefficient(&blade(&[0, 1])), Poly::one());
        assert_eq!(dx(1).wedge(&dx(0)), -&w);
        assert!(dx(2).wedge(&dx(2)).is_zero());
    }

    #[test]
    fn wedge_bilinear_expansion() {
        // (x0 dx0) ^ (x1 dx1 + dx2) = x0 x1 dx0^dx1 + x0 dx0^dx2
        let a = dx(0).scale(&x(0));
        let b = &dx(1).scale(&x(1)) + &dx(2);
        let got = a.wedge(&b);
        let want = KForm::from_terms(
            2,
            [(blade(&[0, 1]), &x(0) * &x(1)), (blade(&[0, 2]), x(0))],
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn contraction_examples() {
        let w = dx(0).wedge(&dx(1));
        assert_eq!(w.contract(&e(0)).unwrap(), dx(1));
        assert!(w.contract(&e(2)).unwrap().is_zero());
        // i_{x1 d0}(x0 dx0^dx1) = x0 x1 dx1
        let got = w.scale(&x(0)).contract(&e(0).scale(&x(1))).unwrap();
        assert_eq!(got, dx(1).scale(&(&x(0) * &x(1))));
        assert!(matches!(
            KForm::scalar(x(0)).contract(&e(0)),
            Err(Error::Grade { .. })
        ));
    }

    #[test]
    fn evaluation_is_determinant() {
        let w = dx(0).wedge(&dx(1));
        assert_eq!(w.evaluate(&[e(0), e(1)]).unwrap(), Poly::one());
        assert_eq!(w.evaluate(&[e(1), e(0)]).unwrap(), Poly::int(-1));
        let a = &e(0) + &e(1).scale(&x(2));
        let b = e(0).scale(&x(3));
        // det [[1, x2], [x3, 0]] = -x2 x3
        assert_eq!(w.evaluate(&[a.clone(), b.clone()]).unwrap(), -(&x(2) * &x(3)));
        // evaluation agrees with iterated contraction
        let iterated = w.contract(&a).unwrap().contract(&b).unwrap().as_poly().unwrap();
        assert_eq!(iterated, -(&x(2) * &x(3)));
        assert!(matches!(w.evaluate(&[a]), Err(Error::Arity { .. })));
    }

    #[test]
    fn display_syntax() {
        let w = &dx(0).wedge(&dx(1)).scale(&(&x(0) + &Poly::one())) - &dx(2).wedge(&dx(3));
        assert_eq!(w.to_string(), "(x0 + 1)*dx[0]^^dx[1] - dx[2]^^dx[3]");
        let v = &e(1).scale(&Poly::int(-2)) + &e(0);
        assert_eq!(v.to_string(), "e[0] - 2*e[1]");
        assert_eq!(KVector::zero(2).to_string(), "0");
    }

    #[test]
    fn vector_field_acts_as_derivation() {
        let v = &e(0).scale(&x(1)) + &e(1);
        let f = &x(0) * &x(1);
        assert_eq!(v.apply(&f), &x(1).pow(2) + &x(0));
        assert_eq!(pair(&dx(0), &v), x(1));
    }
}
