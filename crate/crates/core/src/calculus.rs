//! Cartan calculus on polynomial forms and multivector fields.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graded::{KForm, KVector};
use crate::poly::{Poly, VarIndex};

pub fn partial_derivative(p: &Poly, i: VarIndex) -> Poly {
    p.partial(i)
}

/// Interior product `i_X w` of a vector field into the first slot.
pub fn interior(x: &KVector, w: &KForm) -> Result<KForm> {
    if x.grade() != 1 {
        return Err(Error::grade("interior", "1", x.grade()));
    }
    if w.grade() == 0 {
        return Err(Error::grade("interior", ">= 1", 0));
    }
    w.contract(x)
}

/// Lie bracket of vector fields,
/// `[X, Y]^i = sum_j (X^j d_j Y^i - Y^j d_j X^i)`.
pub fn lie_bracket(x: &KVector, y: &KVector) -> Result<KVector> {
    if x.grade() != 1 {
        return Err(Error::grade("lie_bracket", "1", x.grade()));
    }
    if y.grade() != 1 {
        return Err(Error::grade("lie_bracket", "1", y.grade()));
    }
    let mut out = KVector::zero(1);
    for (b, yi) in y.terms() {
        out.add_term(b.clone(), x.apply(yi));
    }
    for (b, xi) in x.terms() {
        out.add_term(b.clone(), -y.apply(xi));
    }
    Ok(out)
}

/// Exterior derivative via `d(f dx_I) = sum_j (d_j f) dx_j ^ dx_I`.
pub fn de_rham(w: &KForm) -> KForm {
    let mut out = KForm::zero(w.grade() + 1);
    for (b, p) in w.terms() {
        for j in p.vars() {
            if let Some((flip, nb)) = b.prepend(j) {
                let d = p.partial(j);
                out.add_term(nb, if flip { -d } else { d });
            }
        }
    }
    out
}

/// Exterior derivative of a function as a 1-form.
pub fn differential(f: &Poly) -> KForm {
    de_rham(&KForm::scalar(f.clone()))
}

/// Lie derivative by the Cartan formula `L_X = d i_X + i_X d`; on functions
/// `L_X f = X(f)`.
pub fn lie_derivative(x: &KVector, w: &KForm) -> Result<KForm> {
    if x.grade() != 1 {
        return Err(Error::grade("lie_derivative", "1", x.grade()));
    }
    if w.grade() == 0 {
        return Ok(KForm::scalar(x.apply(&w.as_poly().unwrap_or_default())));
    }
    let d_ix = de_rham(&w.contract(x)?);
    let ix_d = de_rham(w).contract(x)?;
    Ok(&d_ix + &ix_d)
}

/// Value of `d w` on vector fields by the invariant formula
///
/// `dw(X_0..X_k) = sum_i (-1)^i X_i(w(..^i..)) + sum_{i<j} (-1)^{i+j} w([X_i,X_j], ..^i..^j..)`.
///
/// This never touches the coordinate expression of `d` and is used to check it.
pub fn de_rham_invariant(w: &KForm, fields: &[KVector]) -> Result<Poly> {
    let k = w.grade();
    if fields.len() != k + 1 {
        return Err(Error::Arity {
            expected: k + 1,
            found: fields.len(),
        });
    }
    let mut acc = Poly::zero();
    for i in 0..=k {
        let rest: Vec<KVector> = omit(fields, &[i]);
        let term = fields[i].apply(&w.evaluate(&rest)?);
        add_signed(&mut acc, i, &term);
    }
    for i in 0..=k {
        for j in i + 1..=k {
            let mut args = vec![lie_bracket(&fields[i], &fields[j])?];
            args.extend(omit(fields, &[i, j]));
            add_signed(&mut acc, i + j, &w.evaluate(&args)?);
        }
    }
    Ok(acc)
}

pub(crate) fn omit<T: Clone>(items: &[T], skip: &[usize]) -> Vec<T> {
    items
        .iter()
        .enumerate()
        .filter(|(n, _)| !skip.contains(n))
        .map(|(_, t)| t.clone())
        .collect()
}

pub(crate) fn add_signed(acc: &mut Poly, exponent: usize, term: &Poly) {
    if exponent % 2 == 0 {
        *acc += term;
    } else {
        *acc -= term;
    }
}

/// Grassmann derivative of a multivector with respect to `e_i` taken from the
/// right (`right = true`) or the left.
fn odd_derivative(p: &KVector, i: VarIndex, right: bool) -> KVector {
    let k = p.grade();
    let mut out = KVector::zero(k.saturating_sub(1));
    if k == 0 {
        return out;
    }
    for (b, c) in p.terms() {
        if let Some((flip_left, rest)) = b.remove(i) {
            // moving e_i to the front costs `pos` swaps, to the back `k-1-pos`
            let flip = if right { (k % 2 == 0) != flip_left } else { flip_left };
            out.add_term(rest, if flip { -c.clone() } else { c.clone() });
        }
    }
    out
}

fn coordinate_derivative(p: &KVector, i: VarIndex) -> KVector {
    p.map_coefficients(|c| c.partial(i))
}

/// The odd Poisson bracket of multivector fields viewed as functions of the
/// coordinates and odd variables `e_i`:
/// `sum_i (dP/de_i)_right ^ dQ/dx_i - dP/dx_i ^ (dQ/de_i)_left`.
fn odd_bracket(p: &KVector, q: &KVector) -> KVector {
    let mut out = KVector::zero((p.grade() + q.grade()).saturating_sub(1));
    if p.grade() + q.grade() == 0 {
        return out;
    }
    let mut indices: BTreeSet<VarIndex> = p.support();
    indices.extend(q.support());
    for i in indices {
        let pr = odd_derivative(p, i, true);
        let qx = coordinate_derivative(q, i);
        if !pr.is_zero() && !qx.is_zero() {
            out = &out + &pr.wedge(&qx);
        }
        let px = coordinate_derivative(p, i);
        let ql = odd_derivative(q, i, false);
        if !px.is_zero() && !ql.is_zero() {
            out = &out - &px.wedge(&ql);
        }
    }
    out
}

/// Schouten-Nijenhuis bracket of a `p`-vector and a `q`-vector, a
/// `(p+q-1)`-vector.
///
/// Sign convention: `[P, Q] = (-1)^{p-1} {P, Q}` where `{,}` is the odd
/// Poisson bracket. With it `[P, Q] = (-1)^{pq} [Q, P]`, the bracket reduces
/// to the Lie bracket on vector fields, `[X, f] = [f, X] = X(f)`, and the
/// contravariant differential satisfies
/// `s[P, Q] = -[sP, Q] - (-1)^p [P, sQ]`.
pub fn schouten(p: &KVector, q: &KVector) -> KVector {
    let b = odd_bracket(p, q);
    if p.grade() % 2 == 0 {
        -b
    } else {
        b
    }
}
