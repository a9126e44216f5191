//! The contravariant exterior differential of a constant symplectic form on
//! multivector fields.

use std::collections::BTreeSet;

use crate::blade::Blade;
use crate::calculus::{add_signed, omit};
use crate::error::{Error, Result};
use crate::graded::{KForm, KVector};
use crate::poly::{Poly, VarIndex};
use crate::symplectic::{oneform_bracket, poisson_sharp, ConstantSymplectic};

/// `(sX)(a_0..a_k) = sum_i (-1)^i sharp(a_i)(X(..^i..))
///  + sum_{i<j} (-1)^{i+j} X({a_i, a_j}, ..^i..^j..)`.
pub fn sigma_eval(w: &ConstantSymplectic, x: &KVector, args: &[KForm]) -> Result<Poly> {
    let k = x.grade();
    if args.len() != k + 1 {
        return Err(Error::Arity {
            expected: k + 1,
            found: args.len(),
        });
    }
    for a in args {
        if a.grade() != 1 {
            return Err(Error::grade("sigma", "1", a.grade()));
        }
    }
    let mut acc = Poly::zero();
    for (i, a) in args.iter().enumerate() {
        let value = x.evaluate(&omit(args, &[i]))?;
        if value.is_zero() {
            continue;
        }
        add_signed(&mut acc, i, &poisson_sharp(w, a)?.apply(&value));
    }
    for i in 0..=k {
        for j in i + 1..=k {
            let br = oneform_bracket(w, &args[i], &args[j])?;
            if br.is_zero() {
                continue;
            }
            let mut rest = vec![br];
            rest.extend(omit(args, &[i, j]));
            add_signed(&mut acc, i + j, &x.evaluate(&rest)?);
        }
    }
    Ok(acc)
}

/// `sX` as a `(k+1)`-vector field, with coefficients read off by evaluating on
/// the coordinate coframe.
pub fn sigma(w: &ConstantSymplectic, x: &KVector) -> Result<KVector> {
    let k = x.grade();
    let mut indices: BTreeSet<VarIndex> = x.blade_indices();
    indices.extend(w.reach(&x.coefficient_vars()));
    let indices: Vec<VarIndex> = indices.into_iter().collect();
    let mut out = KVector::zero(k + 1);
    for blade in Blade::subsets(&indices, k + 1) {
        let coframe: Vec<KForm> = blade.indices().iter().map(|&i| KForm::unit(i)).collect();
        let v = sigma_eval(w, x, &coframe)?;
        out.add_term(blade, v);
    }
    Ok(out)
}
