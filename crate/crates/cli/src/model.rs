//! Resolution and evaluation of a parsed document into exact values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use algebroid_core::calculus::{de_rham, differential};
use algebroid_core::courant::GeneralizedSection;
use algebroid_core::symplectic::ConstantSymplectic;
use algebroid_core::{KForm, KVector, Poly, Scalar};
use num_traits::{ToPrimitive, Zero};

use crate::syntax::{BindingKind, Decl, Document, DslError, ErrorKind, Expr, ExprKind, Pos, SymplecticExpr};

/// The value of an expression. Scalars are polynomials and act as 0-forms and
/// 0-vectors alike.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(Poly),
    Form(KForm),
    Vector(KVector),
    Pair(GeneralizedSection),
}

impl Value {
    pub fn describe(&self) -> String {
        match self {
            Value::Scalar(_) => "a function".into(),
            Value::Form(f) => format!("a {}-form", f.grade()),
            Value::Vector(v) => format!("a {}-vector", v.grade()),
            Value::Pair(_) => "a section pair".into(),
        }
    }

    pub fn as_form(&self) -> Option<KForm> {
        match self {
            Value::Scalar(p) => Some(KForm::scalar(p.clone())),
            Value::Form(f) => Some(f.clone()),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<KVector> {
        match self {
            Value::Scalar(p) => Some(KVector::scalar(p.clone())),
            Value::Vector(v) => Some(v.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(p) => write!(f, "{p}"),
            Value::Form(w) => write!(f, "{w}"),
            Value::Vector(v) => write!(f, "{v}"),
            Value::Pair(s) => write!(f, "{s}"),
        }
    }
}

/// A named value together with the keyword it was declared with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub kind: BindingKind,
    pub value: Value,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default)]
pub struct Model {
    pub vars: BTreeSet<u32>,
    pub symplectic: BTreeMap<String, ConstantSymplectic>,
    pub bindings: BTreeMap<String, Binding>,
    /// Names in declaration order.
    pub order: Vec<String>,
}

fn grade_error(pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::new(ErrorKind::Grade, pos, msg)
}

impl Model {
    pub fn build(doc: &Document) -> Result<Model, DslError> {
        let mut m = Model::default();
        for located in &doc.decls {
            let pos = located.pos;
            match &located.decl {
                Decl::Var(v) => m.vars.extend(v.iter().copied()),
                Decl::Symplectic { name, value } => {
                    m.claim(name, pos)?;
                    let w = match value {
                        SymplecticExpr::Standard => ConstantSymplectic::standard(),
                        SymplecticExpr::Explicit(indices, rows) => {
                            for &i in indices {
                                m.check_var(i, pos)?;
                            }
                            let mut matrix = Vec::new();
                            for row in rows {
                                let mut r = Vec::new();
                                for e in row {
                                    r.push(m.constant(e)?);
                                }
                                matrix.push(r);
                            }
                            ConstantSymplectic::explicit(indices.clone(), matrix)
                                .map_err(|e| grade_error(pos, e.to_string()))?
                        }
                    };
                    m.symplectic.insert(name.clone(), w);
                }
                Decl::Binding { kind, name, value } => {
                    m.claim(name, pos)?;
                    let v = m.eval(value)?;
                    let v = conform(*kind, v, value.pos)?;
                    m.bindings.insert(name.clone(), Binding { kind: *kind, value: v, pos });
                }
            }
        }
        Ok(m)
    }

    fn claim(&mut self, name: &str, pos: Pos) -> Result<(), DslError> {
        if self.bindings.contains_key(name) || self.symplectic.contains_key(name) {
            return Err(DslError::new(ErrorKind::Duplicate, pos, format!("`{name}` is already declared")));
        }
        self.order.push(name.to_string());
        Ok(())
    }

    fn check_var(&self, i: u32, pos: Pos) -> Result<(), DslError> {
        if self.vars.contains(&i) {
            Ok(())
        } else {
            Err(DslError::new(ErrorKind::Unbound, pos, format!("coordinate x{i} is not declared")))
        }
    }

    fn constant(&self, e: &Expr) -> Result<Scalar, DslError> {
        match self.eval(e)? {
            Value::Scalar(p) if p.is_constant() => Ok(p.constant_term()),
            other => Err(grade_error(e.pos, format!("expected a constant, found {}", other.describe()))),
        }
    }

    /// Evaluates an expression against the bindings declared so far.
    pub fn eval(&self, e: &Expr) -> Result<Value, DslError> {
        let pos = e.pos;
        Ok(match &e.kind {
            ExprKind::Int(n) => Value::Scalar(Poly::constant(Scalar::from_integer(n.clone()))),
            ExprKind::Coord(i) => {
                self.check_var(*i, pos)?;
                Value::Scalar(Poly::var(*i))
            }
            ExprKind::Dx(i) => {
                self.check_var(*i, pos)?;
                Value::Form(KForm::unit(*i))
            }
            ExprKind::E(i) => {
                self.check_var(*i, pos)?;
                Value::Vector(KVector::unit(*i))
            }
            ExprKind::Name(s) => match self.bindings.get(s) {
                Some(b) => b.value.clone(),
                None if self.symplectic.contains_key(s) => {
                    return Err(grade_error(pos, format!("`{s}` is symplectic data, not an expression")))
                }
                None => return Err(DslError::new(ErrorKind::Unbound, pos, format!("`{s}` is not declared"))),
            },
            ExprKind::D(inner) => match self.eval(inner)? {
                Value::Scalar(p) => Value::Form(differential(&p)),
                Value::Form(f) => Value::Form(de_rham(&f)),
                other => return Err(grade_error(pos, format!("d applies to forms, found {}", other.describe()))),
            },
            ExprKind::Neg(inner) => negate(self.eval(inner)?),
            ExprKind::Add(a, b) => add(self.eval(a)?, self.eval(b)?, false, pos)?,
            ExprKind::Sub(a, b) => add(self.eval(a)?, self.eval(b)?, true, pos)?,
            ExprKind::Mul(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                match (&l, &r) {
                    (Value::Scalar(p), _) => scale(r, p),
                    (_, Value::Scalar(p)) => scale(l, p),
                    _ => {
                        return Err(grade_error(
                            pos,
                            format!("cannot multiply {} by {}; use ^^ for the wedge product", l.describe(), r.describe()),
                        ))
                    }
                }
            }
            ExprKind::Div(a, b) => {
                let l = self.eval(a)?;
                let c = self.constant(b)?;
                if c.is_zero() {
                    return Err(grade_error(b.pos, "division by zero"));
                }
                scale(l, &Poly::constant(c.recip()))
            }
            ExprKind::Wedge(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                match (l, r) {
                    (Value::Scalar(p), other) | (other, Value::Scalar(p)) => scale(other, &p),
                    (Value::Form(x), Value::Form(y)) => Value::Form(x.wedge(&y)),
                    (Value::Vector(x), Value::Vector(y)) => Value::Vector(x.wedge(&y)),
                    (l, r) => {
                        return Err(grade_error(pos, format!("cannot wedge {} with {}", l.describe(), r.describe())))
                    }
                }
            }
            ExprKind::Pow(base, n) => match self.eval(base)? {
                Value::Scalar(p) => Value::Scalar(p.pow(*n)),
                other => return Err(grade_error(pos, format!("powers apply to functions, found {}", other.describe()))),
            },
            ExprKind::Pair(a, b) => {
                let v = match self.eval(a)? {
                    Value::Vector(v) if v.grade() == 1 => v,
                    Value::Scalar(p) if p.is_zero() => KVector::zero(1),
                    other => {
                        return Err(grade_error(a.pos, format!("a pair needs a vector field first, found {}", other.describe())))
                    }
                };
                let f = match self.eval(b)? {
                    Value::Form(f) if f.grade() == 1 => f,
                    Value::Scalar(p) if p.is_zero() => KForm::zero(1),
                    other => {
                        return Err(grade_error(b.pos, format!("a pair needs a 1-form second, found {}", other.describe())))
                    }
                };
                Value::Pair(GeneralizedSection { vector: v, form: f })
            }
        })
    }

    pub fn binding(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }

    /// Names bound with the given keyword, in declaration order.
    pub fn names_of(&self, kind: BindingKind) -> Vec<String> {
        self.order
            .iter()
            .filter(|n| self.bindings.get(*n).map(|b| b.kind) == Some(kind))
            .cloned()
            .collect()
    }
}

fn negate(v: Value) -> Value {
    match v {
        Value::Scalar(p) => Value::Scalar(-p),
        Value::Form(f) => Value::Form(-&f),
        Value::Vector(x) => Value::Vector(-&x),
        Value::Pair(s) => Value::Pair(GeneralizedSection {
            vector: -&s.vector,
            form: -&s.form,
        }),
    }
}

fn scale(v: Value, p: &Poly) -> Value {
    match v {
        Value::Scalar(q) => Value::Scalar(&q * p),
        Value::Form(f) => Value::Form(f.scale(p)),
        Value::Vector(x) => Value::Vector(x.scale(p)),
        Value::Pair(s) => Value::Pair(GeneralizedSection {
            vector: s.vector.scale(p),
            form: s.form.scale(p),
        }),
    }
}

fn add(a: Value, b: Value, subtract: bool, pos: Pos) -> Result<Value, DslError> {
    let b = if subtract { negate(b) } else { b };
    Ok(match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y),
        (Value::Form(x), Value::Form(y)) if x.grade() == y.grade() => Value::Form(&x + &y),
        (Value::Vector(x), Value::Vector(y)) if x.grade() == y.grade() => Value::Vector(&x + &y),
        (Value::Pair(x), Value::Pair(y)) => Value::Pair(GeneralizedSection {
            vector: &x.vector + &y.vector,
            form: &x.form + &y.form,
        }),
        (a, b) => return Err(grade_error(pos, format!("cannot add {} and {}", a.describe(), b.describe()))),
    })
}

/// Checks a value against its declaration keyword.
fn conform(kind: BindingKind, v: Value, pos: Pos) -> Result<Value, DslError> {
    let ok = match (kind, &v) {
        (BindingKind::Fn, Value::Scalar(_)) => true,
        (BindingKind::Form, Value::Scalar(_) | Value::Form(_)) => true,
        (BindingKind::Vector, Value::Vector(x)) => x.grade() == 1,
        (BindingKind::Vector, Value::Scalar(p)) => p.is_zero(),
        (BindingKind::Multivector, Value::Scalar(_) | Value::Vector(_)) => true,
        (BindingKind::Section, Value::Pair(_)) => true,
        _ => false,
    };
    if !ok {
        return Err(grade_error(pos, format!("a `{}` cannot hold {}", kind.keyword(), v.describe())));
    }
    Ok(match (kind, v) {
        (BindingKind::Form, Value::Scalar(p)) if !p.is_zero() => Value::Scalar(p),
        (BindingKind::Vector, Value::Scalar(_)) => Value::Vector(KVector::zero(1)),
        (_, v) => v,
    })
}

/// Parses `a..b` (inclusive) or a comma separated list of indices.
pub fn parse_index_set(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| format!("bad range start in `{s}`"))?;
        let b: u32 = b.trim().parse().map_err(|_| format!("bad range end in `{s}`"))?;
        if b < a {
            return Err(format!("empty range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    let mut out: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad index `{t}`")))
        .collect::<Result<_, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parses an inclusive grade range `a..b` or a single grade.
pub fn parse_grade_range(s: &str) -> Result<(usize, usize), String> {
    let v = parse_index_set(s)?;
    match (v.first(), v.last()) {
        (Some(&a), Some(&b)) if v.len() == (b - a + 1) as usize => Ok((a as usize, b as usize)),
        _ => Err(format!("grades must be a contiguous range, found `{s}`")),
    }
}

/// Renders a scalar as `p` or `p/q`.
pub fn rational(s: &Scalar) -> String {
    algebroid_core::scalar::format(s)
}

pub fn small(n: &Scalar) -> Option<i64> {
    if n.is_integer() {
        n.to_integer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn model(src: &str) -> Result<Model, DslError> {
        Model::build(&parse(src).unwrap())
    }

    #[test]
    fn evaluates_bindings() {
        let m = model("var x0..x2\nfn f = x0*x1 + 1/2*x2^2\nform a = x0 * dx[1] ^^ dx[2]\nform b = dx[0] ^^ x0").unwrap();
        assert_eq!(m.binding("f").unwrap().value.to_string(), "x0*x1 + 1/2*x2^2");
        match &m.binding("a").unwrap().value {
            Value::Form(f) => {
                assert_eq!(f.grade(), 2);
                assert_eq!(f.num_terms(), 1);
            }
            v => panic!("{v:?}"),
        }
        assert_eq!(m.binding("b").unwrap().value.to_string(), "x0*dx[0]");
    }

    #[test]
    fn mixed_variance_is_an_error() {
        let err = model("var x0, x1\nform b = dx[0] ^^ e[1]").unwrap_err();
        assert_eq!(err.kind, ErrorKind::Grade);
        assert_eq!(err.pos, Pos { line: 2, column: 16 });
    }

    #[test]
    fn unbound_and_duplicate() {
        assert_eq!(model("var x0\nfn f = g").unwrap_err().kind, ErrorKind::Unbound);
        assert_eq!(model("var x0\nfn f = x3").unwrap_err().kind, ErrorKind::Unbound);
        assert_eq!(model("var x0\nfn f = 1\nfn f = 2").unwrap_err().kind, ErrorKind::Duplicate);
        assert_eq!(model("var x0\nfn f = dx[0]").unwrap_err().kind, ErrorKind::Grade);
    }

    #[test]
    fn index_sets() {
        assert_eq!(parse_index_set("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_index_set("2,0, 1").unwrap(), vec![0, 1, 2]);
        assert!(parse_index_set("3..1").is_err());
        assert_eq!(parse_grade_range("1").unwrap(), (1, 1));
        assert!(parse_grade_range("0,2").is_err());
    }
}
