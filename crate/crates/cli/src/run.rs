//! Command dispatch and report assembly.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use algebroid_core::algebroid::{check_algebroid_axioms, AxiomReport, CotangentAlgebroid, TangentAlgebroid};
use algebroid_core::calculus::{de_rham, differential, lie_bracket, lie_derivative, schouten};
use algebroid_core::cohomology::{compute_cohomology, theorem_check, Complex, TruncationSpec, DEFAULT_MAX_BASIS};
use algebroid_core::courant::{
    check_courant_axioms, check_dirac, courant_bracket, dorfman_bracket, orthogonal_complement, DiracStructure,
    GeneralizedSection,
};
use algebroid_core::random::DEFAULT_SEED;
use algebroid_core::sigma::sigma;
use algebroid_core::symplectic::{
    check_weak_symplectic, oneform_bracket, poisson_bracket, ConstantSymplectic, TwoForm, WeakSymplecticVerdict,
};
use algebroid_core::{Error as CoreError, KForm, KVector, Poly};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::model::{parse_grade_range, parse_index_set, Model, Value};
use crate::syntax::{parse, parse_expr, BindingKind, DslError, DEFAULT_SYMPLECTIC};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "algebroid", version, about = "Exact checks and cohomology for symplectic and algebroid models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Model document.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized trials.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; falls back to ALGEBROID_THREADS.
    #[arg(long, env = "ALGEBROID_THREADS")]
    pub threads: Option<usize>,
    /// Include wall-clock timing (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Truncation {
    /// Coordinates, as `a..b` or `i,j,k`; defaults to all declared ones.
    #[arg(long)]
    pub support: Option<String>,
    /// Coefficient degree bound.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Grade range `a..b`.
    #[arg(long, default_value = "0..2")]
    pub grades: String,
    /// Largest basis a single matrix may have.
    #[arg(long, default_value_t = DEFAULT_MAX_BASIS)]
    pub max_basis: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgebroidKind {
    Tangent,
    Cotangent,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComplexKind {
    Lp,
    CeTangent,
    CeCotangent,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BracketKind {
    /// Chosen from the operand types.
    Auto,
    Lie,
    Schouten,
    Poisson,
    Oneform,
    Dorfman,
    Courant,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lie algebroid axioms on declared sections.
    CheckAxioms {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        algebroid: AlgebroidKind,
        /// Comma separated expressions; defaults to every declared vector (tangent) or 1-form (cotangent).
        #[arg(long)]
        sections: Option<String>,
        /// Comma separated expressions; defaults to every declared function.
        #[arg(long)]
        functions: Option<String>,
        #[arg(long)]
        symplectic: Option<String>,
    },
    /// Courant algebroid axioms of the generalized tangent bundle.
    CheckCourant {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sections: Option<String>,
        #[arg(long)]
        functions: Option<String>,
    },
    /// Dirac structure checks for the graph of a 2-form.
    CheckDirac {
        #[command(flatten)]
        common: Common,
        /// A declared symplectic name or a 2-form expression.
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        support: Option<String>,
        #[arg(long, default_value_t = 4)]
        trials: usize,
    },
    /// Closedness and injectivity of a 2-form.
    CheckWeakSymplectic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        support: Option<String>,
    },
    /// Bracket of two expressions.
    Bracket {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, value_enum, default_value_t = BracketKind::Auto)]
        kind: BracketKind,
        #[arg(long)]
        symplectic: Option<String>,
    },
    /// Exterior derivative.
    D {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
    },
    /// Lie derivative of a form along a vector field.
    Lie {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        field: String,
        #[arg(long)]
        target: String,
    },
    /// Contravariant differential of a multivector field.
    Sigma {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        #[arg(long)]
        symplectic: Option<String>,
    },
    /// Truncated cohomology dimensions.
    Cohomology {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        truncation: Truncation,
        #[arg(long, value_enum, default_value_t = ComplexKind::Lp)]
        complex: ComplexKind,
        #[arg(long)]
        symplectic: Option<String>,
    },
    /// Cotangent algebroid differential against the contravariant one.
    TheoremCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        truncation: Truncation,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        symplectic: Option<String>,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::CheckAxioms { common, .. }
            | Command::CheckCourant { common, .. }
            | Command::CheckDirac { common, .. }
            | Command::CheckWeakSymplectic { common, .. }
            | Command::Bracket { common, .. }
            | Command::D { common, .. }
            | Command::Lie { common, .. }
            | Command::Sigma { common, .. }
            | Command::Cohomology { common, .. }
            | Command::TheoremCheck { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckAxioms { .. } => "check-axioms",
            Command::CheckCourant { .. } => "check-courant",
            Command::CheckDirac { .. } => "check-dirac",
            Command::CheckWeakSymplectic { .. } => "check-weak-symplectic",
            Command::Bracket { .. } => "bracket",
            Command::D { .. } => "d",
            Command::Lie { .. } => "lie",
            Command::Sigma { .. } => "sigma",
            Command::Cohomology { .. } => "cohomology",
            Command::TheoremCheck { .. } => "theorem-check",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Computed,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub input_digest: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub verdict: Verdict,
    pub result: Json,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
    #[serde(skip)]
    pub text: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Fail => 1,
            _ => 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = format!("{}: {}\n", self.command, verdict_word(self.verdict));
                for line in &self.text {
                    s.push_str("  ");
                    s.push_str(line);
                    s.push('\n');
                }
                if let Some(t) = self.timing_ms {
                    s.push_str(&format!("  time: {t} ms\n"));
                }
                s
            }
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Computed => "ok",
    }
}

/// Failures that stop a command before a report exists.
#[derive(Debug)]
pub enum Failure {
    /// Malformed input or arguments: exit code 2.
    Usage(String),
    /// The requested mathematics is undefined on the input: exit code 1.
    Math(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Math(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Math(m) => m,
        }
    }
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotInvertible { .. } => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Everything a command computes, before the common envelope is added.
struct Body {
    verdict: Verdict,
    trials: Option<usize>,
    result: Json,
    text: Vec<String>,
}

/// Runs a parsed command line; the input file is read here.
pub fn run(command: &Command) -> Outcome<Report> {
    let common = command.common();
    let bytes = std::fs::read(&common.input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", common.input.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Usage("input is not UTF-8".into()))?;
    run_on_source(command, &text)
}

/// Runs a command against document source text.
pub fn run_on_source(command: &Command, text: &str) -> Outcome<Report> {
    let common = command.common();
    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    let model = Model::build(&parse(text)?)?;
    let start = Instant::now();
    let body = dispatch(command, &model)?;
    Ok(Report {
        schema: SCHEMA,
        command: command.name().to_string(),
        input_digest: digest,
        seed: common.seed,
        trials: body.trials,
        verdict: body.verdict,
        result: body.result,
        timing_ms: common.timing.then(|| start.elapsed().as_millis()),
        text: body.text,
    })
}

fn to_json<T: Serialize>(t: &T) -> Json {
    serde_json::to_value(t).expect("serializable")
}

fn eval_arg(model: &Model, src: &str) -> Outcome<Value> {
    let e = parse_expr(src).map_err(|e| Failure::Usage(format!("in `{src}`: {}", e.message)))?;
    model.eval(&e).map_err(|e| Failure::Usage(format!("in `{src}`: {}", e.message)))
}

fn split_list(s: &str) -> Vec<String> {
    // commas inside parentheses or brackets belong to the expression
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn symplectic<'a>(model: &'a Model, name: Option<&str>) -> Outcome<(&'a str, &'a ConstantSymplectic)> {
    let name = match name {
        Some(n) => n,
        None if model.symplectic.len() == 1 => model.symplectic.keys().next().expect("one").as_str(),
        None if model.symplectic.contains_key(DEFAULT_SYMPLECTIC) => DEFAULT_SYMPLECTIC,
        None if model.symplectic.is_empty() => {
            return Err(Failure::Usage("the document declares no symplectic form".into()))
        }
        None => return Err(Failure::Usage("several symplectic forms declared; pick one with --symplectic".into())),
    };
    model
        .symplectic
        .get_key_value(name)
        .map(|(k, v)| (k.as_str(), v))
        .ok_or_else(|| Failure::Usage(format!("`{name}` is not a declared symplectic form")))
}

fn support(model: &Model, arg: Option<&str>) -> Outcome<Vec<u32>> {
    let s = match arg {
        Some(s) => parse_index_set(s).map_err(Failure::Usage)?,
        None => model.vars.iter().copied().collect(),
    };
    if let Some(i) = s.iter().find(|i| !model.vars.contains(i)) {
        return Err(Failure::Usage(format!("support index {i} is not a declared coordinate")));
    }
    Ok(s)
}

fn truncation(model: &Model, t: &Truncation) -> Outcome<TruncationSpec> {
    let support = support(model, t.support.as_deref())?;
    let (lo, hi) = parse_grade_range(&t.grades).map_err(Failure::Usage)?;
    Ok(TruncationSpec::new(support, t.degree, lo..=hi).with_max_basis(t.max_basis))
}

fn functions(model: &Model, arg: Option<&str>) -> Outcome<Vec<Poly>> {
    let srcs = match arg {
        Some(s) => split_list(s),
        None => model.names_of(BindingKind::Fn),
    };
    srcs.iter()
        .map(|s| match eval_arg(model, s)? {
            Value::Scalar(p) => Ok(p),
            v => Err(Failure::Usage(format!("`{s}` is {}, expected a function", v.describe()))),
        })
        .collect()
}

fn axiom_text(r: &AxiomReport) -> Vec<String> {
    let mut out = Vec::new();
    for c in &r.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        out.push(format!("{:<20} {status} ({} instances)", c.axiom, c.instances));
        if let Some(w) = &c.witness {
            out.push(format!("  witness: {w}"));
        }
    }
    out
}

fn pass_fail(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn computed(result: Json, text: Vec<String>) -> Body {
    Body {
        verdict: Verdict::Computed,
        trials: None,
        result,
        text,
    }
}

fn dispatch(command: &Command, model: &Model) -> Outcome<Body> {
    match command {
        Command::CheckAxioms {
            algebroid,
            sections,
            functions: fns,
            symplectic: sname,
            ..
        } => {
            let fns = functions(model, fns.as_deref())?;
            let report = match algebroid {
                AlgebroidKind::Tangent => {
                    let srcs = sections.as_deref().map(split_list).unwrap_or_else(|| model.names_of(BindingKind::Vector));
                    let secs = srcs
                        .iter()
                        .map(|s| match eval_arg(model, s)? {
                            Value::Vector(v) if v.grade() == 1 => Ok(v),
                            v => Err(Failure::Usage(format!("`{s}` is {}, expected a vector field", v.describe()))),
                        })
                        .collect::<Outcome<Vec<KVector>>>()?;
                    check_algebroid_axioms(&TangentAlgebroid, &secs, &fns)?
                }
                AlgebroidKind::Cotangent => {
                    let (_, w) = symplectic(model, sname.as_deref())?;
                    let srcs = match sections {
                        Some(s) => split_list(s),
                        None => model
                            .names_of(BindingKind::Form)
                            .into_iter()
                            .filter(|n| matches!(&model.bindings[n].value, Value::Form(f) if f.grade() == 1))
                            .collect(),
                    };
                    let secs = srcs
                        .iter()
                        .map(|s| match eval_arg(model, s)? {
                            Value::Form(f) if f.grade() == 1 => Ok(f),
                            v => Err(Failure::Usage(format!("`{s}` is {}, expected a 1-form", v.describe()))),
                        })
                        .collect::<Outcome<Vec<KForm>>>()?;
                    check_algebroid_axioms(&CotangentAlgebroid::new(w.clone()), &secs, &fns)?
                }
            };
            Ok(Body {
                verdict: pass_fail(report.passed()),
                trials: None,
                text: axiom_text(&report),
                result: to_json(&report),
            })
        }
        Command::CheckCourant { sections, functions: fns, .. } => {
            let fns = functions(model, fns.as_deref())?;
            let srcs = sections.as_deref().map(split_list).unwrap_or_else(|| model.names_of(BindingKind::Section));
            let secs = srcs
                .iter()
                .map(|s| match eval_arg(model, s)? {
                    Value::Pair(p) => Ok(p),
                    Value::Vector(v) if v.grade() == 1 => Ok(GeneralizedSection::from_vector(v)?),
                    Value::Form(f) if f.grade() == 1 => Ok(GeneralizedSection::from_form(f)?),
                    v => Err(Failure::Usage(format!("`{s}` is {}, expected a section", v.describe()))),
                })
                .collect::<Outcome<Vec<_>>>()?;
            let report = check_courant_axioms(&secs, &fns)?;
            Ok(Body {
                verdict: pass_fail(report.passed()),
                trials: None,
                text: axiom_text(&report),
                result: to_json(&report),
            })
        }
        Command::CheckDirac { common, target, support: sup, trials } => {
            let support = support(model, sup.as_deref())?;
            let (label, structure) = dirac_structure(model, target.as_deref(), &support)?;
            let fiber = orthogonal_complement(&structure)?;
            let report = check_dirac(&structure, *trials, common.seed)?;
            let ok = report.passed && fiber.lagrangian;
            let mut text = vec![
                format!("graph of {label} over support {:?}", structure.support),
                format!(
                    "fiber dim {}: dim D = {}, dim D-perp = {}, isotropic = {}, D = D-perp: {}",
                    fiber.fiber_dim, fiber.dim, fiber.dim_perp, fiber.isotropic, fiber.lagrangian
                ),
            ];
            for c in [&report.isotropy, &report.involutivity] {
                let status = if c.passed { "pass" } else { "FAIL" };
                text.push(format!("{:<20} {status} ({} instances)", c.axiom, c.instances));
                if let Some(w) = &c.witness {
                    text.push(format!("  witness: {w}"));
                }
            }
            text.extend(axiom_text(&report.algebroid));
            Ok(Body {
                verdict: pass_fail(ok),
                trials: Some(report.trials),
                result: json!({ "structure": label, "fiber": to_json(&fiber), "checks": to_json(&report) }),
                text,
            })
        }
        Command::CheckWeakSymplectic { target, support: sup, .. } => {
            let support: BTreeSet<u32> = support(model, sup.as_deref())?.into_iter().collect();
            let (label, report) = match target.as_deref().map(|t| (t, model.symplectic.get(t))) {
                Some((t, Some(w))) => (t.to_string(), check_weak_symplectic(TwoForm::Constant(w), &support)?),
                Some((t, None)) => {
                    let form = match eval_arg(model, t)? {
                        Value::Form(f) => f,
                        v => return Err(Failure::Usage(format!("`{t}` is {}, expected a 2-form", v.describe()))),
                    };
                    (t.to_string(), check_weak_symplectic(TwoForm::Form(&form), &support)?)
                }
                None => {
                    let (name, w) = symplectic(model, None)?;
                    (name.to_string(), check_weak_symplectic(TwoForm::Constant(w), &support)?)
                }
            };
            let verdict = report.verdict();
            let verdict_name = match verdict {
                WeakSymplecticVerdict::Pass => "weakly-symplectic",
                WeakSymplecticVerdict::NotClosed => "not-closed",
                WeakSymplecticVerdict::NotInjective => "not-injective",
            };
            let caveats: Vec<String> = report.caveats.iter().map(|p| p.to_string()).collect();
            let result = json!({
                "target": label,
                "support": report.support,
                "closed": report.closed,
                "closedness_witness": report.closedness_witness.as_ref().map(|f| f.to_string()),
                "rank": report.rank,
                "injective": report.injective,
                "kernel_witness": report.kernel_witness.as_ref().map(|v| v.to_string()),
                "caveats": caveats,
                "classification": verdict_name,
            });
            let mut text = vec![
                format!("{label} on support {:?}: {verdict_name}", report.support),
                format!("closed: {}, generic rank {} of {}", report.closed, report.rank, report.support.len()),
            ];
            if let Some(w) = &report.closedness_witness {
                text.push(format!("d{label} = {w}"));
            }
            if let Some(k) = &report.kernel_witness {
                text.push(format!("kernel witness: {k}"));
            }
            if !caveats.is_empty() {
                text.push(format!("rank may drop where one of these vanishes: {}", caveats.join("; ")));
            }
            Ok(Body {
                verdict: pass_fail(verdict == WeakSymplecticVerdict::Pass),
                trials: None,
                result,
                text,
            })
        }
        Command::Bracket { left, right, kind, symplectic: sname, .. } => {
            let (l, r) = (eval_arg(model, left)?, eval_arg(model, right)?);
            let (kind, value) = bracket(model, *kind, &l, &r, sname.as_deref())?;
            let text = vec![format!("[{left}, {right}] ({kind}) = {value}")];
            Ok(computed(json!({ "kind": kind, "left": l.to_string(), "right": r.to_string(), "value": value.to_string() }), text))
        }
        Command::D { target, .. } => {
            let value = match eval_arg(model, target)? {
                Value::Scalar(p) => differential(&p),
                Value::Form(f) => de_rham(&f),
                v => return Err(Failure::Usage(format!("`{target}` is {}, expected a form", v.describe()))),
            };
            let text = vec![format!("d({target}) = {value}")];
            Ok(computed(json!({ "target": target, "value": value.to_string() }), text))
        }
        Command::Lie { field, target, .. } => {
            let x = match eval_arg(model, field)? {
                Value::Vector(v) if v.grade() == 1 => v,
                v => return Err(Failure::Usage(format!("`{field}` is {}, expected a vector field", v.describe()))),
            };
            let w = eval_arg(model, target)?
                .as_form()
                .ok_or_else(|| Failure::Usage(format!("`{target}` is not a form")))?;
            let value = lie_derivative(&x, &w)?;
            let text = vec![format!("L_({field}) {target} = {value}")];
            Ok(computed(json!({ "field": field, "target": target, "value": value.to_string() }), text))
        }
        Command::Sigma { target, symplectic: sname, .. } => {
            let (name, w) = symplectic(model, sname.as_deref())?;
            let x = eval_arg(model, target)?
                .as_vector()
                .ok_or_else(|| Failure::Usage(format!("`{target}` is not a multivector field")))?;
            let value = sigma(w, &x)?;
            let text = vec![format!("sigma_{name}({target}) = {value}")];
            Ok(computed(json!({ "symplectic": name, "target": target, "value": value.to_string() }), text))
        }
        Command::Cohomology { truncation: t, complex, symplectic: sname, .. } => {
            let spec = truncation(model, t)?;
            let complex = match complex {
                ComplexKind::CeTangent => Complex::CeTangent,
                ComplexKind::Lp => Complex::Lp(symplectic(model, sname.as_deref())?.1.clone()),
                ComplexKind::CeCotangent => Complex::CeCotangent(symplectic(model, sname.as_deref())?.1.clone()),
            };
            let report = compute_cohomology(&complex, &spec)?;
            let mut text = vec![format!(
                "{} complex, support {:?}, degree <= {} (coboundaries from degree <= {})",
                report.complex,
                spec.support,
                spec.degree,
                spec.degree + 1
            )];
            text.push(format!("{:>5} {:>8} {:>9} {:>12} {:>4}", "grade", "basis", "cocycles", "coboundaries", "H"));
            for g in &report.grades {
                text.push(format!(
                    "{:>5} {:>8} {:>9} {:>12} {:>4}",
                    g.grade, g.basis_size, g.dim_cocycles, g.dim_coboundaries, g.dim_quotient
                ));
            }
            Ok(computed(to_json(&report), text))
        }
        Command::TheoremCheck { common, truncation: t, trials, symplectic: sname } => {
            let spec = truncation(model, t)?;
            let (name, w) = symplectic(model, sname.as_deref())?;
            let report = theorem_check(w, *trials, &spec, common.seed)?;
            let agreements: usize = report.per_grade.iter().map(|g| g.agreements).sum();
            let mut text = vec![format!("{name}: {agreements}/{trials} exact agreements")];
            for g in &report.per_grade {
                text.push(format!("grade {}: {}/{}", g.grade, g.agreements, g.trials));
            }
            if let Some(w) = &report.witness {
                text.push(format!("witness: {w}"));
            }
            text.push(format!(
                "cohomology tables LP {:?} vs CE-cotangent {:?}: {}",
                report.lp.dims(),
                report.ce_cotangent.dims(),
                if report.tables_identical { "identical" } else { "DIFFERENT" }
            ));
            Ok(Body {
                verdict: pass_fail(report.passed),
                trials: Some(*trials),
                result: to_json(&report),
                text,
            })
        }
    }
}

fn dirac_structure(model: &Model, target: Option<&str>, support: &[u32]) -> Outcome<(String, DiracStructure)> {
    if let Some(t) = target {
        if let Some(w) = model.symplectic.get(t) {
            return Ok((t.to_string(), DiracStructure::graph_of_symplectic(w.clone(), support.iter().copied())));
        }
        return match eval_arg(model, t)? {
            Value::Form(f) if f.grade() == 2 => Ok((t.to_string(), DiracStructure::graph_of_form(f, support.iter().copied())?)),
            v => Err(Failure::Usage(format!("`{t}` is {}, expected a 2-form", v.describe()))),
        };
    }
    let (name, w) = symplectic(model, None)?;
    Ok((name.to_string(), DiracStructure::graph_of_symplectic(w.clone(), support.iter().copied())))
}

fn bracket(model: &Model, kind: BracketKind, l: &Value, r: &Value, sname: Option<&str>) -> Outcome<(&'static str, Value)> {
    let kind = match (kind, l, r) {
        (BracketKind::Auto, Value::Scalar(_), Value::Scalar(_)) => BracketKind::Poisson,
        (BracketKind::Auto, Value::Vector(a), Value::Vector(b)) if a.grade() == 1 && b.grade() == 1 => BracketKind::Lie,
        (BracketKind::Auto, Value::Vector(_) | Value::Scalar(_), Value::Vector(_) | Value::Scalar(_)) => BracketKind::Schouten,
        (BracketKind::Auto, Value::Form(_), Value::Form(_)) => BracketKind::Oneform,
        (BracketKind::Auto, Value::Pair(_), Value::Pair(_)) => BracketKind::Courant,
        (BracketKind::Auto, _, _) => {
            return Err(Failure::Usage(format!("no bracket between {} and {}", l.describe(), r.describe())))
        }
        (k, _, _) => k,
    };
    let pair = |v: &Value| -> Outcome<GeneralizedSection> {
        match v {
            Value::Pair(p) => Ok(p.clone()),
            Value::Vector(x) if x.grade() == 1 => Ok(GeneralizedSection::from_vector(x.clone())?),
            Value::Form(f) if f.grade() == 1 => Ok(GeneralizedSection::from_form(f.clone())?),
            v => Err(Failure::Usage(format!("{} is not a section", v.describe()))),
        }
    };
    let mismatch = |what: &str| Failure::Usage(format!("{what} bracket needs other operands, found {} and {}", l.describe(), r.describe()));
    Ok(match kind {
        BracketKind::Lie => match (l, r) {
            (Value::Vector(a), Value::Vector(b)) => ("lie", Value::Vector(lie_bracket(a, b)?)),
            _ => return Err(mismatch("the Lie")),
        },
        BracketKind::Schouten => match (l.as_vector(), r.as_vector()) {
            (Some(a), Some(b)) => ("schouten", Value::Vector(schouten(&a, &b))),
            _ => return Err(mismatch("the Schouten")),
        },
        BracketKind::Poisson => match (l, r) {
            (Value::Scalar(f), Value::Scalar(g)) => {
                let (_, w) = symplectic(model, sname)?;
                ("poisson", Value::Scalar(poisson_bracket(w, f, g)?))
            }
            _ => return Err(mismatch("the Poisson")),
        },
        BracketKind::Oneform => match (l, r) {
            (Value::Form(a), Value::Form(b)) => {
                let (_, w) = symplectic(model, sname)?;
                ("oneform", Value::Form(oneform_bracket(w, a, b)?))
            }
            _ => return Err(mismatch("the 1-form")),
        },
        BracketKind::Dorfman => ("dorfman", Value::Pair(dorfman_bracket(&pair(l)?, &pair(r)?)?)),
        BracketKind::Courant => ("courant", Value::Pair(courant_bracket(&pair(l)?, &pair(r)?)?)),
        BracketKind::Auto => unreachable!("resolved above"),
    })
}

/// Applies `--threads` to the global worker pool. Outputs do not depend on it.
pub fn configure_threads(threads: Option<usize>) -> Outcome<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        // a second configuration in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses arguments, runs, and returns `(stdout, stderr, exit code)`.
pub fn execute<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 { (rendered, String::new(), 0) } else { (String::new(), rendered, 2) };
        }
    };
    let common = cli.command.common();
    if let Err(f) = configure_threads(common.threads) {
        return (String::new(), format!("error: {}\n", f.message()), f.exit_code());
    }
    match run(&cli.command) {
        Ok(report) => (report.render(common.format), String::new(), report.exit_code()),
        Err(f) => (String::new(), format!("error: {}\n", f.message()), f.exit_code()),
    }
}
