use num_traits::{ToPrimitive, Zero};

use crate::exprcore::{parse_expr, Rational, Scope};
use crate::extcalc::{parse_form, DiffForm, VectorField};
use crate::mech::wedge_all;

use super::{CertEntry, InvariantBody, Param, SystemDef, SystemError};

pub const BUILTIN_NAMES: [&str; 5] = ["harmonic", "cubic3", "symplectic", "euler_top", "euler_top_literal"];

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Value(Rational),
    Symbolic,
}

struct Params<'a> {
    given: &'a [(String, ParamValue)],
    allowed: &'a [&'a str],
}

impl<'a> Params<'a> {
    fn new(given: &'a [(String, ParamValue)], allowed: &'a [&'a str]) -> Result<Self, SystemError> {
        if let Some((name, _)) = given.iter().find(|(n, _)| !allowed.contains(&n.as_str())) {
            return Err(SystemError::BadParameter { name: name.clone(), msg: "not a parameter of this system".into() });
        }
        Ok(Params { given, allowed })
    }

    fn get(&self, name: &str, default: i64) -> ParamValue {
        debug_assert!(self.allowed.contains(&name));
        self.given
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| ParamValue::Value(Rational::from_integer(default.into())))
    }
}

/// One of the worked examples, by name.
///
/// `symplectic` takes `n` (half the dimension, default 2). `euler_top` and
/// `euler_top_literal` take `j1, j2, j3` (default 1, 2, 3) and `X1, X2, X3`
/// (default 0); any of them may be [`ParamValue::Symbolic`].
pub fn builtin_system(name: &str, params: &[(String, ParamValue)]) -> Result<SystemDef, SystemError> {
    match name {
        "harmonic" => {
            Params::new(params, &[])?;
            harmonic()
        }
        "cubic3" => {
            Params::new(params, &[])?;
            cubic3()
        }
        "symplectic" => {
            let p = Params::new(params, &["n"])?;
            let n = match p.get("n", 2) {
                ParamValue::Value(v) if v.is_integer() && v >= Rational::from_integer(2.into()) => {
                    v.to_integer().to_usize().filter(|&n| 2 * n <= crate::extcalc::MAX_DIM)
                }
                _ => None,
            }
            .ok_or_else(|| SystemError::BadParameter { name: "n".into(), msg: "expected an integer 2..=16".into() })?;
            symplectic(n)
        }
        "euler_top" | "euler_top_literal" => {
            let keys = ["j1", "j2", "j3", "X1", "X2", "X3"];
            let p = Params::new(params, &keys)?;
            let values: Vec<ParamValue> =
                keys.iter().zip([1, 2, 3, 0, 0, 0]).map(|(k, d)| p.get(k, d)).collect();
            euler_top(&values, name == "euler_top_literal")
        }
        other => Err(SystemError::UnknownSystem(other.to_string())),
    }
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn field(texts: &[String], scope: &Scope) -> Result<VectorField, SystemError> {
    let comps = texts.iter().map(|t| parse_expr(t, scope)).collect::<Result<_, _>>()?;
    Ok(VectorField::new(comps)?)
}

fn harmonic() -> Result<SystemDef, SystemError> {
    let vars = strings(&["x1", "x2"]);
    let sc = Scope::new(&vars);
    let flow = field(&strings(&["x2", "-x1"]), &sc)?;
    let h = parse_expr("1/2*(x1^2 + x2^2)", &sc)?;
    SystemDef::new(
        "harmonic",
        vars,
        vec![],
        flow,
        vec![("H".into(), InvariantBody::Function(h.clone()))],
        Some(vec![CertEntry::Differential("H".into())]),
        Some(DiffForm::function(2, h)),
    )
}

fn cubic3() -> Result<SystemDef, SystemError> {
    let vars = strings(&["x", "y", "z"]);
    let sc = Scope::new(&vars);
    let flow = field(&strings(&["z^2", "x^2", "y^2"]), &sc)?;
    let j1 = parse_form("z^2*dy - x^2*dx", &sc, 3)?;
    let j2 = parse_form("dz - y^2/z^2*dx", &sc, 3)?;
    let h = parse_form("1/4*(x^2*z - y^3)*dx + 1/4*(x*y^2 - z^3)*dy + 1/4*(y*z^2 - x^3)*dz", &sc, 3)?;
    SystemDef::new(
        "cubic3",
        vars,
        vec![],
        flow,
        vec![("J1".into(), InvariantBody::Form(j1)), ("J2".into(), InvariantBody::Form(j2))],
        Some(vec![CertEntry::Form("J1".into()), CertEntry::Form("J2".into())]),
        Some(h),
    )
}

/// Oscillators `x_i' = p_i, p_i' = -x_i` on R^{2n} in the variable order
/// `x1, p1, ..., xn, pn`.
fn symplectic(n: usize) -> Result<SystemDef, SystemError> {
    let dim = 2 * n;
    let vars: Vec<String> = (1..=n).flat_map(|i| [format!("x{i}"), format!("p{i}")]).collect();
    let sc = Scope::new(&vars);
    let flow_text: Vec<String> = (1..=n).flat_map(|i| [format!("p{i}"), format!("-x{i}")]).collect();
    let flow = field(&flow_text, &sc)?;
    let mut invariants = Vec::new();
    let mut cert = Vec::new();
    for i in 1..=n {
        let f = parse_expr(&format!("1/2*(x{i}^2 + p{i}^2)"), &sc)?;
        invariants.push((format!("I{i}"), InvariantBody::Function(f)));
        cert.push(CertEntry::Differential(format!("I{i}")));
    }
    let k: Vec<DiffForm> = (1..=n)
        .map(|i| parse_form(&format!("1/(2*p{i})*dx{i} - 1/(2*x{i})*dp{i}"), &sc, dim))
        .collect::<Result<_, _>>()?;
    // Σ_i (-1)^i K_1 ^ ... ^ [K_i] ^ ... ^ K_n
    let mut j = DiffForm::zero(dim, dim, n - 1);
    for i in 0..n {
        let rest: Vec<DiffForm> = k.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, f)| f.clone()).collect();
        let term = wedge_all(&rest)?;
        j = if i % 2 == 0 { j.try_sub(&term)? } else { j.try_add(&term)? };
    }
    let mut hamiltonian = None;
    if n == 2 {
        invariants.push(("J3".into(), InvariantBody::Form(j)));
        cert.push(CertEntry::Form("J3".into()));
        hamiltonian = Some(parse_form(
            "1/4*(p2^2 + x2^2)*dx1^dp1 + 1/4*(x1^2 + p1^2)*dx2^dp2 - 1/4*(p2*p1 + x1*x2)*dx2^dp1 \
             + 1/4*(x1*p2 - x2*p1)*dp1^dp2 - 1/4*(p2*p1 + x1*x2)*dx1^dp2 + 1/4*(x1*p2 - x2*p1)*dx1^dx2",
            &sc,
            dim,
        )?);
    } else {
        for (i, ki) in k.iter().enumerate() {
            invariants.push((format!("K{}", i + 1), InvariantBody::Form(ki.clone())));
        }
        invariants.push(("J".into(), InvariantBody::Form(j)));
        cert.push(CertEntry::Form("J".into()));
        if n == 3 {
            // the pairwise sum over i > j, as printed for R^6
            let mut pairs = DiffForm::zero(dim, dim, 2);
            for a in 0..n {
                for b in 0..a {
                    pairs = pairs.try_add(&k[a].wedge(&k[b])?)?;
                }
            }
            invariants.push(("Jpairs".into(), InvariantBody::Form(pairs)));
        }
    }
    SystemDef::new("symplectic", vars, vec![], flow, invariants, Some(cert), hamiltonian)
}

/// Cyclic `(i, j, k)` with `ε_ijk = 1`, 1-based.
const CYCLIC: [(usize, usize, usize); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

fn euler_top(values: &[ParamValue], literal: bool) -> Result<SystemDef, SystemError> {
    let names = ["j1", "j2", "j3", "X1", "X2", "X3"];
    let params: Vec<Param> = names
        .iter()
        .zip(values)
        .map(|(n, v)| Param {
            name: n.to_string(),
            value: match v {
                ParamValue::Value(r) => Some(r.clone()),
                ParamValue::Symbolic => None,
            },
        })
        .collect();
    for (i, p) in params.iter().take(3).enumerate() {
        if p.value.as_ref().is_some_and(Zero::is_zero) {
            return Err(SystemError::ZeroInertia(i + 1));
        }
    }
    let free = params[3..].iter().all(|p| p.value.as_ref().is_some_and(Zero::is_zero));

    let vars = strings(&["x1", "x2", "x3", "y1", "y2", "y3"]);
    let all: Vec<String> = vars.iter().cloned().chain(names.iter().map(|s| s.to_string())).collect();
    let sc = Scope::new(&all);
    let mut flow_text = Vec::new();
    for &(_, j, k) in &CYCLIC {
        flow_text.push(format!("x{j}*x{k}/j{j} - x{k}*x{j}/j{k} + X{j}*y{k} - X{k}*y{j}"));
    }
    for &(_, j, k) in &CYCLIC {
        flow_text.push(if literal {
            format!("y{j}*x{k} - y{k}*x{j}")
        } else {
            format!("x{j}*y{k}/j{j} - x{k}*y{j}/j{k}")
        });
    }
    let flow = field(&flow_text, &sc)?;
    let f = |t: &str| -> Result<InvariantBody, SystemError> { Ok(InvariantBody::Function(parse_expr(t, &sc)?)) };
    let i3 = if literal {
        "x1^2/j1 + x2^2/j2 + x3^2/j3 + X1*y1 + X2*y2 + X3*y3"
    } else {
        "x1^2/j1 + x2^2/j2 + x3^2/j3 + 2*(X1*y1 + X2*y2 + X3*y3)"
    };
    let mut invariants = vec![
        ("I1".to_string(), f("y1^2 + y2^2 + y3^2")?),
        ("I2".to_string(), f("x1*y1 + x2*y2 + x3*y3")?),
        ("I3".to_string(), f(i3)?),
    ];
    let mut certificate = None;
    if free {
        invariants.push(("I4".to_string(), f("x1^2 + x2^2 + x3^2")?));
        invariants.push(("J5".to_string(), InvariantBody::Form(fifth_invariant(&sc)?)));
        let mut cert: Vec<CertEntry> = (1..=4).map(|i| CertEntry::Differential(format!("I{i}"))).collect();
        cert.push(CertEntry::Form("J5".into()));
        certificate = Some(cert);
    }
    let name = if literal { "euler_top_literal" } else { "euler_top" };
    SystemDef::new(name, vars, params, flow, invariants, certificate, None)
}

/// `Δ = ε_ijk y_i (x_j/j_j) x_k`.
const DELTA: &str = "(y1*x2*x3/j2 - y1*x3*x2/j3 + y2*x3*x1/j3 - y2*x1*x3/j1 + y3*x1*x2/j1 - y3*x2*x1/j2)";

/// `J5 = (x1/j1 dy1 + x2/j2 dy2 + x3/j3 dy3) / Δ` over a scope holding the
/// state variables and then `j1, j2, j3, X1, X2, X3`.
fn fifth_invariant(sc: &Scope) -> Result<DiffForm, SystemError> {
    let text = (1..=3).map(|i| format!("x{i}/(j{i}*{DELTA})*dy{i}")).collect::<Vec<_>>().join(" + ");
    Ok(parse_form(&text, sc, 6)?)
}

/// `J5` of the free top; refused unless every `X_i` is zero.
pub fn euler_top_fifth_invariant(j: [Rational; 3], x: [Rational; 3]) -> Result<DiffForm, SystemError> {
    if x.iter().any(|v| !v.is_zero()) {
        return Err(SystemError::J5Refused);
    }
    if let Some(i) = j.iter().position(Zero::is_zero) {
        return Err(SystemError::ZeroInertia(i + 1));
    }
    let names = ["x1", "x2", "x3", "y1", "y2", "y3", "j1", "j2", "j3", "X1", "X2", "X3"];
    let sc = Scope::new(&names);
    let params: Vec<Param> = names[6..]
        .iter()
        .zip(j.iter().chain(x.iter()))
        .map(|(n, v)| Param { name: n.to_string(), value: Some(v.clone()) })
        .collect();
    let binding = super::Binding::new(6, &params);
    binding.form(&fifth_invariant(&sc)?)
}
