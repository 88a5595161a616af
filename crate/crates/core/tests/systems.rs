use nambu_core::exprcore::{parse_expr, Rational, Scope};
use nambu_core::extcalc::{flow_to_form, DiffForm};
use nambu_core::mech::{self, verify_certificate, Certificate};
use nambu_core::systems::{
    builtin_system, euler_top_fifth_invariant, InvariantBody, InvariantStatus, ParamValue, SystemDef, SystemError,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn param(name: &str, v: ParamValue) -> (String, ParamValue) {
    (name.to_string(), v)
}

fn symbolic_top() -> SystemDef {
    let all = ["j1", "j2", "j3", "X1", "X2", "X3"].map(|n| param(n, ParamValue::Symbolic));
    builtin_system("euler_top", &all).unwrap()
}

fn status(s: &SystemDef, name: &str) -> InvariantStatus {
    s.invariant(name).unwrap_or_else(|| panic!("{name} missing")).status
}

fn flow_form(s: &SystemDef) -> DiffForm {
    flow_to_form(s.flow()).unwrap()
}

fn certificate(s: &SystemDef) -> Certificate {
    Certificate::new(s.certificate_forms().unwrap().unwrap()).unwrap()
}

fn function(s: &SystemDef, name: &str) -> nambu_core::exprcore::RationalFunction {
    match &s.invariant(name).unwrap().body {
        InvariantBody::Function(f) => f.clone(),
        InvariantBody::Form(_) => panic!("{name} is a form"),
    }
}

#[test]
fn builtin_flows_are_divergence_free() {
    let n = |k: i64| vec![param("n", ParamValue::Value(q(k, 1)))];
    let systems = [
        builtin_system("harmonic", &[]).unwrap(),
        builtin_system("cubic3", &[]).unwrap(),
        builtin_system("symplectic", &n(2)).unwrap(),
        builtin_system("symplectic", &n(3)).unwrap(),
        builtin_system("symplectic", &n(4)).unwrap(),
        builtin_system("euler_top", &[]).unwrap(),
        builtin_system("euler_top_literal", &[]).unwrap(),
        symbolic_top(),
    ];
    for s in &systems {
        assert!(s.flow().divergence().is_zero(), "{}", s.name());
    }
}

#[test]
fn cubic_identities() {
    let s = builtin_system("cubic3", &[]).unwrap();
    let sc = s.scope();
    let expect: Vec<_> = ["z^2", "x^2", "y^2"].iter().map(|t| parse_expr(t, &sc).unwrap()).collect();
    assert_eq!(s.flow().components(), &expect[..]);
    let w = flow_form(&s);
    assert_eq!(s.hamiltonian().unwrap().ext_d(), w);
    let r = verify_certificate(&w, &certificate(&s), false).unwrap();
    assert!(r.pass);
    assert_eq!(status(&s, "J1"), InvariantStatus::NotInvariant);
}

#[test]
fn symplectic_four_identities() {
    let s = builtin_system("symplectic", &[]).unwrap();
    assert_eq!(s.vars(), ["x1", "p1", "x2", "p2"]);
    let w = flow_form(&s);
    let dh = s.hamiltonian().unwrap().ext_d();
    let cert = certificate(&s);
    let product = cert.product();
    // both constants are 1 in the order x1, p1, x2, p2
    assert_eq!(dh.constant_ratio(&product), Some(q(1, 1)));
    assert_eq!(dh.constant_ratio(&w), Some(q(1, 1)));
    assert_eq!(status(&s, "I1"), InvariantStatus::FirstIntegral);
    assert_eq!(status(&s, "I2"), InvariantStatus::FirstIntegral);
    assert_eq!(status(&s, "J3"), InvariantStatus::Relative);
}

#[test]
fn symplectic_higher_dimensions() {
    let s6 = builtin_system("symplectic", &[param("n", ParamValue::Value(q(3, 1)))]).unwrap();
    let w = flow_form(&s6);
    let r = verify_certificate(&w, &certificate(&s6), true).unwrap();
    assert!(r.pass);
    assert_eq!(r.scale, Some(q(1, 1)));
    // the pairwise sum printed for R^6 has component ratios +1 and -1
    let pairs = match &s6.invariant("Jpairs").unwrap().body {
        InvariantBody::Form(f) => f.clone(),
        _ => unreachable!(),
    };
    let mut forms: Vec<DiffForm> =
        (1..=3).map(|i| DiffForm::function(6, function(&s6, &format!("I{i}"))).ext_d()).collect();
    forms.push(pairs);
    let r = verify_certificate(&w, &Certificate::new(forms).unwrap(), true).unwrap();
    assert!(!r.pass);

    let s8 = builtin_system("symplectic", &[param("n", ParamValue::Value(q(4, 1)))]).unwrap();
    let r = verify_certificate(&flow_form(&s8), &certificate(&s8), true).unwrap();
    assert!(r.pass);
    assert_eq!(r.scale, Some(q(-1, 1)));
}

#[test]
fn euler_top_free_invariants() {
    let s = builtin_system("euler_top", &[]).unwrap();
    for name in ["I1", "I2", "I3", "I4"] {
        assert_eq!(status(&s, name), InvariantStatus::FirstIntegral, "{name}");
    }
    // L_X J5 is not zero, but vanishes on the common level sets of I1..I4
    assert_eq!(status(&s, "J5"), InvariantStatus::Relative);
    let b = s.bound().unwrap();
    assert_eq!(b.nvars(), 6);
    let j5 = match &b.invariant("J5").unwrap().body {
        InvariantBody::Form(f) => f.clone(),
        _ => unreachable!(),
    };
    assert!(!mech::lie_invariance_check(b.flow(), &j5).unwrap().is_zero());
    assert!(j5.interior(b.flow()).unwrap().as_function().unwrap().is_zero());
}

#[test]
fn euler_top_fifth_invariant_scale() {
    for j in [[1, 2, 3], [2, 3, 7], [5, 1, 4]] {
        let params: Vec<_> =
            ["j1", "j2", "j3"].iter().zip(j).map(|(n, v)| param(n, ParamValue::Value(q(v, 1)))).collect();
        let s = builtin_system("euler_top", &params).unwrap().bound().unwrap();
        let r = verify_certificate(&flow_form(&s), &certificate(&s), true).unwrap();
        assert!(r.pass, "{j:?}");
        assert_eq!(r.scale, Some(q(-1, 8)), "{j:?}");
    }
}

#[test]
fn euler_top_symbolic_parameters() {
    let s = symbolic_top();
    assert_eq!(s.nvars(), 12);
    for name in ["I1", "I2", "I3"] {
        assert_eq!(status(&s, name), InvariantStatus::FirstIntegral, "{name}");
        assert!(mech::first_integral_check(s.flow(), &function(&s, name)).is_zero());
    }
    assert!(s.invariant("I4").is_none() && s.invariant("J5").is_none());
    assert!(s.certificate().is_none());
}

#[test]
fn euler_top_symbolic_inertia_free() {
    let mut params: Vec<_> = ["j1", "j2", "j3"].iter().map(|n| param(n, ParamValue::Symbolic)).collect();
    params.extend(["X1", "X2", "X3"].iter().map(|n| param(n, ParamValue::Value(q(0, 1)))));
    let s = builtin_system("euler_top", &params).unwrap().bound().unwrap();
    assert_eq!(s.nvars(), 9);
    for name in ["I1", "I2", "I3", "I4"] {
        assert!(mech::first_integral_check(s.flow(), &function(&s, name)).is_zero(), "{name}");
    }
}

#[test]
fn euler_top_literal_transcription_fails() {
    let s = builtin_system("euler_top_literal", &[]).unwrap();
    assert_eq!(status(&s, "I1"), InvariantStatus::FirstIntegral);
    assert_eq!(status(&s, "I2"), InvariantStatus::NotConserved);
    let b = s.bound().unwrap();
    let sc = Scope::new(b.vars());
    let delta = parse_expr("(1/2 - 1/3)*y1*x2*x3 + (1/3 - 1)*y2*x3*x1 + (1 - 1/2)*y3*x1*x2", &sc).unwrap();
    assert_eq!(mech::first_integral_check(b.flow(), &function(&b, "I2")), delta);
    let r = verify_certificate(&flow_form(&b), &certificate(&b), true).unwrap();
    assert!(!r.pass);
}

#[test]
fn builtin_errors() {
    assert_eq!(builtin_system("frobnicator", &[]).unwrap_err(), SystemError::UnknownSystem("frobnicator".into()));
    let zero = [param("j2", ParamValue::Value(q(0, 1)))];
    assert_eq!(builtin_system("euler_top", &zero).unwrap_err(), SystemError::ZeroInertia(2));
    assert!(matches!(
        builtin_system("cubic3", &[param("n", ParamValue::Value(q(2, 1)))]),
        Err(SystemError::BadParameter { .. })
    ));
    assert!(matches!(
        builtin_system("symplectic", &[param("n", ParamValue::Value(q(1, 1)))]),
        Err(SystemError::BadParameter { .. })
    ));
    let j = [q(1, 1), q(2, 1), q(3, 1)];
    assert_eq!(euler_top_fifth_invariant(j.clone(), [q(0, 1), q(1, 2), q(0, 1)]), Err(SystemError::J5Refused));
    assert!(euler_top_fifth_invariant(j, [q(0, 1), q(0, 1), q(0, 1)]).is_ok());
    // X != 0: no J5 registered
    let s = builtin_system("euler_top", &[param("X1", ParamValue::Value(q(1, 1)))]).unwrap();
    assert!(s.invariant("J5").is_none());
    assert_eq!(status(&s, "I3"), InvariantStatus::FirstIntegral);
}
