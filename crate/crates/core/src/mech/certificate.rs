use std::fmt;

use crate::exprcore::Rational;
use crate::extcalc::{flow_to_form, DiffForm, VectorField};

use super::factor::{factorize_eq4, wedge_all};
use super::homotopy::homotopy_operator;
use super::MechError;

#[derive(Debug, Clone, PartialEq)]
pub enum Exactness {
    /// Closed with polynomial coefficients; `d(antiderivative) = factor`.
    Exact(DiffForm),
    NotClosed,
    /// Closed, but rational coefficients put exactness out of reach.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateFactor {
    pub form: DiffForm,
    pub closed: bool,
    pub exactness: Exactness,
}

impl CertificateFactor {
    fn new(form: DiffForm) -> Result<Self, MechError> {
        let closed = form.is_closed();
        let exactness = if !closed {
            Exactness::NotClosed
        } else if form.has_polynomial_coefficients() {
            let anti = homotopy_operator(&form)?;
            debug_assert_eq!(anti.ext_d(), form);
            Exactness::Exact(anti)
        } else {
            Exactness::Unknown
        };
        Ok(CertificateFactor { form, closed, exactness })
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.exactness, Exactness::Exact(_))
    }
}

/// A claimed splitting `X ⌟ Ω = c · J^1 ^ ... ^ J^m` with `Σ deg J^i = n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    factors: Vec<CertificateFactor>,
}

impl Certificate {
    pub fn new(forms: Vec<DiffForm>) -> Result<Self, MechError> {
        let first = forms.first().ok_or(MechError::EmptyCertificate)?;
        let (dim, nvars) = (first.dim(), first.nvars());
        if let Some(f) = forms.iter().find(|f| f.dim() != dim || f.nvars() != nvars) {
            return Err(MechError::Form(crate::extcalc::FormError::DimensionMismatch {
                left: dim,
                right: f.dim(),
            }));
        }
        if forms.iter().any(|f| f.degree() == 0) {
            return Err(MechError::ZeroDegree);
        }
        let sum: usize = forms.iter().map(DiffForm::degree).sum();
        if sum + 1 != dim {
            return Err(MechError::CertificateDegrees { sum, expected: dim.saturating_sub(1) });
        }
        let factors = forms.into_iter().map(CertificateFactor::new).collect::<Result<_, _>>()?;
        Ok(Certificate { factors })
    }

    pub fn factors(&self) -> &[CertificateFactor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors[0].form.dim()
    }

    pub fn signature(&self) -> Signature {
        let mut degrees: Vec<usize> = self.factors.iter().map(CertificateFactor::degree).collect();
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Signature(degrees)
    }

    pub fn product(&self) -> DiffForm {
        let forms: Vec<DiffForm> = self.factors.iter().map(|f| f.form.clone()).collect();
        wedge_all(&forms).expect("factors share a dimension")
    }
}

/// Factor degrees sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature(pub Vec<usize>);

impl Signature {
    pub fn all_ones(&self) -> bool {
        self.0.iter().all(|&k| k == 1)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub product: DiffForm,
    /// `w - c * product`, with `c = 1` when no scale was found.
    pub residual: DiffForm,
    pub scale: Option<Rational>,
    pub pass: bool,
}

/// Checks `w = c * J^1 ^ ... ^ J^m` exactly.
///
/// Without `allow_scale`, `c = 1`. With it, `c` is read off one matching
/// nonzero coefficient pair and then checked on every coefficient.
pub fn verify_certificate(
    w: &DiffForm,
    cert: &Certificate,
    allow_scale: bool,
) -> Result<VerificationReport, MechError> {
    let product = cert.product();
    if product.degree() != w.degree() || product.dim() != w.dim() {
        return Err(MechError::DegreeMismatch { expected: w.degree(), got: product.degree() });
    }
    let one = Rational::from_integer(1.into());
    let scale = if allow_scale { trial_scale(w, &product) } else { Some(one.clone()) };
    let c = scale.clone().unwrap_or(one);
    let residual = w.try_sub(&product.scale(&c))?;
    let pass = residual.is_zero();
    Ok(VerificationReport { product, residual, scale, pass })
}

fn trial_scale(w: &DiffForm, product: &DiffForm) -> Option<Rational> {
    if let Some(c) = w.constant_ratio(product) {
        return Some(c);
    }
    // w and the product disagree somewhere; report the first constant ratio
    product.terms().find_map(|(idx, p)| {
        let a = w.coefficient(idx);
        if a.is_zero() {
            return None;
        }
        a.checked_div(p).ok()?.constant_value()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanicsClass {
    Nambu,
    Poincare,
    Cartan,
    Undetermined,
}

impl MechanicsClass {
    /// ASCII name, used in machine-readable output.
    pub fn key(self) -> &'static str {
        match self {
            MechanicsClass::Nambu => "Nambu",
            MechanicsClass::Poincare => "Poincare",
            MechanicsClass::Cartan => "Cartan",
            MechanicsClass::Undetermined => "Undetermined",
        }
    }
}

impl fmt::Display for MechanicsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MechanicsClass::Poincare => f.write_str("Poincaré"),
            other => f.write_str(other.key()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Certificate,
    Factorization,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Certificate => "certificate-based",
            Provenance::Factorization => "factorization-based",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassLabel {
    pub class: MechanicsClass,
    pub provenance: Provenance,
    pub signature: Option<Signature>,
    pub note: String,
}

fn label_from(cert: &Certificate, provenance: Provenance) -> ClassLabel {
    let signature = cert.signature();
    let factors = cert.factors();
    let (class, note) = if !signature.all_ones() {
        (MechanicsClass::Cartan, "a factor has degree >= 2".to_string())
    } else if factors.iter().all(CertificateFactor::is_exact) {
        (MechanicsClass::Nambu, "every factor is an exact 1-form".to_string())
    } else if factors.iter().any(|f| f.closed && !f.is_exact()) {
        (
            MechanicsClass::Undetermined,
            "a closed factor has rational coefficients; exactness untested".to_string(),
        )
    } else {
        (MechanicsClass::Poincare, "1-form factors, not all exact".to_string())
    };
    ClassLabel { class, provenance, signature: Some(signature), note }
}

/// Nambu / Poincaré / Cartan label of a divergence-free flow.
///
/// With a certificate the label is read from its factors once the certificate
/// is verified (up to a constant) against `X ⌟ Ω`; a failing certificate gives
/// `Undetermined`. Without one, the factors of [`factorize_eq4`] are used.
pub fn classify(field: &VectorField, cert: Option<&Certificate>) -> Result<ClassLabel, MechError> {
    let div = field.divergence();
    if !div.is_zero() {
        return Err(MechError::NonzeroDivergence(div));
    }
    let w = flow_to_form(field)?;
    match cert {
        Some(cert) => {
            let report = verify_certificate(&w, cert, true)?;
            if !report.pass {
                return Ok(ClassLabel {
                    class: MechanicsClass::Undetermined,
                    provenance: Provenance::Certificate,
                    signature: Some(cert.signature()),
                    note: "certificate does not reproduce the flow form".to_string(),
                });
            }
            Ok(label_from(cert, Provenance::Certificate))
        }
        None => {
            if w.is_zero() {
                return Ok(ClassLabel {
                    class: MechanicsClass::Undetermined,
                    provenance: Provenance::Factorization,
                    signature: None,
                    note: "zero flow".to_string(),
                });
            }
            let f = factorize_eq4(&w)?;
            Ok(label_from(&Certificate::new(f.factors)?, Provenance::Factorization))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extcalc::parse_form;
    use crate::exprcore::{parse_expr, Scope};
    use crate::mech::nambu_flow;

    fn xyz() -> Scope {
        Scope::new(&["x", "y", "z"])
    }

    fn cubic(sc: &Scope) -> VectorField {
        VectorField::new(["z^2", "x^2", "y^2"].iter().map(|s| parse_expr(s, sc).unwrap()).collect()).unwrap()
    }

    fn cubic_cert(sc: &Scope) -> Certificate {
        Certificate::new(vec![
            parse_form("z^2*dy - x^2*dx", sc, 3).unwrap(),
            parse_form("dz - y^2/z^2*dx", sc, 3).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn factor_flags() {
        let sc = xyz();
        let cert = cubic_cert(&sc);
        assert!(cert.factors().iter().all(|f| !f.closed && f.exactness == Exactness::NotClosed));
        let exact = Certificate::new(vec![parse_form("y*dx + x*dy", &sc, 3).unwrap(), DiffForm::dx(3, 3, 2)]).unwrap();
        match &exact.factors()[0].exactness {
            Exactness::Exact(f) => assert_eq!(f.as_function().unwrap(), parse_expr("x*y", &sc).unwrap()),
            other => panic!("{other:?}"),
        }
        let closed_rational = Certificate::new(vec![parse_form("1/x*dx", &sc, 3).unwrap(), DiffForm::dx(3, 3, 1)]).unwrap();
        assert_eq!(closed_rational.factors()[0].exactness, Exactness::Unknown);
    }

    #[test]
    fn certificate_degree_sum_enforced() {
        let sc = xyz();
        let err = Certificate::new(vec![parse_form("dx", &sc, 3).unwrap()]).unwrap_err();
        assert_eq!(err, MechError::CertificateDegrees { sum: 1, expected: 2 });
    }

    #[test]
    fn verify_cubic_and_failure() {
        let sc = xyz();
        let w = flow_to_form(&cubic(&sc)).unwrap();
        let r = verify_certificate(&w, &cubic_cert(&sc), false).unwrap();
        assert!(r.pass);
        assert_eq!(r.scale, Some(Rational::from_integer(1.into())));

        let bad = Certificate::new(vec![DiffForm::dx(3, 3, 0), DiffForm::dx(3, 3, 0)]).unwrap();
        let w = DiffForm::basis(3, 3, &[0, 1]);
        let r = verify_certificate(&w, &bad, true).unwrap();
        assert!(!r.pass);
        assert_eq!(r.residual, w);
        assert_eq!(r.scale, None);
    }

    #[test]
    fn verify_finds_scale() {
        let sc = xyz();
        let w = parse_form("-3*dy^dz", &sc, 3).unwrap();
        let cert = Certificate::new(vec![DiffForm::dx(3, 3, 1), DiffForm::dx(3, 3, 2)]).unwrap();
        let r = verify_certificate(&w, &cert, true).unwrap();
        assert!(r.pass);
        assert_eq!(r.scale, Some(Rational::from_integer((-3).into())));
        assert!(!verify_certificate(&w, &cert, false).unwrap().pass);
    }

    #[test]
    fn classification_examples() {
        let sc = xyz();
        let x = cubic(&sc);
        let label = classify(&x, Some(&cubic_cert(&sc))).unwrap();
        assert_eq!(label.class, MechanicsClass::Poincare);
        assert_eq!(label.provenance, Provenance::Certificate);
        assert_eq!(label.signature, Some(Signature(vec![1, 1])));

        let i1 = parse_expr("1/2*(x^2 + y^2 + z^2)", &sc).unwrap();
        let i2 = parse_expr("x*y", &sc).unwrap();
        let x = nambu_flow(3, &[i1.clone(), i2.clone()]).unwrap();
        let cert = Certificate::new(vec![
            DiffForm::function(3, i1).ext_d(),
            DiffForm::function(3, i2).ext_d(),
        ])
        .unwrap();
        assert_eq!(classify(&x, Some(&cert)).unwrap().class, MechanicsClass::Nambu);
        assert_eq!(classify(&x, None).unwrap().provenance, Provenance::Factorization);
    }

    #[test]
    fn classification_without_certificate() {
        let sc = xyz();
        // direct factors of the cubic field contain a non-closed factor
        assert_eq!(classify(&cubic(&sc), None).unwrap().class, MechanicsClass::Poincare);
        // translation: factors dy, dz are exact
        let t = VectorField::coordinate(3, 3, 0);
        assert_eq!(classify(&t, None).unwrap().class, MechanicsClass::Nambu);
    }

    #[test]
    fn classification_rejects_divergence_and_bad_certificates() {
        let sc = xyz();
        let x = VectorField::new(["x", "0", "0"].iter().map(|s| parse_expr(s, &sc).unwrap()).collect()).unwrap();
        assert!(matches!(classify(&x, None), Err(MechError::NonzeroDivergence(_))));
        let wrong = Certificate::new(vec![DiffForm::dx(3, 3, 0), DiffForm::dx(3, 3, 1)]).unwrap();
        let label = classify(&cubic(&sc), Some(&wrong)).unwrap();
        assert_eq!(label.class, MechanicsClass::Undetermined);
    }

    #[test]
    fn labels_print() {
        assert_eq!(MechanicsClass::Poincare.to_string(), "Poincaré");
        assert_eq!(MechanicsClass::Poincare.key(), "Poincare");
        assert_eq!(Signature(vec![2, 1, 1]).to_string(), "(2,1,1)");
    }
}
