//! Named systems: a flow together with its registered invariants, an optional
//! splitting certificate and an optional vector Hamiltonian.
//!
//! Coefficient rings hold the state variables first and the parameters after
//! them. Parameters bound to a value are substituted by [`SystemDef::bound`];
//! unbound ones stay symbolic.

mod builtin;

use thiserror::Error;

pub use builtin::{builtin_system, euler_top_fifth_invariant, ParamValue, BUILTIN_NAMES};

use crate::exprcore::{ExprError, Rational, RationalFunction, Scope};
use crate::extcalc::{DiffForm, FormError, VectorField};
use crate::mech::{self, MechError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("unknown system '{0}'")]
    UnknownSystem(String),
    #[error("inertia j{0} must be nonzero")]
    ZeroInertia(usize),
    #[error("J5 is only an invariant when X = 0")]
    J5Refused,
    #[error("parameter '{name}': {msg}")]
    BadParameter { name: String, msg: String },
    #[error("flow has {flow} components for {vars} variables")]
    FlowDimension { flow: usize, vars: usize },
    #[error("coefficients live in {got} variables, expected {expected}")]
    RingMismatch { expected: usize, got: usize },
    #[error("name '{0}' is used twice")]
    DuplicateName(String),
    #[error("certificate refers to unknown invariant '{0}'")]
    UnknownInvariant(String),
    #[error("certificate entry '{0}' has the wrong kind")]
    CertificateKind(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Mech(#[from] MechError),
}

impl From<ExprError> for SystemError {
    fn from(e: ExprError) -> Self {
        SystemError::Form(FormError::Expr(e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    /// `None` keeps the parameter symbolic.
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InvariantBody {
    Function(RationalFunction),
    Form(DiffForm),
}

/// Verification outcome recorded when an invariant is registered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantStatus {
    /// `X(I) = 0`.
    FirstIntegral,
    NotConserved,
    /// `L_X J = 0`.
    Absolute,
    /// `L_X J ^ dI_1 ^ ... ^ dI_k = 0` over the registered first integrals.
    Relative,
    NotInvariant,
}

impl InvariantStatus {
    pub fn holds(self) -> bool {
        matches!(self, InvariantStatus::FirstIntegral | InvariantStatus::Absolute | InvariantStatus::Relative)
    }

    pub fn key(self) -> &'static str {
        match self {
            InvariantStatus::FirstIntegral => "first-integral",
            InvariantStatus::NotConserved => "not-conserved",
            InvariantStatus::Absolute => "integral-invariant",
            InvariantStatus::Relative => "relative-invariant",
            InvariantStatus::NotInvariant => "not-invariant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invariant {
    pub name: String,
    pub body: InvariantBody,
    pub status: InvariantStatus,
}

/// A certificate factor: `d` of a function invariant, or a form invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertEntry {
    Differential(String),
    Form(String),
}

impl std::fmt::Display for CertEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertEntry::Differential(n) => write!(f, "d({n})"),
            CertEntry::Form(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDef {
    name: String,
    vars: Vec<String>,
    params: Vec<Param>,
    flow: VectorField,
    invariants: Vec<Invariant>,
    certificate: Option<Vec<CertEntry>>,
    hamiltonian: Option<DiffForm>,
}

/// Substitution of the bound parameters followed by dropping them.
struct Binding {
    nvars: usize,
    subs: Vec<(usize, Rational)>,
    map: Vec<usize>,
}

impl Binding {
    fn new(dim: usize, params: &[Param]) -> Self {
        let mut subs = Vec::new();
        let mut map: Vec<usize> = (0..dim).collect();
        let mut next = dim;
        for (k, p) in params.iter().enumerate() {
            match &p.value {
                Some(v) => {
                    subs.push((dim + k, v.clone()));
                    map.push(0);
                }
                None => {
                    map.push(next);
                    next += 1;
                }
            }
        }
        Binding { nvars: next, subs, map }
    }

    fn function(&self, f: &RationalFunction) -> Result<RationalFunction, SystemError> {
        if self.subs.is_empty() {
            return Ok(f.clone());
        }
        Ok(f.substitute(&self.subs)?.remap(self.nvars, &self.map))
    }

    fn form(&self, a: &DiffForm) -> Result<DiffForm, SystemError> {
        let mut err = None;
        let out = a.map_into(self.nvars, |c| {
            self.function(c).unwrap_or_else(|e| {
                err = Some(e);
                RationalFunction::zero(self.nvars)
            })
        });
        err.map_or(Ok(out), Err)
    }

    fn field(&self, x: &VectorField) -> Result<VectorField, SystemError> {
        let comps = x.components().iter().map(|c| self.function(c)).collect::<Result<_, _>>()?;
        Ok(VectorField::new(comps)?)
    }

    fn body(&self, b: &InvariantBody) -> Result<InvariantBody, SystemError> {
        Ok(match b {
            InvariantBody::Function(f) => InvariantBody::Function(self.function(f)?),
            InvariantBody::Form(a) => InvariantBody::Form(self.form(a)?),
        })
    }
}

fn statuses(flow: &VectorField, bodies: &[InvariantBody]) -> Result<Vec<InvariantStatus>, SystemError> {
    let mut out = vec![InvariantStatus::NotConserved; bodies.len()];
    let mut integrals = Vec::new();
    for (s, b) in out.iter_mut().zip(bodies) {
        if let InvariantBody::Function(f) = b {
            if mech::first_integral_check(flow, f).is_zero() {
                *s = InvariantStatus::FirstIntegral;
                integrals.push(f.clone());
            }
        }
    }
    for (s, b) in out.iter_mut().zip(bodies) {
        if let InvariantBody::Form(j) = b {
            *s = if mech::lie_invariance_check(flow, j)?.is_zero() {
                InvariantStatus::Absolute
            } else if !integrals.is_empty() && mech::relative_invariance_check(flow, j, &integrals)?.is_zero() {
                InvariantStatus::Relative
            } else {
                InvariantStatus::NotInvariant
            };
        }
    }
    Ok(out)
}

impl SystemDef {
    /// Validates the definition and records the status of every invariant,
    /// computed after substituting the bound parameters.
    pub fn new(
        name: &str,
        vars: Vec<String>,
        params: Vec<Param>,
        flow: VectorField,
        invariants: Vec<(String, InvariantBody)>,
        certificate: Option<Vec<CertEntry>>,
        hamiltonian: Option<DiffForm>,
    ) -> Result<Self, SystemError> {
        let dim = vars.len();
        let nvars = dim + params.len();
        if flow.dim() != dim {
            return Err(SystemError::FlowDimension { flow: flow.dim(), vars: dim });
        }
        let mut seen = std::collections::HashSet::new();
        let names = vars.iter().chain(params.iter().map(|p| &p.name)).chain(invariants.iter().map(|(n, _)| n));
        for n in names {
            if !seen.insert(n.as_str()) {
                return Err(SystemError::DuplicateName(n.clone()));
            }
        }
        let ring = |got: usize| {
            if got == nvars {
                Ok(())
            } else {
                Err(SystemError::RingMismatch { expected: nvars, got })
            }
        };
        ring(flow.nvars())?;
        for (_, b) in &invariants {
            match b {
                InvariantBody::Function(f) => ring(f.nvars())?,
                InvariantBody::Form(a) => {
                    ring(a.nvars())?;
                    if a.dim() != dim {
                        return Err(FormError::DimensionMismatch { left: dim, right: a.dim() }.into());
                    }
                }
            }
        }
        if let Some(h) = &hamiltonian {
            ring(h.nvars())?;
        }
        let binding = Binding::new(dim, &params);
        let bound_flow = binding.field(&flow)?;
        let bound_bodies = invariants.iter().map(|(_, b)| binding.body(b)).collect::<Result<Vec<_>, _>>()?;
        let status = statuses(&bound_flow, &bound_bodies)?;
        let invariants = invariants
            .into_iter()
            .zip(status)
            .map(|((name, body), status)| Invariant { name, body, status })
            .collect();
        let def = SystemDef { name: name.to_string(), vars, params, flow, invariants, certificate, hamiltonian };
        if def.certificate.is_some() {
            def.certificate_forms().expect("certificate present")?;
        }
        Ok(def)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len() + self.params.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    /// State variables followed by parameter names: the printing context.
    pub fn names(&self) -> Vec<String> {
        self.vars.iter().cloned().chain(self.params.iter().map(|p| p.name.clone())).collect()
    }

    /// Parsing context with parameters as symbols.
    pub fn scope(&self) -> Scope {
        Scope::new(&self.names())
    }

    pub fn flow(&self) -> &VectorField {
        &self.flow
    }

    pub fn invariants(&self) -> &[Invariant] {
        &self.invariants
    }

    pub fn invariant(&self, name: &str) -> Option<&Invariant> {
        self.invariants.iter().find(|i| i.name == name)
    }

    pub fn certificate(&self) -> Option<&[CertEntry]> {
        self.certificate.as_deref()
    }

    pub fn hamiltonian(&self) -> Option<&DiffForm> {
        self.hamiltonian.as_ref()
    }

    /// Functions registered as first integrals.
    pub fn first_integrals(&self) -> Vec<&RationalFunction> {
        self.invariants
            .iter()
            .filter(|i| i.status == InvariantStatus::FirstIntegral)
            .filter_map(|i| match &i.body {
                InvariantBody::Function(f) => Some(f),
                InvariantBody::Form(_) => None,
            })
            .collect()
    }

    /// The certificate factors as forms.
    pub fn certificate_forms(&self) -> Option<Result<Vec<DiffForm>, SystemError>> {
        let entries = self.certificate.as_ref()?;
        Some(
            entries
                .iter()
                .map(|e| {
                    let name = match e {
                        CertEntry::Differential(n) | CertEntry::Form(n) => n,
                    };
                    let inv = self.invariant(name).ok_or_else(|| SystemError::UnknownInvariant(name.clone()))?;
                    match (e, &inv.body) {
                        (CertEntry::Differential(_), InvariantBody::Function(f)) => {
                            Ok(DiffForm::function(self.dim(), f.clone()).ext_d())
                        }
                        (CertEntry::Form(_), InvariantBody::Form(a)) if a.degree() > 0 => Ok(a.clone()),
                        _ => Err(SystemError::CertificateKind(e.to_string())),
                    }
                })
                .collect(),
        )
    }

    /// Substitutes every bound parameter and drops it from the ring.
    pub fn bound(&self) -> Result<SystemDef, SystemError> {
        let binding = Binding::new(self.dim(), &self.params);
        let invariants = self
            .invariants
            .iter()
            .map(|i| Ok(Invariant { name: i.name.clone(), body: binding.body(&i.body)?, status: i.status }))
            .collect::<Result<_, SystemError>>()?;
        Ok(SystemDef {
            name: self.name.clone(),
            vars: self.vars.clone(),
            params: self.params.iter().filter(|p| p.value.is_none()).cloned().collect(),
            flow: binding.field(&self.flow)?,
            invariants,
            certificate: self.certificate.clone(),
            hamiltonian: self.hamiltonian.as_ref().map(|h| binding.form(h)).transpose()?,
        })
    }

    /// True when every parameter has a value.
    pub fn is_numeric(&self) -> bool {
        self.params.iter().all(|p| p.value.is_some())
    }
}
