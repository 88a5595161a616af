//! Front end for `nambu-core`: system files, subcommands and reports.
//!
//! Every command prints a human-readable report followed by a `[machine]`
//! block of `key=value` lines. Exit codes: 0 pass, 1 verification failure,
//! 2 input or precondition error.

pub mod file;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nambu_core::exprcore::{parse_rational, Rational, RationalFunction};
use nambu_core::extcalc::{flow_to_form, DiffForm};
use nambu_core::mech::{
    classify, factorize_eq4, vector_hamiltonian, verify_certificate, wedge_all, Certificate, MechError,
    VerificationReport,
};
use nambu_core::numlab::{advect_loop_integral, invariant_drift, rk4_integrate, write_report, LoopSample};
use nambu_core::systems::{builtin_system, InvariantBody, InvariantStatus, ParamValue, SystemDef};
use num_traits::ToPrimitive;

pub use file::{render, FileError, SystemFile};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "nambu", version, about = "Nambu-type mechanics for divergence-free flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divergence, closedness, invariants, certificate and class.
    Analyze { file: PathBuf },
    /// A form h with dh = X ⌟ Ω.
    Hamiltonian {
        file: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Direct factorization of X ⌟ Ω into one-forms.
    Factor { file: PathBuf },
    /// Check the certificate against X ⌟ Ω.
    Verify {
        file: PathBuf,
        /// Solve for a constant factor c instead of requiring c = 1.
        #[arg(long)]
        scale: bool,
    },
    /// Nambu / Poincaré / Cartan label.
    Classify { file: PathBuf },
    /// RK4 trajectory as a tab-separated table.
    Simulate {
        file: PathBuf,
        #[arg(long = "t", default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Comma-separated initial state; overrides the file's [initial].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<String>>,
        /// Name of a 1-form invariant to transport along a loop.
        #[arg(long)]
        loop_invariant: Option<String>,
        #[arg(long, default_value_t = 256)]
        loop_m: usize,
        #[arg(long, default_value_t = 0.05)]
        loop_radius: f64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Write a built-in system to a file.
    Builtin {
        name: String,
        /// `k=v` binds a parameter, a bare `k` keeps it symbolic.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn input<T>(msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError(msg.into()))
}

/// Human lines plus machine key-value pairs.
#[derive(Default)]
struct Report {
    human: Vec<String>,
    machine: Vec<(String, String)>,
    pass: bool,
}

impl Report {
    fn new() -> Self {
        Report { pass: true, ..Default::default() }
    }

    fn say(&mut self, line: impl Into<String>) {
        self.human.push(line.into());
    }

    fn kv(&mut self, key: impl Into<String>, value: impl ToString) {
        self.machine.push((key.into(), value.to_string()));
    }

    fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for l in &self.human {
            writeln!(out, "{l}")?;
        }
        writeln!(out, "[machine]")?;
        for (k, v) in &self.machine {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<bool, InputError> {
    let report = match command {
        Command::Analyze { file } => analyze(&load(&file)?)?,
        Command::Hamiltonian { file, out: dest } => hamiltonian(&load(&file)?, dest.as_deref())?,
        Command::Factor { file } => factor(&load(&file)?)?,
        Command::Verify { file, scale } => verify(&load(&file)?, scale)?,
        Command::Classify { file } => class(&load(&file)?)?,
        Command::Simulate { file, t_end, dt, x0, loop_invariant, loop_m, loop_radius, out: dest } => {
            let sim = Simulation { t_end, dt, x0, loop_invariant, loop_m, loop_radius };
            let f = SystemFile::load(&file)?;
            return match dest {
                Some(p) => {
                    let mut w = std::fs::File::create(&p).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
                    simulate(&f, &sim, &mut w)
                }
                None => simulate(&f, &sim, out),
            };
        }
        Command::Builtin { name, params, out: dest } => builtin(&name, &params, dest.as_deref(), out)?,
    };
    report.write(out)?;
    Ok(report.pass)
}

fn load(path: &Path) -> Result<SystemDef, InputError> {
    Ok(SystemFile::load(path)?.system.bound()?)
}

fn show_fn(f: &RationalFunction, s: &SystemDef) -> String {
    f.display(&s.names()).to_string()
}

fn show_form(a: &DiffForm, s: &SystemDef) -> String {
    a.display(&s.names()).to_string()
}

fn certificate(s: &SystemDef) -> Result<Option<Certificate>, InputError> {
    match s.certificate_forms() {
        None => Ok(None),
        Some(forms) => Ok(Some(Certificate::new(forms?)?)),
    }
}

fn entries(s: &SystemDef) -> String {
    s.certificate().map_or_else(String::new, |c| c.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn scale_text(r: &VerificationReport) -> String {
    r.scale.as_ref().map_or_else(|| "none".to_string(), ToString::to_string)
}

fn certificate_lines(rep: &mut Report, s: &SystemDef, r: &VerificationReport) {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    rep.say(format!("certificate ({}): {verdict} c={}", entries(s), scale_text(r)));
    rep.kv("certificate", entries(s));
    rep.kv("certificate.pass", r.pass);
    rep.kv("certificate.scale", scale_text(r));
    rep.kv("certificate.residual_terms", r.residual.terms().count());
}

fn nonzero_divergence(s: &SystemDef) -> Result<(), InputError> {
    let div = s.flow().divergence();
    if div.is_zero() {
        Ok(())
    } else {
        input(format!("divergence nonzero: {}", show_fn(&div, s)))
    }
}

fn mech_error(s: &SystemDef, e: MechError) -> InputError {
    match e {
        MechError::NonzeroDivergence(d) => InputError(format!("divergence nonzero: {}", show_fn(&d, s))),
        other => InputError(other.to_string()),
    }
}

fn header(rep: &mut Report, s: &SystemDef) {
    rep.say(format!("system: {} (dimension {})", s.name(), s.dim()));
    rep.kv("system", s.name());
    rep.kv("dim", s.dim());
    let symbolic: Vec<&str> = s.params().iter().map(|p| p.name.as_str()).collect();
    if !symbolic.is_empty() {
        rep.say(format!("symbolic parameters: {}", symbolic.join(", ")));
        rep.kv("symbolic", symbolic.join(","));
    }
}

fn analyze(s: &SystemDef) -> Result<Report, InputError> {
    let mut rep = Report::new();
    header(&mut rep, s);
    let div = s.flow().divergence();
    rep.say(format!("divergence: {}", show_fn(&div, s)));
    rep.kv("divergence", show_fn(&div, s));
    let w = flow_to_form(s.flow())?;
    let closed = w.is_closed();
    rep.say(format!("X⌟Ω: {}", if closed { "closed" } else { "not closed" }));
    rep.kv("flow_form.closed", closed);
    rep.pass &= div.is_zero();

    for inv in s.invariants() {
        let key = format!("invariant.{}", inv.name);
        match &inv.body {
            InvariantBody::Function(_) => {
                let line = match inv.status {
                    InvariantStatus::FirstIntegral => "first integral".to_string(),
                    _ => {
                        let f = match &inv.body {
                            InvariantBody::Function(f) => nambu_core::mech::first_integral_check(s.flow(), f),
                            InvariantBody::Form(_) => unreachable!(),
                        };
                        format!("not conserved, X({}) = {}", inv.name, show_fn(&f, s))
                    }
                };
                rep.say(format!("{}: {line}", inv.name));
                rep.kv(format!("{key}.degree"), 0);
                rep.pass &= inv.status.holds();
            }
            InvariantBody::Form(a) => {
                let closed = a.is_closed();
                let status = match inv.status {
                    InvariantStatus::Absolute => "integral invariant",
                    InvariantStatus::Relative => "relative integral invariant",
                    _ => "not invariant",
                };
                let closedness = if closed { "closed" } else { "not closed" };
                rep.say(format!("{}: {closedness}; {status}", inv.name));
                rep.kv(format!("{key}.degree"), a.degree());
                rep.kv(format!("{key}.closed"), closed);
            }
        }
        rep.kv(format!("{key}.status"), inv.status.key());
    }

    let cert = certificate(s)?;
    if let Some(c) = &cert {
        let r = verify_certificate(&w, c, true)?;
        certificate_lines(&mut rep, s, &r);
        rep.pass &= r.pass;
    }
    if let Some(h) = s.hamiltonian() {
        let dh = h.ext_d();
        match dh.constant_ratio(&w) {
            Some(c) => {
                rep.say(format!("hamiltonian: dh = c X⌟Ω, c={c}"));
                rep.kv("hamiltonian.scale", c);
            }
            None => {
                rep.say("hamiltonian: dh is not a constant multiple of X⌟Ω");
                rep.kv("hamiltonian.scale", "none");
                rep.pass = false;
            }
        }
    }
    if div.is_zero() {
        let label = classify(s.flow(), cert.as_ref()).map_err(|e| mech_error(s, e))?;
        class_lines(&mut rep, &label);
    }
    Ok(rep)
}

fn class_lines(rep: &mut Report, label: &nambu_core::mech::ClassLabel) {
    let sig = label.signature.as_ref().map_or_else(|| "none".to_string(), ToString::to_string);
    rep.say(format!("class: {} ({}, signature {sig})", label.class, label.provenance));
    rep.say(format!("note: {}", label.note));
    rep.kv("class", label.class.key());
    let prov = match label.provenance {
        nambu_core::mech::Provenance::Certificate => "certificate",
        nambu_core::mech::Provenance::Factorization => "factorization",
    };
    rep.kv("class.provenance", prov);
    rep.kv("class.signature", sig);
}

fn hamiltonian(s: &SystemDef, dest: Option<&Path>) -> Result<Report, InputError> {
    nonzero_divergence(s)?;
    let h = vector_hamiltonian(s.flow()).map_err(|e| mech_error(s, e))?;
    let text = show_form(&h, s);
    let mut rep = Report::new();
    header(&mut rep, s);
    rep.say(format!("h = {text}"));
    let ok = h.ext_d() == flow_to_form(s.flow())?;
    rep.say(format!("dh = X⌟Ω: {}", if ok { "yes" } else { "no" }));
    rep.kv("hamiltonian", &text);
    rep.kv("hamiltonian.degree", h.degree());
    rep.kv("hamiltonian.check", ok);
    rep.pass = ok;
    if let Some(p) = dest {
        std::fs::write(p, format!("{text}\n")).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
        rep.say(format!("written to {}", p.display()));
    }
    Ok(rep)
}

fn factor(s: &SystemDef) -> Result<Report, InputError> {
    let w = flow_to_form(s.flow())?;
    let f = factorize_eq4(&w).map_err(|e| mech_error(s, e))?;
    let mut rep = Report::new();
    header(&mut rep, s);
    rep.say(format!("pivot: {} ({})", f.pivot + 1, s.vars()[f.pivot]));
    rep.kv("factor.pivot", f.pivot + 1);
    for (i, a) in f.factors.iter().enumerate() {
        rep.say(format!("factor {}: {}", i + 1, show_form(a, s)));
        rep.kv(format!("factor.{}", i + 1), show_form(a, s));
    }
    let ok = wedge_all(&f.factors)? == w;
    rep.say(format!("wedge of factors = X⌟Ω: {}", if ok { "yes" } else { "no" }));
    rep.kv("factor.check", ok);
    rep.pass = ok;
    Ok(rep)
}

fn verify(s: &SystemDef, allow_scale: bool) -> Result<Report, InputError> {
    let Some(cert) = certificate(s)? else {
        return input(format!("{}: no [certificate] section", s.name()));
    };
    let w = flow_to_form(s.flow())?;
    let r = verify_certificate(&w, &cert, allow_scale)?;
    let mut rep = Report::new();
    header(&mut rep, s);
    certificate_lines(&mut rep, s, &r);
    rep.say(format!("residual: {}", show_form(&r.residual, s)));
    rep.pass = r.pass;
    Ok(rep)
}

fn class(s: &SystemDef) -> Result<Report, InputError> {
    nonzero_divergence(s)?;
    let cert = certificate(s)?;
    let label = classify(s.flow(), cert.as_ref()).map_err(|e| mech_error(s, e))?;
    let mut rep = Report::new();
    header(&mut rep, s);
    if let Some(c) = &cert {
        let r = verify_certificate(&flow_to_form(s.flow())?, c, true)?;
        certificate_lines(&mut rep, s, &r);
        rep.pass = r.pass;
    }
    class_lines(&mut rep, &label);
    Ok(rep)
}

struct Simulation {
    t_end: f64,
    dt: f64,
    x0: Option<Vec<String>>,
    loop_invariant: Option<String>,
    loop_m: usize,
    loop_radius: f64,
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn simulate(f: &SystemFile, sim: &Simulation, out: &mut dyn Write) -> Result<bool, InputError> {
    let s = f.system.bound()?;
    if !s.params().is_empty() {
        let names: Vec<&str> = s.params().iter().map(|p| p.name.as_str()).collect();
        return input(format!("simulate needs every parameter bound; symbolic: {}", names.join(", ")));
    }
    if !(sim.dt > 0.0 && sim.t_end >= 0.0 && sim.t_end.is_finite()) {
        return input("need dt > 0 and a finite t >= 0");
    }
    let x0: Vec<f64> = match (&sim.x0, &f.initial) {
        (Some(v), _) => v.iter().map(|t| parse_rational(t.trim()).map(|r| to_f64(&r))).collect::<Result<_, _>>()?,
        (None, Some(v)) => v.iter().map(to_f64).collect(),
        (None, None) => return input("no initial state: add an [initial] section or pass --x0"),
    };
    if x0.len() != s.dim() {
        return input(format!("initial state has {} components, expected {}", x0.len(), s.dim()));
    }
    let traj = rk4_integrate(s.flow(), &x0, sim.t_end, sim.dt)?;
    let functions: Vec<(String, RationalFunction)> = s
        .invariants()
        .iter()
        .filter_map(|i| match &i.body {
            InvariantBody::Function(g) => Some((i.name.clone(), g.clone())),
            InvariantBody::Form(_) => None,
        })
        .collect();
    write_report(out, &traj, s.vars(), &functions)?;
    for inv in s.invariants().iter().filter(|i| i.status == InvariantStatus::FirstIntegral) {
        if let InvariantBody::Function(g) = &inv.body {
            writeln!(out, "# drift.{}={:e}", inv.name, invariant_drift(&traj, g)?)?;
        }
    }
    if let Some(name) = &sim.loop_invariant {
        let j = match s.invariant(name).map(|i| &i.body) {
            Some(InvariantBody::Form(a)) if a.degree() == 1 => a.clone(),
            Some(_) => return input(format!("loop invariant '{name}' is not a 1-form")),
            None => return input(format!("unknown invariant '{name}'")),
        };
        let integrals: Vec<RationalFunction> = s.first_integrals().into_iter().cloned().collect();
        let n = s.dim();
        let lp = if !integrals.is_empty() && n >= integrals.len() + 2 {
            LoopSample::on_level_set(&x0, &integrals, sim.loop_radius, sim.loop_m)?
        } else {
            let mut u = vec![0.0; n];
            let mut v = vec![0.0; n];
            u[0] = 1.0;
            v[1 % n] = 1.0;
            LoopSample::circle(&x0, &u, &v, sim.loop_radius, sim.loop_m)?
        };
        let (before, after) = advect_loop_integral(s.flow(), &lp, &j, sim.t_end, sim.dt)?;
        writeln!(out, "# loop.{name}.before={before:e}")?;
        writeln!(out, "# loop.{name}.after={after:e}")?;
        writeln!(out, "# loop.{name}.change={:e}", (after - before).abs())?;
    }
    Ok(true)
}

fn builtin(name: &str, params: &[String], dest: Option<&Path>, out: &mut dyn Write) -> Result<Report, InputError> {
    let mut bound = Vec::new();
    for p in params {
        let (k, v) = match p.split_once('=') {
            Some((k, v)) => (k.trim(), ParamValue::Value(parse_rational(v.trim())?)),
            None => (p.trim(), ParamValue::Symbolic),
        };
        bound.push((k.to_string(), v));
    }
    let s = builtin_system(name, &bound)?;
    let text = render(&s, None);
    let mut rep = Report::new();
    match dest {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
            rep.say(format!("wrote {} to {}", s.name(), p.display()));
            rep.kv("written", p.display());
        }
        None => {
            out.write_all(text.as_bytes())?;
            rep.kv("written", "stdout");
        }
    }
    Ok(rep)
}
