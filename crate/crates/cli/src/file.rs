//! Line-oriented system-definition files.
//!
//! ```text
//! [name]
//! cubic3
//! [dim]
//! 3
//! [vars]
//! x y z
//! [params]
//! a = 1/2
//! b
//! [flow]
//! x = z^2
//! y = x^2
//! z = y^2
//! [invariant]
//! H = x + y
//! J1 = z^2*dy - x^2*dx
//! [certificate]
//! J1, d(H)
//! [hamiltonian]
//! 1/4*(x^2*z - y^3)*dx
//! [initial]
//! x = 1
//! ```
//!
//! A parameter without a value stays symbolic. `#` starts a comment.

use std::fmt::{self, Write as _};
use std::path::Path;

use nambu_core::exprcore::{parse_expr, parse_rational, Rational, RationalFunction, Scope};
use nambu_core::extcalc::{parse_form, DiffForm, VectorField};
use nambu_core::systems::{CertEntry, InvariantBody, Param, SystemDef, SystemError};
use thiserror::Error;

const SECTIONS: [&str; 9] =
    ["name", "dim", "vars", "params", "flow", "invariant", "certificate", "hamiltonian", "initial"];

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("{file}: {source}")]
    System { file: String, source: SystemError },
    /// Whole-file problems: unreadable, or a required section is missing.
    #[error("{file}: {msg}")]
    File { file: String, msg: String },
}

/// A parsed file: the system plus an optional initial state.
#[derive(Debug, Clone)]
pub struct SystemFile {
    pub system: SystemDef,
    pub initial: Option<Vec<Rational>>,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

#[derive(Default)]
struct Sections<'a> {
    by_name: Vec<(&'static str, usize, Vec<Line<'a>>)>,
}

impl<'a> Sections<'a> {
    fn get(&self, name: &str) -> Option<(usize, &[Line<'a>])> {
        self.by_name.iter().find(|(n, _, _)| *n == name).map(|(_, no, l)| (*no, l.as_slice()))
    }
}

struct Ctx<'a> {
    file: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, line: usize, msg: impl fmt::Display) -> Result<T, FileError> {
        Err(FileError::Parse { file: self.file.to_string(), line, msg: msg.to_string() })
    }

    fn split<'t>(&self, text: &'t str) -> Result<Sections<'t>, FileError> {
        let mut out = Sections::default();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(head) = line.strip_prefix('[') {
                let Some(name) = head.strip_suffix(']') else {
                    return self.err(no, "unterminated section header");
                };
                let Some(&name) = SECTIONS.iter().find(|s| **s == name.trim()) else {
                    return self.err(no, format!("unknown section [{}]", name.trim()));
                };
                if out.get(name).is_some() {
                    return self.err(no, format!("section [{name}] appears twice"));
                }
                out.by_name.push((name, no, Vec::new()));
                continue;
            }
            match out.by_name.last_mut() {
                Some((_, _, lines)) => lines.push(Line { no, text: line }),
                None => return self.err(no, "content before the first section"),
            }
        }
        Ok(out)
    }

    fn required<'s, 't>(&self, s: &'s Sections<'t>, name: &str) -> Result<(usize, &'s [Line<'t>]), FileError> {
        match s.get(name) {
            Some(v) => Ok(v),
            None => Err(FileError::File { file: self.file.to_string(), msg: format!("missing section [{name}]") }),
        }
    }

    fn assignment<'t>(&self, l: &Line<'t>) -> Result<(&'t str, &'t str), FileError> {
        match l.text.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim(), v.trim())),
            _ => self.err(l.no, "expected NAME = VALUE"),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SystemFile {
    pub fn load(path: &Path) -> Result<Self, FileError> {
        let file = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| FileError::File { file: file.clone(), msg: e.to_string() })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("system");
        Self::parse(&text, &file, stem)
    }

    /// Parses `text`; `file` labels error messages and `default_name` is used
    /// when there is no `[name]` section.
    pub fn parse(text: &str, file: &str, default_name: &str) -> Result<Self, FileError> {
        let cx = Ctx { file };
        let s = cx.split(text)?;

        let name = match s.get("name") {
            Some((_, [l])) => l.text.to_string(),
            Some((no, _)) => return cx.err(no, "[name] takes exactly one line"),
            None => default_name.to_string(),
        };

        let (dim_no, dim_lines) = cx.required(&s, "dim")?;
        let dim: usize = match dim_lines {
            [l] => match l.text.parse() {
                Ok(d) if d >= 1 => d,
                _ => return cx.err(l.no, format!("invalid dimension '{}'", l.text)),
            },
            _ => return cx.err(dim_no, "[dim] takes exactly one line"),
        };

        let (vars_no, vars_lines) = cx.required(&s, "vars")?;
        let mut vars = Vec::new();
        for l in vars_lines {
            for v in l.text.split(|c: char| c == ',' || c.is_whitespace()).filter(|v| !v.is_empty()) {
                if !is_identifier(v) {
                    return cx.err(l.no, format!("invalid variable name '{v}'"));
                }
                vars.push(v.to_string());
            }
        }
        if vars.len() != dim {
            return cx.err(vars_no, format!("{} variables declared for dimension {dim}", vars.len()));
        }

        let mut params = Vec::new();
        for l in s.get("params").map_or(&[][..], |(_, l)| l) {
            let (pname, value) = match l.text.split_once('=') {
                Some(_) => {
                    let (k, v) = cx.assignment(l)?;
                    match parse_rational(v) {
                        Ok(r) => (k, Some(r)),
                        Err(e) => return cx.err(l.no, format!("parameter '{k}': {e}")),
                    }
                }
                None => (l.text, None),
            };
            if !is_identifier(pname) {
                return cx.err(l.no, format!("invalid parameter name '{pname}'"));
            }
            params.push(Param { name: pname.to_string(), value });
        }

        let names: Vec<String> = vars.iter().cloned().chain(params.iter().map(|p| p.name.clone())).collect();
        let scope = Scope::new(&names);
        let expr = |l: &Line, text: &str| -> Result<RationalFunction, FileError> {
            parse_expr(text, &scope).or_else(|e| cx.err(l.no, e))
        };
        let form = |l: &Line, text: &str| -> Result<DiffForm, FileError> {
            parse_form(text, &scope, dim).or_else(|e| cx.err(l.no, e))
        };

        let (flow_no, flow_lines) = cx.required(&s, "flow")?;
        let mut comps: Vec<Option<RationalFunction>> = vec![None; dim];
        for l in flow_lines {
            let (k, v) = cx.assignment(l)?;
            let Some(i) = vars.iter().position(|x| x == k) else {
                return cx.err(l.no, format!("'{k}' is not a state variable"));
            };
            if comps[i].is_some() {
                return cx.err(l.no, format!("flow component '{k}' given twice"));
            }
            comps[i] = Some(expr(l, v)?);
        }
        let comps = comps
            .into_iter()
            .zip(&vars)
            .map(|(c, v)| c.map_or_else(|| cx.err(flow_no, format!("missing flow component '{v}'")), Ok))
            .collect::<Result<Vec<_>, _>>()?;
        let flow = VectorField::new(comps).or_else(|e| cx.err(flow_no, e))?;

        let mut invariants = Vec::new();
        for l in s.get("invariant").map_or(&[][..], |(_, l)| l) {
            let (k, v) = cx.assignment(l)?;
            if !is_identifier(k) {
                return cx.err(l.no, format!("invalid invariant name '{k}'"));
            }
            let f = form(l, v)?;
            let body = match f.as_function() {
                Some(g) if f.degree() == 0 => InvariantBody::Function(g),
                _ => InvariantBody::Form(f),
            };
            invariants.push((k.to_string(), body));
        }

        let certificate = match s.get("certificate") {
            None => None,
            Some((_, lines)) => {
                let mut entries = Vec::new();
                for l in lines {
                    for item in l.text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                        let entry = match item.strip_prefix("d(").and_then(|t| t.strip_suffix(')')) {
                            Some(n) => CertEntry::Differential(n.trim().to_string()),
                            None => CertEntry::Form(item.to_string()),
                        };
                        let n = match &entry {
                            CertEntry::Differential(n) | CertEntry::Form(n) => n,
                        };
                        if !invariants.iter().any(|(m, _)| m == n) {
                            return cx.err(l.no, format!("certificate refers to unknown invariant '{n}'"));
                        }
                        entries.push(entry);
                    }
                }
                Some(entries)
            }
        };

        let hamiltonian = match s.get("hamiltonian") {
            None => None,
            Some((_, [l])) => Some(form(l, l.text)?),
            Some((no, _)) => return cx.err(no, "[hamiltonian] takes exactly one line"),
        };

        let initial = match s.get("initial") {
            None => None,
            Some((no, lines)) => {
                let mut x: Vec<Option<Rational>> = vec![None; dim];
                for l in lines {
                    let (k, v) = cx.assignment(l)?;
                    let Some(i) = vars.iter().position(|n| n == k) else {
                        return cx.err(l.no, format!("'{k}' is not a state variable"));
                    };
                    x[i] = Some(parse_rational(v).or_else(|e| cx.err(l.no, e))?);
                }
                Some(
                    x.into_iter()
                        .zip(&vars)
                        .map(|(c, v)| c.map_or_else(|| cx.err(no, format!("missing initial value for '{v}'")), Ok))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };

        let system = SystemDef::new(&name, vars, params, flow, invariants, certificate, hamiltonian)
            .map_err(|source| FileError::System { file: file.to_string(), source })?;
        Ok(SystemFile { system, initial })
    }
}

/// Text form of a system, readable by [`SystemFile::parse`].
pub fn render(system: &SystemDef, initial: Option<&[Rational]>) -> String {
    let names = system.names();
    let mut out = String::new();
    let _ = writeln!(out, "[name]\n{}", system.name());
    let _ = writeln!(out, "[dim]\n{}", system.dim());
    let _ = writeln!(out, "[vars]\n{}", system.vars().join(" "));
    if !system.params().is_empty() {
        out.push_str("[params]\n");
        for p in system.params() {
            match &p.value {
                Some(v) => writeln!(out, "{} = {v}", p.name),
                None => writeln!(out, "{}", p.name),
            }
            .expect("write to string");
        }
    }
    out.push_str("[flow]\n");
    for (v, c) in system.vars().iter().zip(system.flow().components()) {
        let _ = writeln!(out, "{v} = {}", c.display(&names));
    }
    if !system.invariants().is_empty() {
        out.push_str("[invariant]\n");
        for inv in system.invariants() {
            let body = match &inv.body {
                InvariantBody::Function(f) => f.display(&names).to_string(),
                InvariantBody::Form(a) => a.display(&names).to_string(),
            };
            let _ = writeln!(out, "{} = {body}", inv.name);
        }
    }
    if let Some(cert) = system.certificate() {
        let items: Vec<String> = cert.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "[certificate]\n{}", items.join(", "));
    }
    if let Some(h) = system.hamiltonian() {
        let _ = writeln!(out, "[hamiltonian]\n{}", h.display(&names));
    }
    if let Some(x) = initial {
        out.push_str("[initial]\n");
        for (v, c) in system.vars().iter().zip(x) {
            let _ = writeln!(out, "{v} = {c}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBIC: &str = "\
[dim]
3
[vars]
x, y, z
[flow]
x = z^2   # comment
y = x^2
z = y^2
[invariant]
J1 = z^2*dy - x^2*dx
J2 = dz - y^2/z^2*dx
[certificate]
J1, J2
";

    #[test]
    fn parses_sections() {
        let f = SystemFile::parse(CUBIC, "cubic.sys", "cubic").unwrap();
        let s = &f.system;
        assert_eq!(s.name(), "cubic");
        assert_eq!(s.vars(), ["x", "y", "z"]);
        assert_eq!(s.certificate().unwrap().len(), 2);
        assert!(matches!(s.invariant("J2").unwrap().body, InvariantBody::Form(_)));
        assert!(f.initial.is_none());
    }

    #[test]
    fn render_round_trips() {
        let f = SystemFile::parse(CUBIC, "cubic.sys", "cubic").unwrap();
        let x0 = [Rational::from_integer(1.into()), Rational::new(1.into(), 2.into()), Rational::from_integer(0.into())];
        let text = render(&f.system, Some(&x0));
        let g = SystemFile::parse(&text, "again.sys", "other").unwrap();
        assert_eq!(g.system, f.system);
        assert_eq!(g.initial.as_deref(), Some(&x0[..]));
    }

    #[test]
    fn errors_carry_file_and_line() {
        let bad = CUBIC.replace("y = x^2", "y = x^^2");
        let e = SystemFile::parse(&bad, "bad.sys", "b").unwrap_err().to_string();
        assert!(e.starts_with("bad.sys:7: "), "{e}");
        let e = SystemFile::parse(&CUBIC.replace("[vars]\nx, y, z", "[vars]\nx y"), "v.sys", "v").unwrap_err();
        assert!(e.to_string().starts_with("v.sys:3: 2 variables"), "{e}");
        let e = SystemFile::parse(&CUBIC.replace("J1, J2", "J1, J9"), "c.sys", "c").unwrap_err();
        assert!(e.to_string().contains("unknown invariant 'J9'"), "{e}");
        let e = SystemFile::parse("x = 1\n", "f.sys", "f").unwrap_err();
        assert!(e.to_string().starts_with("f.sys:1: content before"), "{e}");
        let e = SystemFile::parse("[dim]\n2\n[vars]\na b\n", "m.sys", "m").unwrap_err();
        assert_eq!(e.to_string(), "m.sys: missing section [flow]");
    }

    #[test]
    fn symbolic_parameters() {
        let text = "[dim]\n2\n[vars]\nq p\n[params]\nw\nk = 3/2\n[flow]\nq = w*p\np = -k*q\n";
        let f = SystemFile::parse(text, "osc.sys", "osc").unwrap();
        let ps = f.system.params();
        assert_eq!(ps[0].value, None);
        assert_eq!(ps[1].value, Some(Rational::new(3.into(), 2.into())));
        assert_eq!(f.system.nvars(), 4);
    }
}
