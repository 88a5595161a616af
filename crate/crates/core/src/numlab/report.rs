use std::io::Write;

use crate::exprcore::RationalFunction;

use super::eval::compile_function;
use super::integrate::Trajectory;
use super::NumError;

/// Tab-separated table: time, state components, then one column per
/// invariant, with a header row of names.
pub fn write_report<W: Write + ?Sized>(
    out: &mut W,
    traj: &Trajectory,
    var_names: &[String],
    invariants: &[(String, RationalFunction)],
) -> Result<(), NumError> {
    let dim = traj.states().first().map_or(var_names.len(), Vec::len);
    let compiled = invariants
        .iter()
        .map(|(_, f)| compile_function(f, dim))
        .collect::<Result<Vec<_>, _>>()?;
    let io = |e: std::io::Error| NumError::Io(e.to_string());
    let header: Vec<&str> = std::iter::once("t")
        .chain(var_names.iter().take(dim).map(String::as_str))
        .chain(invariants.iter().map(|(n, _)| n.as_str()))
        .collect();
    writeln!(out, "{}", header.join("\t")).map_err(io)?;
    for (t, x) in traj.times().iter().zip(traj.states()) {
        let mut row = vec![t.to_string()];
        row.extend(x.iter().map(f64::to_string));
        for f in &compiled {
            row.push(f.eval(x)?.to_string());
        }
        writeln!(out, "{}", row.join("\t")).map_err(io)?;
    }
    Ok(())
}
