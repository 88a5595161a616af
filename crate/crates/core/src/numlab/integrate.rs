use crate::exprcore::RationalFunction;
use crate::extcalc::VectorField;

use super::eval::{compile_function, CompiledField};
use super::NumError;

/// Sampled solution of `x' = X(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectories are non-empty")
    }
}

/// Number of uniform steps covering `[0, t_end]` with step at most `dt`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn check_times(t_end: f64, dt: f64) -> Result<(), NumError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(NumError::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(NumError::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    Ok(())
}

/// Classical RK4 on a compiled field; returns every `stride`-th state plus
/// the final one.
pub(crate) fn rk4_compiled(
    f: &CompiledField,
    x0: &[f64],
    t_end: f64,
    dt: f64,
    keep_all: bool,
) -> Result<Trajectory, NumError> {
    check_times(t_end, dt)?;
    let n = f.dim();
    if x0.len() != n {
        return Err(NumError::DimensionMismatch { expected: n, got: x0.len() });
    }
    let steps = step_count(t_end, dt);
    let h = t_end / steps as f64;
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut traj = Trajectory { times: vec![0.0], states: vec![x.clone()] };
    for s in 1..=steps {
        f.eval_into(&x, &mut k1)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        f.eval_into(&tmp, &mut k2)?;
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        f.eval_into(&tmp, &mut k3)?;
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        f.eval_into(&tmp, &mut k4)?;
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(NumError::NonFinite { point: x });
        }
        if keep_all || s == steps {
            traj.times.push(s as f64 * h);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

/// Integrates `x' = X(x)` from `x0` over `[0, t_end]` with the classical
/// fourth-order Runge-Kutta scheme. The step is `t_end / ceil(t_end / dt)`.
pub fn rk4_integrate(field: &VectorField, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory, NumError> {
    rk4_compiled(&CompiledField::new(field)?, x0, t_end, dt, true)
}

/// `max_t |I(x(t)) - I(x(0))|`.
pub fn invariant_drift(traj: &Trajectory, i: &RationalFunction) -> Result<f64, NumError> {
    let first = traj.states.first().ok_or(NumError::EmptyTrajectory)?;
    let f = compile_function(i, first.len())?;
    let i0 = f.eval(first)?;
    traj.states.iter().try_fold(0.0f64, |m, x| Ok(m.max((f.eval(x)? - i0).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::{parse_expr, Scope};
    use std::f64::consts::PI;

    fn harmonic() -> (Scope, VectorField) {
        let sc = Scope::new(&["x1", "x2"]);
        let x = VectorField::new(vec![parse_expr("x2", &sc).unwrap(), parse_expr("-x1", &sc).unwrap()]).unwrap();
        (sc, x)
    }

    #[test]
    fn harmonic_period() {
        let (_, x) = harmonic();
        let t = rk4_integrate(&x, &[1.0, 0.0], 2.0 * PI, 1e-3).unwrap();
        let end = t.last();
        assert!((end[0] - 1.0).abs() < 1e-9 && end[1].abs() < 1e-9, "{end:?}");
        assert!((t.times().last().unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn zero_field_is_constant() {
        let x = VectorField::zero(3, 3);
        let t = rk4_integrate(&x, &[1.0, -2.0, 0.5], 1.0, 0.1).unwrap();
        assert!(t.states().iter().all(|s| s == &[1.0, -2.0, 0.5]));
        assert_eq!(t.len(), 11);
    }

    #[test]
    fn pole_is_reported() {
        let sc = Scope::new(&["x", "y", "z"]);
        let x = VectorField::new(["y^2/z^2", "1", "0"].iter().map(|s| parse_expr(s, &sc).unwrap()).collect())
            .unwrap();
        assert!(matches!(rk4_integrate(&x, &[0.0, 1.0, 0.0], 1.0, 0.1), Err(NumError::Pole { .. })));
    }

    #[test]
    fn drift_examples() {
        let (sc, x) = harmonic();
        let t = rk4_integrate(&x, &[1.0, 0.0], 10.0, 1e-3).unwrap();
        let h = parse_expr("1/2*(x1^2 + x2^2)", &sc).unwrap();
        assert!(invariant_drift(&t, &h).unwrap() <= 1e-8);
        assert_eq!(invariant_drift(&t, &parse_expr("5", &sc).unwrap()).unwrap(), 0.0);
        let d = invariant_drift(&t, &parse_expr("x1", &sc).unwrap()).unwrap();
        assert!((d - 2.0).abs() < 1e-5, "{d}");
    }

    #[test]
    fn fourth_order_convergence() {
        let (_, x) = harmonic();
        let err = |dt: f64| {
            let t = rk4_integrate(&x, &[1.0, 0.0], 2.0 * PI, dt).unwrap();
            let e = t.last();
            ((e[0] - 1.0).powi(2) + e[1].powi(2)).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn bad_arguments() {
        let (_, x) = harmonic();
        assert!(matches!(rk4_integrate(&x, &[1.0, 0.0], 1.0, 0.0), Err(NumError::InvalidArgument(_))));
        assert!(matches!(rk4_integrate(&x, &[1.0], 1.0, 0.1), Err(NumError::DimensionMismatch { .. })));
    }
}
