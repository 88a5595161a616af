use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::exprcore::RationalFunction;
use crate::extcalc::{DiffForm, VectorField};

use super::eval::{compile_function, CompiledField, CompiledFunction, CompiledOneForm};
use super::integrate::rk4_compiled;
use super::NumError;

pub const MIN_LOOP_POINTS: usize = 16;

/// Closed polyline `p_0, ..., p_{m-1}, p_0` in phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSample {
    points: Vec<Vec<f64>>,
}

impl LoopSample {
    /// The closing segment `p_{m-1} -> p_0` is implicit.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, NumError> {
        if points.len() < MIN_LOOP_POINTS {
            return Err(NumError::LoopTooSmall(points.len()));
        }
        let n = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(NumError::DimensionMismatch { expected: n, got: p.len() });
        }
        Ok(LoopSample { points })
    }

    /// `center + r (cos θ u + sin θ v)` at `m` equally spaced angles.
    pub fn circle(center: &[f64], u: &[f64], v: &[f64], radius: f64, m: usize) -> Result<Self, NumError> {
        let points = (0..m)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                let (s, c) = th.sin_cos();
                center.iter().zip(u).zip(v).map(|((x, a), b)| x + radius * (c * a + s * b)).collect()
            })
            .collect();
        LoopSample::new(points)
    }

    /// A circle of the given radius in the tangent plane of the common level
    /// set of `integrals` through `center`, projected back onto the level set
    /// by Gauss-Newton iteration.
    pub fn on_level_set(
        center: &[f64],
        integrals: &[RationalFunction],
        radius: f64,
        m: usize,
    ) -> Result<Self, NumError> {
        let n = center.len();
        let level = LevelSet::new(integrals, n)?;
        if n < integrals.len() + 2 {
            return Err(NumError::InvalidArgument(format!(
                "level set of {} functions in dimension {n} has no 2-plane",
                integrals.len()
            )));
        }
        let g = level.jacobian(center)?;
        let eig = SymmetricEigen::new(g.transpose() * &g);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let u: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
        let v: Vec<f64> = eig.eigenvectors.column(order[1]).iter().copied().collect();
        let circle = LoopSample::circle(center, &u, &v, radius, m)?;
        let target = level.values(center)?;
        let points = circle
            .points
            .into_iter()
            .map(|p| level.project(p, &target))
            .collect::<Result<_, _>>()?;
        LoopSample::new(points)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// `∮ J` over the polyline, evaluating `J` at segment midpoints.
    pub fn line_integral(&self, j: &CompiledOneForm) -> Result<f64, NumError> {
        let m = self.points.len();
        let mut mid = vec![0.0; self.dim()];
        let mut step = vec![0.0; self.dim()];
        let mut total = 0.0;
        for k in 0..m {
            let (a, b) = (&self.points[k], &self.points[(k + 1) % m]);
            for i in 0..mid.len() {
                mid[i] = 0.5 * (a[i] + b[i]);
                step[i] = b[i] - a[i];
            }
            total += j.pair(&mid, &step)?;
        }
        Ok(total)
    }
}

struct LevelSet {
    values: Vec<CompiledFunction>,
    gradients: Vec<Vec<CompiledFunction>>,
}

impl LevelSet {
    fn new(integrals: &[RationalFunction], n: usize) -> Result<Self, NumError> {
        let values = integrals.iter().map(|f| compile_function(f, n)).collect::<Result<_, _>>()?;
        let gradients = integrals
            .iter()
            .map(|f| (0..n).map(|i| compile_function(&f.derivative(i), n)).collect())
            .collect::<Result<_, _>>()?;
        Ok(LevelSet { values, gradients })
    }

    fn values(&self, x: &[f64]) -> Result<DVector<f64>, NumError> {
        let v = self.values.iter().map(|f| f.eval(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(v))
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>, NumError> {
        let (k, n) = (self.gradients.len(), x.len());
        let mut g = DMatrix::zeros(k, n);
        for (r, row) in self.gradients.iter().enumerate() {
            for (c, f) in row.iter().enumerate() {
                g[(r, c)] = f.eval(x)?;
            }
        }
        Ok(g)
    }

    fn project(&self, mut p: Vec<f64>, target: &DVector<f64>) -> Result<Vec<f64>, NumError> {
        for _ in 0..50 {
            let r = self.values(&p)? - target;
            if r.amax() <= 1e-15 * (1.0 + target.amax()) {
                break;
            }
            let g = self.jacobian(&p)?;
            let ggt = &g * g.transpose();
            let y = ggt.lu().solve(&r).ok_or(NumError::SingularLevelSet)?;
            let delta = g.transpose() * y;
            for (x, d) in p.iter_mut().zip(delta.iter()) {
                *x -= d;
            }
        }
        Ok(p)
    }
}

/// Moves every loop vertex along the flow for time `t_end`.
pub fn advect_loop(field: &VectorField, lp: &LoopSample, t_end: f64, dt: f64) -> Result<LoopSample, NumError> {
    let f = CompiledField::new(field)?;
    let points = lp
        .points
        .par_iter()
        .map(|p| rk4_compiled(&f, p, t_end, dt, false).map(|t| t.last().to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LoopSample { points })
}

/// `(∮ J before, ∮ J after)` advecting the loop for time `t_end`.
pub fn advect_loop_integral(
    field: &VectorField,
    lp: &LoopSample,
    j: &DiffForm,
    t_end: f64,
    dt: f64,
) -> Result<(f64, f64), NumError> {
    let cj = CompiledOneForm::new(j)?;
    if cj.dim() != lp.dim() {
        return Err(NumError::DimensionMismatch { expected: cj.dim(), got: lp.dim() });
    }
    let before = lp.line_integral(&cj)?;
    let after = advect_loop(field, lp, t_end, dt)?.line_integral(&cj)?;
    Ok((before, after))
}
