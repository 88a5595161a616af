use std::collections::HashMap;

use crate::exprcore::RationalFunction;
use crate::extcalc::{MultiIndex, VectorField};

use super::MechError;

/// Nambu flow of `dim - 1` invariants.
///
/// Component `i` is the determinant of the matrix whose first rows are the
/// gradients and whose last row is `e_i`, signed so that
/// `flow_to_form(X) = dI_1 ^ ... ^ dI_{n-1}`. In R^3 this is the cross product
/// of the two gradients.
pub fn nambu_flow(dim: usize, invariants: &[RationalFunction]) -> Result<VectorField, MechError> {
    if dim < 2 || invariants.len() != dim - 1 {
        return Err(MechError::WrongInvariantCount {
            expected: dim.saturating_sub(1),
            got: invariants.len(),
        });
    }
    let nvars = invariants[0].nvars();
    if nvars < dim || invariants.iter().any(|f| f.nvars() != nvars) {
        return Err(MechError::Form(crate::extcalc::FormError::DimensionMismatch {
            left: dim,
            right: nvars,
        }));
    }
    let grads: Vec<Vec<RationalFunction>> = invariants
        .iter()
        .map(|f| (0..dim).map(|c| f.derivative(c)).collect())
        .collect();
    let minors = column_minors(&grads, dim, nvars);
    let full = MultiIndex::full(dim);
    let comps = (0..dim)
        .map(|i| {
            let m = minors[&full.remove(i).bits()].clone();
            if i % 2 == 1 {
                -m
            } else {
                m
            }
        })
        .collect();
    Ok(VectorField::new(comps)?)
}

/// Determinants of the `r x r` submatrices on the first `r` rows, keyed by
/// column set; returns the layer `r = rows.len()`.
fn column_minors(
    rows: &[Vec<RationalFunction>],
    ncols: usize,
    nvars: usize,
) -> HashMap<u32, RationalFunction> {
    let mut layer: HashMap<u32, RationalFunction> = HashMap::new();
    layer.insert(0, RationalFunction::one(nvars));
    for (r, row) in rows.iter().enumerate() {
        let mut next: HashMap<u32, RationalFunction> = HashMap::new();
        for (&cols, det) in &layer {
            if det.is_zero() {
                continue;
            }
            for (c, entry_c) in row.iter().enumerate().take(ncols) {
                if cols & (1 << c) != 0 || entry_c.is_zero() {
                    continue;
                }
                // Laplace expansion along the last row: the sign depends on the
                // position of column c within the enlarged set
                let pos = (cols & ((1 << c) - 1)).count_ones() as usize;
                let t = entry_c * det;
                let t = if (r + pos) % 2 == 1 { -t } else { t };
                let key = cols | (1 << c);
                let entry = next.entry(key).or_insert_with(|| RationalFunction::zero(nvars));
                *entry = &*entry + &t;
            }
        }
        layer = next;
    }
    // keep explicit zeros for column sets whose minor vanished
    let r = rows.len() as u32;
    for cols in 0u32..(1 << ncols) {
        if cols.count_ones() == r {
            layer.entry(cols).or_insert_with(|| RationalFunction::zero(nvars));
        }
    }
    layer
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::{parse_expr, Scope};

    #[test]
    fn harmonic_oscillator() {
        let sc = Scope::new(&["x1", "x2"]);
        let h = parse_expr("1/2*(x1^2 + x2^2)", &sc).unwrap();
        let x = nambu_flow(2, &[h]).unwrap();
        assert_eq!(x.component(0), &parse_expr("x2", &sc).unwrap());
        assert_eq!(x.component(1), &parse_expr("-x1", &sc).unwrap());
    }

    #[test]
    fn three_dim_matches_cross_product() {
        let sc = Scope::new(&["x", "y", "z"]);
        let i1 = parse_expr("1/2*(x^2 + y^2 + z^2)", &sc).unwrap();
        let i2 = parse_expr("x", &sc).unwrap();
        let x = nambu_flow(3, &[i1, i2]).unwrap();
        let expect = ["0", "z", "-y"].map(|s| parse_expr(s, &sc).unwrap());
        assert_eq!(x.components(), &expect);
    }

    #[test]
    fn constant_invariants_give_zero_field() {
        let sc = Scope::new(&["x", "y", "z"]);
        let c = parse_expr("7", &sc).unwrap();
        let x = nambu_flow(3, &[c.clone(), c]).unwrap();
        assert!(x.components().iter().all(RationalFunction::is_zero));
    }

    #[test]
    fn wrong_count_rejected() {
        let sc = Scope::new(&["x", "y", "z"]);
        let c = parse_expr("x", &sc).unwrap();
        assert_eq!(
            nambu_flow(3, &[c]).unwrap_err(),
            MechError::WrongInvariantCount { expected: 2, got: 1 }
        );
    }
}
