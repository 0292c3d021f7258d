use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::invert_block;
use crate::model::InformationModel;

/// Conditions the model on linear Gaussian observations `y = C x + v`,
/// `v ~ N(0, M)`: returns `J + C' M^{-1} C` and `h + C' M^{-1} y`.
///
/// A missing potential is treated as zero.
pub fn absorb_observations(
    model: &InformationModel,
    c: &DMatrix<f64>,
    noise: &DMatrix<f64>,
    y: &DVector<f64>,
) -> Result<InformationModel> {
    let n = model.dim();
    let m = c.nrows();
    if c.ncols() != n {
        return Err(Error::Dimension(format!(
            "observation matrix has {} columns but the model has {n} variables",
            c.ncols()
        )));
    }
    if noise.nrows() != m || noise.ncols() != m {
        return Err(Error::Dimension(format!(
            "noise covariance must be {m}x{m}, got {}x{}",
            noise.nrows(),
            noise.ncols()
        )));
    }
    if y.len() != m {
        return Err(Error::Dimension(format!(
            "observation vector has length {} but C has {m} rows",
            y.len()
        )));
    }
    let noise_inv = invert_block(noise, 0.0).ok_or(Error::Singular {
        deleted: Vec::new(),
    })?;

    let gain = c.transpose() * &noise_inv;
    let j = model.information() + &gain * c;
    let h = match model.potential() {
        Some(h) => h + &gain * y,
        None => &gain * y,
    };
    InformationModel::symmetrized(j, Some(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::cycle_c5;

    #[test]
    fn zero_observation_matrix_leaves_model_unchanged() {
        let model = cycle_c5(0.3)
            .with_potential(DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0]))
            .unwrap();
        let out = absorb_observations(
            &model,
            &DMatrix::zeros(2, 5),
            &DMatrix::identity(2, 2),
            &DVector::from_vec(vec![7.0, 8.0]),
        )
        .unwrap();
        assert_eq!(out, model);
    }

    #[test]
    fn identity_observations_add_identity() {
        let model = cycle_c5(0.3);
        let y = DVector::from_vec(vec![1.0, -1.0, 0.5, 0.0, 2.0]);
        let out = absorb_observations(
            &model,
            &DMatrix::identity(5, 5),
            &DMatrix::identity(5, 5),
            &y,
        )
        .unwrap();
        assert_eq!(
            out.information(),
            &(model.information() + DMatrix::identity(5, 5))
        );
        assert_eq!(out.potential().unwrap(), &y);
    }

    #[test]
    fn singular_noise_is_rejected() {
        let model = cycle_c5(0.3);
        let err = absorb_observations(
            &model,
            &DMatrix::identity(5, 5),
            &DMatrix::zeros(5, 5),
            &DVector::zeros(5),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let model = cycle_c5(0.3);
        let err = absorb_observations(
            &model,
            &DMatrix::identity(3, 4),
            &DMatrix::identity(3, 3),
            &DVector::zeros(3),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }
}
