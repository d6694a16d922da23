use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DiffuseDesignRow, DiffusePowerModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffuseFit {
    pub model: DiffusePowerModel,
    /// Unconstrained solution `[c_r0, c_p0, c_w0]` before clamping.
    pub unconstrained: [f64; 3],
    /// At least one constant was negative and clamped to zero.
    pub clamped: bool,
    pub residual_norm: f64,
    pub rows: usize,
}

/// Least squares `M c = A0 - A_b` over the design rows `[b_r0, b_p0, v_w0]`.
///
/// `sigma_a0_db` is `10 log10` of the residual standard deviation
/// (`-inf` for an exact fit).
pub fn fit_diffuse_power_lse(a0_observations: &[f64], rows: &[DiffuseDesignRow], a_b: f64) -> Result<DiffuseFit> {
    if a0_observations.len() != rows.len() {
        return Err(Error::InvalidParameter(format!(
            "{} observations for {} design rows",
            a0_observations.len(),
            rows.len()
        )));
    }
    if rows.len() < 3 {
        return Err(Error::DegenerateDesign(format!("{} rows; need at least 3", rows.len())));
    }
    // A canonical row order makes the solution bit-identical under any
    // permutation of the input.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (rows[i].as_array(), rows[j].as_array());
        a.iter()
            .zip(&b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a0_observations[i].total_cmp(&a0_observations[j]))
    });
    let m = DMatrix::from_fn(rows.len(), 3, |i, j| rows[order[i]].as_array()[j]);
    let rhs = DVector::from_iterator(rows.len(), order.iter().map(|&i| a0_observations[i] - a_b));
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rank < 3 {
        return Err(Error::DegenerateDesign(format!("design matrix has rank {rank}, need 3")));
    }
    let c = svd
        .solve(&rhs, 1e-10 * smax)
        .map_err(|e| Error::DegenerateDesign(e.to_string()))?;
    let residual = &m * &c - &rhs;
    let residual_norm = residual.norm();
    let dof = rows.len() - 3;
    let sigma = if dof > 0 { (residual.norm_squared() / dof as f64).sqrt() } else { 0.0 };

    let unconstrained = [c[0], c[1], c[2]];
    let clamped = unconstrained.iter().any(|&v| v < 0.0);
    let [c_r0, c_p0, c_w0] = unconstrained.map(|v| v.max(0.0));
    Ok(DiffuseFit {
        model: DiffusePowerModel { a_b, c_r0, c_p0, c_w0, sigma_a0_db: 10.0 * sigma.log10() },
        unconstrained,
        clamped,
        residual_norm,
        rows: rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forward(c: [f64; 3], a_b: f64) -> (Vec<f64>, Vec<DiffuseDesignRow>) {
        let rows = DiffuseDesignRow::full_design();
        let obs = rows
            .iter()
            .map(|r| {
                let x = r.as_array();
                a_b + c[0] * x[0] + c[1] * x[1] + c[2] * x[2]
            })
            .collect();
        (obs, rows)
    }

    #[test]
    fn noiseless_recovery() {
        let (obs, rows) = forward([1.0, 2.0, 0.1], 1.0);
        assert_eq!(rows.len(), 24);
        let fit = fit_diffuse_power_lse(&obs, &rows, 1.0).unwrap();
        assert!((fit.model.c_r0 - 1.0).abs() < 1e-9);
        assert!((fit.model.c_p0 - 2.0).abs() < 1e-9);
        assert!((fit.model.c_w0 - 0.1).abs() < 1e-9);
        let scale: f64 = obs.iter().map(|o| (o - 1.0f64).powi(2)).sum::<f64>().sqrt();
        assert!(fit.residual_norm < 1e-9 * scale);
        assert!(!fit.clamped);
    }

    #[test]
    fn zero_rhs() {
        let rows = DiffuseDesignRow::full_design();
        let fit = fit_diffuse_power_lse(&vec![1.0; 24], &rows, 1.0).unwrap();
        for v in [fit.model.c_r0, fit.model.c_p0, fit.model.c_w0] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn identical_rows_rank_error() {
        let rows = vec![DiffuseDesignRow::new(1, 0, 100.0).unwrap(); 10];
        let err = fit_diffuse_power_lse(&[2.0; 10], &rows, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateDesign(_)));
    }

    #[test]
    fn negative_constant_is_clamped() {
        let (obs, rows) = forward([-0.5, 2.0, 0.1], 1.0);
        let fit = fit_diffuse_power_lse(&obs, &rows, 1.0).unwrap();
        assert!(fit.clamped);
        assert_eq!(fit.model.c_r0, 0.0);
        assert!((fit.unconstrained[0] + 0.5).abs() < 1e-9);
    }

    #[test]
    fn permutation_invariant() {
        let (obs, rows) = forward([1.0, 2.0, 0.1], 1.0);
        let noisy: Vec<f64> = obs.iter().enumerate().map(|(i, o)| o + 0.01 * ((i * 7 % 5) as f64 - 2.0)).collect();
        let a = fit_diffuse_power_lse(&noisy, &rows, 1.0).unwrap();
        let order: Vec<usize> = (0..24).map(|i| (i * 5 + 3) % 24).collect();
        let b = fit_diffuse_power_lse(
            &order.iter().map(|&i| noisy[i]).collect::<Vec<_>>(),
            &order.iter().map(|&i| rows[i]).collect::<Vec<_>>(),
            1.0,
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
