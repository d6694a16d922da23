use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_NAKAGAMI_SAMPLES: usize = 100;
pub const MIN_M_PAIRS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NakagamiFit {
    pub m: f64,
    pub omega: f64,
}

/// Moment estimates `m = E[W^2]^2 / Var[W^2]`, `omega = E[W^2]` without a
/// sample-size floor. Used per scan where tap counts can be small.
pub fn nakagami_moments(samples: &[f64]) -> Result<NakagamiFit> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData("Nakagami moments need at least 2 samples".into()));
    }
    if samples.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidParameter("Nakagami samples must be finite and positive".into()));
    }
    let n = samples.len() as f64;
    let omega = samples.iter().map(|w| w * w).sum::<f64>() / n;
    let var = samples.iter().map(|w| (w * w - omega).powi(2)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(Error::DegenerateInput("W^2 has zero variance".into()));
    }
    Ok(NakagamiFit { m: omega * omega / var, omega })
}

pub fn fit_nakagami(samples: &[f64]) -> Result<NakagamiFit> {
    if samples.len() < MIN_NAKAGAMI_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "Nakagami fit needs at least {MIN_NAKAGAMI_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    nakagami_moments(samples)
}

/// `(K + 1)^2 / (2K + 1)` for linear K.
pub fn k_to_m(k_linear: f64) -> Result<f64> {
    if !(k_linear >= 0.0) {
        return Err(Error::InvalidParameter(format!("K = {k_linear} must be >= 0")));
    }
    if k_linear.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((k_linear + 1.0).powi(2) / (2.0 * k_linear + 1.0))
}

/// Across-scan statistics of per-scan Nakagami parameters.
///
/// The `*_db` fields follow the stored table convention: `mu = 10 log10(mean)`
/// and `sigma = 10 log10(variance)` of the linear values (so a zero variance
/// gives `-inf`). The `ln_*` fields are the lognormal parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallScaleStats {
    pub mu_mf_db: f64,
    pub sigma_mf_db: f64,
    pub mu_sc_db: f64,
    pub sigma_sc_db: f64,
    pub mean_m: f64,
    pub var_m: f64,
    pub mean_omega: f64,
    pub var_omega: f64,
    pub ln_mean_m: f64,
    pub ln_std_m: f64,
    pub ln_mean_omega: f64,
    pub ln_std_omega: f64,
    pub n_scans: usize,
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

pub fn lognormal_m_statistics(per_scan: &[NakagamiFit]) -> Result<SmallScaleStats> {
    if per_scan.len() < MIN_M_PAIRS {
        return Err(Error::InsufficientData(format!(
            "small-scale statistics need at least {MIN_M_PAIRS} scans, got {}",
            per_scan.len()
        )));
    }
    if per_scan.iter().any(|f| !(f.m > 0.0) || !(f.omega > 0.0)) {
        return Err(Error::InvalidParameter("m and omega must be positive".into()));
    }
    let m = per_scan.iter().map(|f| f.m);
    let o = per_scan.iter().map(|f| f.omega);
    let (mean_m, var_m) = mean_var(m.clone());
    let (mean_omega, var_omega) = mean_var(o.clone());
    let (ln_mean_m, ln_var_m) = mean_var(m.map(f64::ln));
    let (ln_mean_omega, ln_var_omega) = mean_var(o.map(f64::ln));
    let db = |x: f64| 10.0 * x.log10();
    Ok(SmallScaleStats {
        mu_mf_db: db(mean_m),
        sigma_mf_db: db(var_m),
        mu_sc_db: db(mean_omega),
        sigma_sc_db: db(var_omega),
        mean_m,
        var_m,
        mean_omega,
        var_omega,
        ln_mean_m,
        ln_std_m: ln_var_m.sqrt(),
        ln_mean_omega,
        ln_std_omega: ln_var_omega.sqrt(),
        n_scans: per_scan.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::{Distribution, Gamma, StandardNormal};

    fn nakagami(m: f64, omega: f64, n: usize, seed: u64) -> Vec<f64> {
        let g = Gamma::new(m, omega / m).unwrap();
        let mut rng = seeded(seed);
        (0..n).map(|_| g.sample(&mut rng).sqrt()).collect()
    }

    #[test]
    fn recovers_m2_omega3() {
        let fit = fit_nakagami(&nakagami(2.0, 3.0, 100_000, 1)).unwrap();
        assert!((fit.m / 2.0 - 1.0).abs() < 0.03, "{fit:?}");
        assert!((fit.omega / 3.0 - 1.0).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn rayleigh_m_near_one() {
        let fit = fit_nakagami(&nakagami(1.0, 0.4, 100_000, 2)).unwrap();
        assert!((0.97..=1.03).contains(&fit.m), "{fit:?}");
    }

    #[test]
    fn constant_is_degenerate() {
        let err = fit_nakagami(&[0.5; 200]).unwrap_err();
        assert!(err.to_string().contains("degenerate (deterministic) input"));
    }

    #[test]
    fn scaling_identity() {
        let w = nakagami(1.7, 1.0, 500, 3);
        let base = fit_nakagami(&w).unwrap();
        let scaled: Vec<f64> = w.iter().map(|x| 2.5 * x).collect();
        let fit = fit_nakagami(&scaled).unwrap();
        assert!((fit.m - base.m).abs() < 1e-9 * base.m);
        assert!((fit.omega - 6.25 * base.omega).abs() < 1e-9 * fit.omega);
    }

    #[test]
    fn k_to_m_values() {
        assert_eq!(k_to_m(0.0).unwrap(), 1.0);
        assert!((k_to_m(10.0).unwrap() - 121.0 / 21.0).abs() < 1e-12);
        let big = k_to_m(1e6).unwrap();
        assert!((big / 5e5 - 1.0).abs() < 1e-3);
        assert!(k_to_m(-0.1).is_err());
        let mut last = 1.0;
        for i in 1..200 {
            let m = k_to_m(i as f64 * 0.37).unwrap();
            assert!(m > last);
            last = m;
        }
    }

    #[test]
    fn unit_m_statistics() {
        let fits = vec![NakagamiFit { m: 1.0, omega: 2.0 }; 40];
        let s = lognormal_m_statistics(&fits).unwrap();
        assert_eq!(s.mu_mf_db, 0.0);
        assert_eq!(s.ln_std_m, 0.0);
        assert_eq!(s.var_m, 0.0);
        assert_eq!(s.sigma_mf_db, f64::NEG_INFINITY);
    }

    #[test]
    fn lognormal_recovery() {
        let mut rng = seeded(9);
        let (mu, s) = (-0.6, 0.4);
        let fits: Vec<_> = (0..10_000)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                NakagamiFit { m: (mu + s * z).exp(), omega: (0.2 + 0.5 * y).exp() }
            })
            .collect();
        let st = lognormal_m_statistics(&fits).unwrap();
        assert!((st.ln_mean_m / mu - 1.0).abs() < 0.05);
        assert!((st.ln_std_m / s - 1.0).abs() < 0.05);
        let mean = (mu + s * s / 2.0f64).exp();
        let var = ((s * s).exp() - 1.0) * (2.0 * mu + s * s).exp();
        assert!((st.mean_m / mean - 1.0).abs() < 0.05);
        assert!((st.var_m / var - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_nonpositive() {
        let mut fits = vec![NakagamiFit { m: 1.0, omega: 1.0 }; 40];
        fits[3].m = 0.0;
        assert!(lognormal_m_statistics(&fits).is_err());
        assert!(lognormal_m_statistics(&fits[..10]).is_err());
    }
}
