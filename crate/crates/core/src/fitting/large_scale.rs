use crate::analysis::AttenuationSample;
use crate::error::{Error, Result};
use crate::fitting::FitResult;

/// Ordinary least squares of attenuation on wind velocity.
///
/// Estimates `alpha` (dB/mph), `a_w0_db` and `sigma_a_db`, the residual
/// standard deviation with `n - 2` degrees of freedom.
pub fn fit_large_scale(samples: &[AttenuationSample]) -> Result<FitResult> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::DegenerateDesign(format!("{n} attenuation samples; need at least 2")));
    }
    let nf = n as f64;
    let v_mean = samples.iter().map(|s| s.wind_mph).sum::<f64>() / nf;
    let a_mean = samples.iter().map(|s| s.attenuation_db).sum::<f64>() / nf;
    let sxx: f64 = samples.iter().map(|s| (s.wind_mph - v_mean).powi(2)).sum();
    let sxy: f64 = samples
        .iter()
        .map(|s| (s.wind_mph - v_mean) * (s.attenuation_db - a_mean))
        .sum();
    if !(sxx > 1e-12 * (1.0 + v_mean * v_mean) * nf) {
        return Err(Error::DegenerateDesign("all samples share one wind velocity".into()));
    }
    let alpha = sxy / sxx;
    let a_w0 = a_mean - alpha * v_mean;
    let rss: f64 = samples
        .iter()
        .map(|s| (s.attenuation_db - a_w0 - alpha * s.wind_mph).powi(2))
        .sum();
    let dof = n.saturating_sub(2);
    let sigma2 = if dof > 0 { rss / dof as f64 } else { 0.0 };
    let sigma = sigma2.sqrt();

    let mut fit = FitResult { n_samples: n, residual_norm: rss.sqrt(), ..Default::default() };
    fit.insert("alpha", alpha, (sigma2 / sxx).sqrt());
    fit.insert("a_w0_db", a_w0, (sigma2 * (1.0 / nf + v_mean * v_mean / sxx)).sqrt());
    let sigma_se = if dof > 0 { sigma / (2.0 * dof as f64).sqrt() } else { 0.0 };
    fit.insert("sigma_a_db", sigma, sigma_se);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Position, RainState, Scenario, HURRICANE_WINDS_MPH};
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn sample(v: f64, a: f64) -> AttenuationSample {
        AttenuationSample {
            wind_mph: v,
            attenuation_db: a,
            scenario: Scenario::hurricane(Position::P1, RainState::S1, v).unwrap(),
        }
    }

    #[test]
    fn noiseless_exact() {
        let s: Vec<_> = HURRICANE_WINDS_MPH.iter().map(|&v| sample(v, -11.7 + 0.182 * v)).collect();
        let fit = fit_large_scale(&s).unwrap();
        assert!((fit.get("alpha").unwrap() - 0.182).abs() < 1e-9);
        assert!((fit.get("a_w0_db").unwrap() + 11.7).abs() < 1e-9);
        assert!(fit.residual_norm < 1e-9);
    }

    #[test]
    fn single_velocity_degenerate() {
        let s = vec![sample(90.0, 1.0), sample(90.0, 2.0)];
        let err = fit_large_scale(&s).unwrap_err();
        assert!(err.to_string().contains("degenerate design"));
    }

    #[test]
    fn null_slope() {
        let mut rng = seeded(17);
        let s: Vec<_> = HURRICANE_WINDS_MPH
            .iter()
            .flat_map(|&v| (0..100).map(move |_| v))
            .map(|v| sample(v, 3.0 + 12.0 * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let fit = fit_large_scale(&s).unwrap();
        assert!(fit.get("alpha").unwrap().abs() < 2.0 * fit.standard_error("alpha").unwrap());
        assert!((fit.get("sigma_a_db").unwrap() - 12.0).abs() < 1.0);
    }
}
