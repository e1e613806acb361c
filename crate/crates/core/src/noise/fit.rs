//! Weighted least squares through the origin, `y ≈ slope · x`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OriginFit {
    pub slope: f64,
    pub std_error: f64,
}

/// Fits `y_i ≈ slope · x_i` with weights `w_i` (uniform if `None`).
///
/// The standard error is scaled by the residual variance, so it is zero for
/// noiseless data and needs at least two points to be meaningful.
pub fn fit_through_origin(y: &[f64], x: &[f64], weights: Option<&[f64]>) -> Result<OriginFit> {
    if y.len() != x.len() || y.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "fit needs equal-length, non-empty inputs (got {} and {})",
            y.len(),
            x.len()
        )));
    }
    if let Some(w) = weights {
        if w.len() != x.len() || w.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive, one per point".into()));
        }
    }
    let w = |k: usize| weights.map_or(1.0, |w| w[k]);
    let sxx: f64 = (0..x.len()).map(|k| w(k) * x[k] * x[k]).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("degenerate fit: every x is zero".into()));
    }
    let sxy: f64 = (0..x.len()).map(|k| w(k) * x[k] * y[k]).sum();
    let slope = sxy / sxx;
    let dof = x.len().saturating_sub(1);
    let std_error = if dof == 0 {
        f64::NAN
    } else {
        let rss: f64 = (0..x.len()).map(|k| w(k) * (y[k] - slope * x[k]).powi(2)).sum();
        (rss / dof as f64 / sxx).sqrt()
    };
    Ok(OriginFit { slope, std_error })
}

fn relative_weights(u: &[f64]) -> Result<Vec<f64>> {
    if u.iter().any(|&u| !(u > 0.0)) {
        return Err(Error::InvalidArgument("couplings must be positive".into()));
    }
    Ok(u.iter().map(|u| 1.0 / (u * u)).collect())
}

/// Mean phonon number from per-ion averaged decay parameters `ε̄_i = n̄ u_i`.
///
/// Points are weighted by `1 / u_i²`, i.e. the measurement noise is taken
/// to be relative.
pub fn fit_mean_phonon(eps_bar: &[f64], u: &[f64]) -> Result<OriginFit> {
    if u.iter().all(|&u| u == 0.0) {
        return Err(Error::InvalidArgument("degenerate fit: every coupling is zero".into()));
    }
    fit_through_origin(eps_bar, u, Some(&relative_weights(u)?))
}

/// Heating rate from per-ion decay slopes `γ_i = ṅ u_i`, weighted as in
/// [`fit_mean_phonon`].
pub fn fit_heating_rate(gamma: &[f64], u: &[f64]) -> Result<OriginFit> {
    fit_mean_phonon(gamma, u)
}
