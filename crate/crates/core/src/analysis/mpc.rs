use crate::synthesis::Cir;

pub const SIGNIFICANT_MPC_FRACTION: f64 = 0.15;

/// Components (direct path included) whose amplitude is at least
/// `fraction` of the scan's strongest component.
pub fn count_significant_mpcs(cir: &Cir, fraction: f64) -> usize {
    let amplitudes = cir.amplitudes();
    let max = amplitudes.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return amplitudes.len().min(1);
    }
    let threshold = fraction * max;
    amplitudes.iter().filter(|&&a| a >= threshold).count().max(1)
}

/// Components at or above an absolute amplitude, for comparing scans against
/// a threshold shared across an ensemble.
pub fn count_above_amplitude(cir: &Cir, threshold: f64) -> usize {
    cir.amplitudes().iter().filter(|&&a| a >= threshold).count()
}

/// Median over scans of the per-scan peak amplitude.
pub fn reference_peak_amplitude<'a>(scans: impl IntoIterator<Item = &'a Cir>) -> Option<f64> {
    let mut peaks: Vec<f64> = scans.into_iter().map(Cir::max_amplitude).collect();
    if peaks.is_empty() {
        return None;
    }
    peaks.sort_by(f64::total_cmp);
    let mid = peaks.len() / 2;
    Some(if peaks.len() % 2 == 1 { peaks[mid] } else { 0.5 * (peaks[mid - 1] + peaks[mid]) })
}
