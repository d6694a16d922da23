//! The scan sampling grid: 100 ns captures sampled every 61 ps.

/// Duration of one scan in nanoseconds.
pub const SCAN_DURATION_NS: f64 = 100.0;

/// Sampling resolution in picoseconds.
pub const BIN_WIDTH_PS: u32 = 61;

/// Sampling resolution in nanoseconds.
pub const BIN_WIDTH_NS: f64 = 0.061;

/// Number of bins in a scan, `floor(100 ns / 61 ps)`.
pub const NUM_BINS: usize = 1639;

/// Nearest bin for an absolute delay. Delays past the last bin centre
/// (but still inside the scan) land in the last bin.
pub fn bin_of_delay(delay_ns: f64) -> usize {
    let bin = (delay_ns / BIN_WIDTH_NS).round();
    if bin <= 0.0 {
        0
    } else {
        (bin as usize).min(NUM_BINS - 1)
    }
}

/// Delay of a bin centre in nanoseconds.
pub fn delay_of_bin(bin: usize) -> f64 {
    bin as f64 * BIN_WIDTH_NS
}
