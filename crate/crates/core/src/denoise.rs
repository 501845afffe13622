//! Distance-to-measure outlier removal, used to stabilize the Mapper on
//! noisy data.

use crate::error::{input_err, Error, Result};
use crate::filters::dtm;
use crate::geometry::DistanceMatrix;

/// Threshold direction. `KeepLow` retains points whose DTM is at most the
/// threshold (removes sparse outliers, the default); `KeepHigh` retains the
/// complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtmKeep {
    KeepLow,
    KeepHigh,
}

/// Keeps the points on one side of tau = tau_frac * max DTM, computed with
/// `k` neighbors. Points exactly at the threshold are kept by both modes.
pub fn dtm_filter(
    dm: &DistanceMatrix,
    k: usize,
    tau_frac: f64,
    mode: DtmKeep,
) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&tau_frac) {
        return input_err(format!("threshold fraction {tau_frac} outside [0, 1]"));
    }
    let values = dtm(dm, k)?;
    let max = values.max();
    let tau = tau_frac * max;
    let kept: Vec<usize> = (0..dm.len())
        .filter(|&i| match mode {
            DtmKeep::KeepLow => values.value(i) <= tau,
            DtmKeep::KeepHigh => values.value(i) >= tau,
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(format!(
            "dtm filter removed every point (threshold {tau})"
        )));
    }
    Ok(kept)
}
