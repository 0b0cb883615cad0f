//! Aggregated per-phase timings.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::fusion::FusionStats;

/// Mean per-frame cost of each phase, in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingReport {
    pub frames: usize,
    pub preprocess: f64,
    pub allocate: f64,
    pub fuse: f64,
    pub finalize: f64,
    pub meshing: f64,
    /// Mean of the sum of all phases.
    pub total: f64,
    /// Share of `total` spent meshing.
    pub meshing_fraction: f64,
}

/// Summarizes fusion statistics and meshing durations.
///
/// `meshing` may be shorter than `stats` (meshing less often than every frame); its sum is
/// spread over all frames.
pub fn timing_report(stats: &[FusionStats], meshing: &[Duration]) -> Result<TimingReport> {
    if stats.is_empty() {
        return Err(Error::Input("timing report needs at least one frame".into()));
    }
    let n = stats.len() as f64;
    let mean = |f: fn(&FusionStats) -> Duration| stats.iter().map(|s| f(s).as_secs_f64()).fold(0.0, |a, b| a + b) / n;
    let preprocess = mean(|s| s.preprocess);
    let allocate = mean(|s| s.allocate);
    let fuse = mean(|s| s.fuse);
    let finalize = mean(|s| s.finalize);
    let meshing = meshing.iter().map(Duration::as_secs_f64).fold(0.0, |a, b| a + b) / n;
    let total = preprocess + allocate + fuse + finalize + meshing;
    let meshing_fraction = if total > 0.0 { meshing / total } else { 0.0 };
    Ok(TimingReport {
        frames: stats.len(),
        preprocess,
        allocate,
        fuse,
        finalize,
        meshing,
        total,
        meshing_fraction,
    })
}

impl TimingReport {
    /// `key=value` lines, times in milliseconds.
    pub fn to_text(&self) -> String {
        let ms = |s: f64| s * 1e3;
        format!(
            "frames={}\npreprocess_ms={:.4}\nallocate_ms={:.4}\nfuse_ms={:.4}\nfinalize_ms={:.4}\nmeshing_ms={:.4}\ntotal_ms={:.4}\nmeshing_fraction={:.4}\n",
            self.frames,
            ms(self.preprocess),
            ms(self.allocate),
            ms(self.fuse),
            ms(self.finalize),
            ms(self.meshing),
            ms(self.total),
            self.meshing_fraction
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_split() {
        let s = FusionStats { fuse: Duration::from_millis(10), ..Default::default() };
        let r = timing_report(&[s], &[Duration::from_millis(10)]).unwrap();
        assert!((r.meshing_fraction - 0.5).abs() < 1e-12);
        let sum = r.preprocess + r.allocate + r.fuse + r.finalize + r.meshing;
        assert!((sum - r.total).abs() < 1e-9);
    }

    #[test]
    fn no_meshing_prints_positive_zero() {
        let r = timing_report(&[FusionStats::default()], &[]).unwrap();
        assert!(r.to_text().contains("meshing_ms=0.0000\n"));
    }

    #[test]
    fn empty_rejected() {
        assert!(timing_report(&[], &[]).is_err());
    }
}
