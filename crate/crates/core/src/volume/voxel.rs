use std::sync::atomic::{AtomicU64, Ordering};

/// `f64` cell supporting lock-free accumulation.
#[derive(Debug, Default)]
struct AtomicF64(AtomicU64);

impl AtomicF64 {
    fn new(v: f64) -> Self {
        AtomicF64(AtomicU64::new(v.to_bits()))
    }

    #[inline]
    fn load(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    fn fetch_add(&self, delta: f64) {
        let mut current = self.0.load(Ordering::Relaxed);
        loop {
            let next = (f64::from_bits(current) + delta).to_bits();
            match self
                .0
                .compare_exchange_weak(current, next, Ordering::Relaxed, Ordering::Relaxed)
            {
                Ok(_) => return,
                Err(actual) => current = actual,
            }
        }
    }

    #[inline]
    fn take(&mut self) -> f64 {
        let v = f64::from_bits(*self.0.get_mut());
        *self.0.get_mut() = 0f64.to_bits();
        v
    }
}

/// One directional TSDF sample.
///
/// `sdf`/`weight` hold the weighted cumulative moving average. The accumulation slots collect
/// the weighted sums of one fusion iteration and can be written concurrently through a shared
/// reference; [`Voxel::finalize`] folds them in and needs exclusive access.
#[derive(Debug, Default)]
pub struct Voxel {
    pub sdf: f64,
    pub weight: f64,
    acc_sdf: AtomicF64,
    acc_weight: AtomicF64,
}

impl Clone for Voxel {
    fn clone(&self) -> Self {
        Voxel {
            sdf: self.sdf,
            weight: self.weight,
            acc_sdf: AtomicF64::new(self.acc_sdf.load()),
            acc_weight: AtomicF64::new(self.acc_weight.load()),
        }
    }
}

impl PartialEq for Voxel {
    fn eq(&self, other: &Self) -> bool {
        self.sdf == other.sdf
            && self.weight == other.weight
            && self.acc_sdf.load() == other.acc_sdf.load()
            && self.acc_weight.load() == other.acc_weight.load()
    }
}

impl Voxel {
    pub fn new(sdf: f64, weight: f64) -> Voxel {
        Voxel {
            sdf,
            weight,
            ..Default::default()
        }
    }

    #[inline]
    pub fn is_observed(&self) -> bool {
        self.weight > 0.0
    }

    /// Adds `w * d` and `w` to the accumulation slots. Safe to call from many threads.
    #[inline]
    pub fn accumulate(&self, d: f64, w: f64) {
        debug_assert!(w >= 0.0);
        self.acc_sdf.fetch_add(w * d);
        self.acc_weight.fetch_add(w);
    }

    /// Current accumulation sums `(S_d, S_w)`.
    pub fn accumulated(&self) -> (f64, f64) {
        (self.acc_sdf.load(), self.acc_weight.load())
    }

    /// Folds the accumulated sums into the running average and clears the slots.
    ///
    /// Returns `false` (and leaves the voxel untouched) when nothing was accumulated.
    pub fn finalize(&mut self, truncation: f64, max_weight: f64) -> bool {
        let s_d = self.acc_sdf.take();
        let s_w = self.acc_weight.take();
        let total = self.weight + s_w;
        if s_w <= 0.0 || total <= 0.0 {
            return false;
        }
        let sdf = (self.weight * self.sdf + s_d) / total;
        self.sdf = sdf.clamp(-truncation, truncation);
        self.weight = total.min(max_weight);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn accumulation_sums() {
        let v = Voxel::default();
        v.accumulate(0.5, 1.0);
        v.accumulate(0.0, 1.0);
        assert_eq!(v.accumulated(), (0.5, 2.0));

        let w = Voxel::default();
        w.accumulate(0.0, 1.0);
        w.accumulate(0.5, 1.0);
        assert_eq!(w.accumulated(), v.accumulated());
    }

    #[test]
    fn finalize_matches_hand_computation() {
        let mut v = Voxel::new(1.0, 2.0);
        v.accumulate(0.25, 2.0);
        assert!(v.finalize(10.0, 255.0));
        assert_eq!(v.sdf, 0.625);
        assert_eq!(v.weight, 4.0);
        assert_eq!(v.accumulated(), (0.0, 0.0));
    }

    #[test]
    fn finalize_without_contribution_is_noop() {
        let mut v = Voxel::new(0.3, 7.0);
        assert!(!v.finalize(1.0, 255.0));
        assert_eq!(v, Voxel::new(0.3, 7.0));
        let mut empty = Voxel::default();
        assert!(!empty.finalize(1.0, 255.0));
        assert_eq!(empty.weight, 0.0);
    }

    #[test]
    fn finalize_clamps() {
        let mut v = Voxel::new(0.0, 250.0);
        v.accumulate(10.0, 10.0);
        v.finalize(0.02, 255.0);
        assert_eq!(v.weight, 255.0);
        assert_eq!(v.sdf, 0.02);
    }

    #[test]
    fn incremental_iterations_reproduce_batch_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v = Voxel::default();
        let (mut num, mut den) = (0.0, 0.0);
        for _ in 0..1000 {
            let d: f64 = rng.random_range(-0.04..0.04);
            v.accumulate(d, 1.0);
            v.finalize(0.04, f64::INFINITY);
            num += d;
            den += 1.0;
        }
        assert!((v.sdf - num / den).abs() < 1e-9);
        assert_eq!(v.weight, den);
    }
}
