use nalgebra::{Point3, Vector3};

use super::config::{BilateralParams, FusionConfig};
use super::frame::{DepthFrame, DepthRange};
use crate::par;

/// Per-pixel unit normals in camera coordinates, oriented towards the camera.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalMap {
    pub width: usize,
    pub height: usize,
    pub normals: Vec<Option<Vector3<f64>>>,
}

impl NormalMap {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Option<Vector3<f64>> {
        self.normals[v * self.width + u]
    }

    pub fn valid_count(&self) -> usize {
        self.normals.iter().filter(|n| n.is_some()).count()
    }
}

/// Edge-preserving smoothing of the valid depth samples. Invalid pixels stay invalid (0).
///
/// Near the image border the window shrinks to stay centered on the pixel, so the filter
/// leaves depth that varies linearly across the image unchanged.
pub fn bilateral_filter(frame: &DepthFrame, params: &BilateralParams, range: &DepthRange) -> Vec<f32> {
    let (w, h) = (frame.width, frame.height);
    let r = params.radius as isize;
    let inv_s = 1.0 / (2.0 * params.sigma_spatial * params.sigma_spatial);
    let inv_r = 1.0 / (2.0 * params.sigma_range * params.sigma_range);
    let rows = par::map_range(h, |v| {
        let mut row = vec![0f32; w];
        for (u, out) in row.iter_mut().enumerate() {
            let Some(zc) = frame.depth(u, v, range) else { continue };
            let (mut sum, mut norm) = (0.0, 0.0);
            let (iu, iv) = (u as isize, v as isize);
            let ru = r.min(iu).min(w as isize - 1 - iu);
            let rv = r.min(iv).min(h as isize - 1 - iv);
            for dv in -rv..=rv {
                let y = iv + dv;
                for du in -ru..=ru {
                    let x = iu + du;
                    let Some(z) = frame.depth(x as usize, y as usize, range) else { continue };
                    let ds = (du * du + dv * dv) as f64;
                    let dz = z - zc;
                    let k = (-ds * inv_s - dz * dz * inv_r).exp();
                    sum += k * z;
                    norm += k;
                }
            }
            *out = (sum / norm) as f32;
        }
        row
    });
    rows.concat()
}

/// Normals from central differences of back-projected neighbors on a bilaterally filtered
/// copy of the depth image.
///
/// A pixel gets no normal when any of its four neighbors is invalid or departs from the
/// center depth by more than `cfg.normal_max_depth_jump` times that depth.
pub fn estimate_normals(frame: &DepthFrame, cfg: &FusionConfig) -> NormalMap {
    let (w, h) = (frame.width, frame.height);
    let range = cfg.depth_range;
    let filtered = bilateral_filter(frame, &cfg.bilateral, &range);
    let at = |u: usize, v: usize| {
        let z = filtered[v * w + u] as f64;
        range.contains(z).then_some(z)
    };
    let rows = par::map_range(h, |v| {
        let mut row = vec![None; w];
        if v == 0 || v + 1 >= h {
            return row;
        }
        for (u, out) in row.iter_mut().enumerate().take(w.saturating_sub(1)).skip(1) {
            let Some(zc) = at(u, v) else { continue };
            let neighbors = [(u - 1, v), (u + 1, v), (u, v - 1), (u, v + 1)];
            let mut pts = [Point3::origin(); 4];
            let mut ok = true;
            for (k, &(x, y)) in neighbors.iter().enumerate() {
                match at(x, y) {
                    Some(z) if (z - zc).abs() <= cfg.normal_max_depth_jump * zc => {
                        pts[k] = frame.backproject(x as f64, y as f64, z);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let dx = pts[1] - pts[0];
            let dy = pts[3] - pts[2];
            let n = dx.cross(&dy);
            let len = n.norm();
            if !(len > 0.0 && len.is_finite()) {
                continue;
            }
            let mut n = n / len;
            let center = frame.backproject(u as f64, v as f64, zc);
            if n.dot(&center.coords) > 0.0 {
                n = -n;
            }
            *out = Some(n);
        }
        row
    });
    NormalMap { width: w, height: h, normals: rows.concat() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::Intrinsics;
    use nalgebra::Isometry3;

    fn frame_from(width: usize, height: usize, f: impl Fn(usize, usize) -> f32) -> DepthFrame {
        let depth = (0..height).flat_map(|v| (0..width).map(move |u| (u, v))).map(|(u, v)| f(u, v)).collect();
        DepthFrame::new(width, height, depth, Intrinsics::new(100.0, 15.5, 11.5), Isometry3::identity()).unwrap()
    }

    #[test]
    fn fronto_parallel_plane() {
        let frame = frame_from(32, 24, |_, _| 1.5);
        let normals = estimate_normals(&frame, &FusionConfig::default());
        assert_eq!(normals.valid_count(), 30 * 22);
        for n in normals.normals.iter().flatten() {
            assert!(n.dot(&-Vector3::z()) > 1f64.to_radians().cos());
        }
    }

    #[test]
    fn isolated_pixel_has_no_normal() {
        let frame = frame_from(9, 9, |u, v| if (u, v) == (4, 4) { 1.0 } else { 0.0 });
        assert_eq!(estimate_normals(&frame, &FusionConfig::default()).valid_count(), 0);
    }

    #[test]
    fn filter_preserves_linear_ramp_up_to_the_border() {
        let frame = frame_from(12, 10, |u, v| 1.0 + 0.01 * u as f32 - 0.005 * v as f32);
        let out = bilateral_filter(&frame, &BilateralParams::default(), &DepthRange::default());
        for (a, b) in out.iter().zip(&frame.depth) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn filter_keeps_invalid_pixels_invalid() {
        let frame = frame_from(8, 8, |u, _| if u < 4 { 0.0 } else { 2.0 });
        let out = bilateral_filter(&frame, &BilateralParams::default(), &DepthRange::default());
        for v in 0..8 {
            for u in 0..8 {
                assert_eq!(out[v * 8 + u], if u < 4 { 0.0 } else { 2.0 });
            }
        }
    }
}
