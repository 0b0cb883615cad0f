//! 16-bit depth images (PNG or binary PGM).

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};
use nalgebra::Isometry3;

use crate::error::{Error, Result};
use crate::fusion::{DepthFrame, Intrinsics};

/// Meters per raw depth unit in the common RGB-D corpus convention.
pub const DEFAULT_DEPTH_SCALE: f64 = 1.0 / 5000.0;

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("depth scale must be positive, got {scale}")))
    }
}

/// Raw 16-bit samples of a single-channel image, row-major.
pub fn load_depth_raw(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    if !path.exists() {
        return Err(Error::NotFound(path.to_path_buf()));
    }
    let img = image::ImageReader::open(path)?.with_guessed_format()?.decode()?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let channels = img.color().channel_count() as usize;
    if channels != 1 {
        return Err(Error::ChannelCount { path: path.to_path_buf(), found: channels });
    }
    match img {
        DynamicImage::ImageLuma16(buf) => Ok((w, h, buf.into_raw())),
        other => Err(Error::BitDepth {
            path: path.to_path_buf(),
            found: format!("{} bits per sample", other.color().bits_per_pixel() / channels as u16),
        }),
    }
}

/// Loads a depth frame with identity pose. Raw zero is missing depth.
pub fn load_depth_image(path: &Path, scale: f64, intrinsics: Intrinsics) -> Result<DepthFrame> {
    check_scale(scale)?;
    let (w, h, raw) = load_depth_raw(path)?;
    let depth = raw.iter().map(|&r| (r as f64 * scale) as f32).collect();
    DepthFrame::new(w, h, depth, intrinsics, Isometry3::identity())
}

/// Converts meters to raw units. Missing depth, and depth beyond the 16-bit range, become 0.
pub fn depth_to_raw(frame: &DepthFrame, scale: f64) -> Result<Vec<u16>> {
    check_scale(scale)?;
    let mut clipped = 0usize;
    let raw = frame
        .depth
        .iter()
        .map(|&d| {
            if !(d.is_finite() && d > 0.0) {
                return 0;
            }
            let r = (d as f64 / scale).round();
            if r > u16::MAX as f64 {
                clipped += 1;
                0
            } else {
                r as u16
            }
        })
        .collect();
    if clipped > 0 {
        log::warn!("{clipped} depth samples beyond {:.3} m stored as missing", u16::MAX as f64 * scale);
    }
    Ok(raw)
}

/// Writes a 16-bit depth image; the format follows the extension (`.png` or `.pgm`).
pub fn save_depth_image(path: &Path, frame: &DepthFrame, scale: f64) -> Result<()> {
    let raw = depth_to_raw(frame, scale)?;
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_raw(frame.width as u32, frame.height as u32, raw)
        .ok_or_else(|| Error::Input("depth buffer does not match its dimensions".into()))?;
    buf.save(path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(depth: Vec<f32>) -> DepthFrame {
        DepthFrame::new(depth.len(), 1, depth, Intrinsics::new(100.0, 0.5, 0.5), Isometry3::identity()).unwrap()
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["d.png", "d.pgm"] {
            let path = dir.path().join(name);
            save_depth_image(&path, &frame(vec![1.0, 0.0, 0.5, 13.1]), DEFAULT_DEPTH_SCALE).unwrap();
            let (_, _, raw) = load_depth_raw(&path).unwrap();
            assert_eq!(raw, vec![5000, 0, 2500, 65500]);
            let back = load_depth_image(&path, DEFAULT_DEPTH_SCALE, Intrinsics::new(100.0, 0.5, 0.5)).unwrap();
            assert_eq!(back.depth[0], 1.0);
            assert_eq!(back.depth[1], 0.0);
        }
    }

    #[test]
    fn eight_bit_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d8.png");
        ImageBuffer::<Luma<u8>, _>::from_raw(2, 1, vec![1u8, 2]).unwrap().save(&path).unwrap();
        assert!(matches!(load_depth_raw(&path), Err(Error::BitDepth { .. })));
    }

    #[test]
    fn multichannel_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.png");
        ImageBuffer::<image::Rgb<u16>, _>::from_raw(1, 1, vec![1u16, 2, 3]).unwrap().save(&path).unwrap();
        assert!(matches!(load_depth_raw(&path), Err(Error::ChannelCount { found: 3, .. })));
    }

    #[test]
    fn out_of_range_rejected() {
        assert_eq!(depth_to_raw(&frame(vec![20.0, 1.0]), DEFAULT_DEPTH_SCALE).unwrap(), vec![0, 5000]);
        assert!(depth_to_raw(&frame(vec![1.0]), 0.0).is_err());
        assert!(matches!(load_depth_raw(Path::new("/nonexistent/x.png")), Err(Error::NotFound(_))));
    }
}
