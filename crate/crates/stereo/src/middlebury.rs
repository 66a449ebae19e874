//! Middlebury-style directory layouts.
//!
//! | layout | left | right | ground truth | default scale |
//! |---|---|---|---|---|
//! | 2014 | `im0.png` | `im1.png` | `disp0.pfm` or `disp0GT.pfm` | 1 (float) |
//! | 2005/2006 | `view1.png` | `view5.png` | `disp1.png` | 1 |
//! | 2003 | `im2.{png,ppm,pgm}` | `im6.{png,ppm,pgm}` | `disp2.{png,pgm}` | 4 |
//!
//! Ground truth is optional in every layout. Integer ground truth is divided
//! by the scale and zero marks unknown pixels.

use std::path::{Path, PathBuf};

use crate::image::{load_disparity, load_image, ImagePair};
use crate::StereoError;

struct Layout {
    left: &'static [&'static str],
    right: &'static [&'static str],
    truth: &'static [&'static str],
    scale: f64,
}

const LAYOUTS: [Layout; 3] = [
    Layout {
        left: &["im0.png", "im0.pgm"],
        right: &["im1.png", "im1.pgm"],
        truth: &["disp0.pfm", "disp0GT.pfm"],
        scale: 1.0,
    },
    Layout {
        left: &["view1.png", "view1.pgm"],
        right: &["view5.png", "view5.pgm"],
        truth: &["disp1.png", "disp1.pgm"],
        scale: 1.0,
    },
    Layout {
        left: &["im2.png", "im2.ppm", "im2.pgm"],
        right: &["im6.png", "im6.ppm", "im6.pgm"],
        truth: &["disp2.png", "disp2.pgm"],
        scale: 4.0,
    },
];

fn first_existing(dir: &Path, names: &[&str]) -> Option<PathBuf> {
    names.iter().map(|n| dir.join(n)).find(|p| p.is_file())
}

/// Loads the first layout whose left and right images exist in `dir`.
/// `gt_scale` overrides the layout's integer ground-truth scale.
pub fn load_middlebury(dir: impl AsRef<Path>, gt_scale: Option<f64>) -> Result<ImagePair, StereoError> {
    let dir = dir.as_ref();
    for layout in &LAYOUTS {
        let (Some(left), Some(right)) = (first_existing(dir, layout.left), first_existing(dir, layout.right)) else {
            continue;
        };
        let truth = first_existing(dir, layout.truth)
            .map(|p| load_disparity(p, gt_scale.unwrap_or(layout.scale)))
            .transpose()?;
        return ImagePair::new(load_image(left)?, load_image(right)?, truth);
    }
    Err(StereoError::Layout(dir.to_path_buf()))
}

/// True if `dir` holds a recognised pair.
pub fn has_middlebury_layout(dir: impl AsRef<Path>) -> bool {
    let dir = dir.as_ref();
    LAYOUTS
        .iter()
        .any(|l| first_existing(dir, l.left).is_some() && first_existing(dir, l.right).is_some())
}
