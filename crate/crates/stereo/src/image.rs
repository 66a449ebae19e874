//! Grayscale rasters, disparity maps and their file formats.
//!
//! PGM (P2/P5) and PNG go through the `image` crate. Colour input is reduced
//! to `round(0.299 R + 0.587 G + 0.114 B)`. PFM is read and written here.

use std::fs;
use std::io::Write;
use std::path::Path;

use ::image::{DynamicImage, ImageReader};

use crate::StereoError;

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, StereoError> {
        if pixels.len() != width * height {
            return Err(StereoError::DimensionMismatch {
                what: "pixel buffer",
                expected: (width * height, 1),
                got: (pixels.len(), 1),
            });
        }
        Ok(Raster { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Raster {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(height, width)`
    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, u: usize, v: usize) -> u8 {
        self.pixels[v * self.width + u]
    }

    pub fn set(&mut self, u: usize, v: usize, value: u8) {
        self.pixels[v * self.width + u] = value;
    }

    /// Sample with coordinates clamped to the border.
    pub fn clamped(&self, u: i64, v: i64) -> f64 {
        let u = u.clamp(0, self.width as i64 - 1) as usize;
        let v = v.clamp(0, self.height as i64 - 1) as usize;
        self.get(u, v) as f64
    }

    /// Linear interpolation along the row, border-clamped.
    pub fn sample_row(&self, u: f64, v: i64) -> f64 {
        let u0 = u.floor();
        let frac = u - u0;
        let a = self.clamped(u0 as i64, v);
        if frac == 0.0 {
            return a;
        }
        let b = self.clamped(u0 as i64 + 1, v);
        (1.0 - frac) * a + frac * b
    }

    pub fn crop(&self, u0: usize, v0: usize, width: usize, height: usize) -> Result<Raster, StereoError> {
        check_window(self.shape(), u0, v0, width, height)?;
        let mut pixels = Vec::with_capacity(width * height);
        for v in v0..v0 + height {
            pixels.extend_from_slice(&self.pixels[v * self.width + u0..v * self.width + u0 + width]);
        }
        Ok(Raster { width, height, pixels })
    }

    /// Box-filter downsampling by an integer factor; partial blocks at the
    /// right and bottom are dropped.
    pub fn downsample(&self, factor: usize) -> Raster {
        if factor <= 1 {
            return self.clone();
        }
        let (w, h) = (self.width / factor, self.height / factor);
        let mut pixels = Vec::with_capacity(w * h);
        let area = (factor * factor) as f64;
        for v in 0..h {
            for u in 0..w {
                let mut sum = 0.0;
                for dv in 0..factor {
                    for du in 0..factor {
                        sum += self.get(u * factor + du, v * factor + dv) as f64;
                    }
                }
                pixels.push((sum / area).round() as u8);
            }
        }
        Raster {
            width: w,
            height: h,
            pixels,
        }
    }
}

/// Real-valued disparity raster; NaN marks unknown pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DisparityMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, StereoError> {
        if values.len() != width * height {
            return Err(StereoError::DimensionMismatch {
                what: "disparity buffer",
                expected: (width * height, 1),
                got: (values.len(), 1),
            });
        }
        Ok(DisparityMap { width, height, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[v * self.width + u]
    }

    pub fn max_known(&self) -> Option<f64> {
        self.values.iter().copied().filter(|d| d.is_finite()).reduce(f64::max)
    }

    pub fn crop(&self, u0: usize, v0: usize, width: usize, height: usize) -> Result<DisparityMap, StereoError> {
        check_window(self.shape(), u0, v0, width, height)?;
        let mut values = Vec::with_capacity(width * height);
        for v in v0..v0 + height {
            values.extend_from_slice(&self.values[v * self.width + u0..v * self.width + u0 + width]);
        }
        Ok(DisparityMap { width, height, values })
    }

    /// Averages known values over each block and divides by `factor`, since
    /// disparities are measured in pixels of the new resolution.
    pub fn downsample(&self, factor: usize) -> DisparityMap {
        if factor <= 1 {
            return self.clone();
        }
        let (w, h) = (self.width / factor, self.height / factor);
        let mut values = Vec::with_capacity(w * h);
        for v in 0..h {
            for u in 0..w {
                let (mut sum, mut n) = (0.0, 0usize);
                for dv in 0..factor {
                    for du in 0..factor {
                        let d = self.get(u * factor + du, v * factor + dv);
                        if d.is_finite() {
                            sum += d;
                            n += 1;
                        }
                    }
                }
                values.push(if n > 0 {
                    sum / n as f64 / factor as f64
                } else {
                    f64::NAN
                });
            }
        }
        DisparityMap {
            width: w,
            height: h,
            values,
        }
    }
}

fn check_window(shape: (usize, usize), u0: usize, v0: usize, width: usize, height: usize) -> Result<(), StereoError> {
    if width == 0 || height == 0 || u0 + width > shape.1 || v0 + height > shape.0 {
        return Err(StereoError::DimensionMismatch {
            what: "crop window",
            expected: shape,
            got: (v0 + height, u0 + width),
        });
    }
    Ok(())
}

/// Rectified left/right images with optional ground truth for the left view.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePair {
    pub left: Raster,
    pub right: Raster,
    pub ground_truth: Option<DisparityMap>,
}

impl ImagePair {
    pub fn new(left: Raster, right: Raster, ground_truth: Option<DisparityMap>) -> Result<Self, StereoError> {
        if left.shape() != right.shape() {
            return Err(StereoError::DimensionMismatch {
                what: "right image",
                expected: left.shape(),
                got: right.shape(),
            });
        }
        if let Some(gt) = &ground_truth {
            if gt.shape() != left.shape() {
                return Err(StereoError::DimensionMismatch {
                    what: "ground truth",
                    expected: left.shape(),
                    got: gt.shape(),
                });
            }
        }
        Ok(ImagePair {
            left,
            right,
            ground_truth,
        })
    }

    pub fn width(&self) -> usize {
        self.left.width()
    }

    pub fn height(&self) -> usize {
        self.left.height()
    }

    pub fn crop(&self, u0: usize, v0: usize, width: usize, height: usize) -> Result<ImagePair, StereoError> {
        ImagePair::new(
            self.left.crop(u0, v0, width, height)?,
            self.right.crop(u0, v0, width, height)?,
            self.ground_truth
                .as_ref()
                .map(|g| g.crop(u0, v0, width, height))
                .transpose()?,
        )
    }

    pub fn downsample(&self, factor: usize) -> ImagePair {
        ImagePair {
            left: self.left.downsample(factor),
            right: self.right.downsample(factor),
            ground_truth: self.ground_truth.as_ref().map(|g| g.downsample(factor)),
        }
    }

    /// Downsamples by the largest integer factor that keeps at least
    /// `height × width` pixels, then takes the centred window of that size.
    /// Pairs already smaller are returned unchanged.
    pub fn fit_within(&self, height: usize, width: usize) -> Result<ImagePair, StereoError> {
        if self.height() <= height && self.width() <= width {
            return Ok(self.clone());
        }
        let factor = (self.height() / height).min(self.width() / width).max(1);
        let small = self.downsample(factor);
        let (h, w) = (height.min(small.height()), width.min(small.width()));
        small.crop((small.width() - w) / 2, (small.height() - h) / 2, w, h)
    }
}

fn decode_err(path: &Path, e: impl std::fmt::Display) -> StereoError {
    StereoError::Decode {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

fn open_dynamic(path: &Path) -> Result<DynamicImage, StereoError> {
    let reader = ImageReader::open(path)
        .map_err(|source| StereoError::Io {
            path: path.to_path_buf(),
            source,
        })?
        .with_guessed_format()
        .map_err(|e| decode_err(path, e))?;
    reader.decode().map_err(|e| decode_err(path, e))
}

fn luminance(img: &DynamicImage) -> Vec<u8> {
    match img {
        DynamicImage::ImageLuma8(g) => g.as_raw().clone(),
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA8(_) | DynamicImage::ImageLumaA16(_) => {
            img.to_luma8().into_raw()
        }
        _ => img
            .to_rgb8()
            .pixels()
            .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64).round() as u8)
            .collect(),
    }
}

/// Reads a PGM or PNG file as 8-bit grayscale.
pub fn load_image(path: impl AsRef<Path>) -> Result<Raster, StereoError> {
    let path = path.as_ref();
    let img = open_dynamic(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    Raster::new(w, h, luminance(&img))
}

pub fn load_pair(left: impl AsRef<Path>, right: impl AsRef<Path>) -> Result<ImagePair, StereoError> {
    ImagePair::new(load_image(left)?, load_image(right)?, None)
}

/// Reads ground-truth disparities.
///
/// PFM values are taken as-is with infinities marking unknown pixels. For PGM
/// and PNG the stored integer is divided by `scale` and zero means unknown.
pub fn load_disparity(path: impl AsRef<Path>, scale: f64) -> Result<DisparityMap, StereoError> {
    let path = path.as_ref();
    let is_pfm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pfm"));
    if is_pfm {
        return read_pfm(path);
    }
    let img = open_dynamic(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let raw: Vec<f64> = match img {
        DynamicImage::ImageLuma16(g) => g.into_raw().into_iter().map(f64::from).collect(),
        other => luminance(&other).into_iter().map(f64::from).collect(),
    };
    let values = raw
        .into_iter()
        .map(|d| if d == 0.0 { f64::NAN } else { d / scale })
        .collect();
    DisparityMap::new(w, h, values)
}

/// Single-channel PFM. Colour PFM files keep the first channel.
pub fn read_pfm(path: impl AsRef<Path>) -> Result<DisparityMap, StereoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| StereoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(decode_err(path, "truncated PFM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    // exactly one whitespace byte separates the header from the data
    pos += 1;
    let channels = match fields[0].as_str() {
        "Pf" => 1,
        "PF" => 3,
        other => return Err(decode_err(path, format!("bad PFM magic {other:?}"))),
    };
    let parse = |s: &str| s.parse::<usize>().map_err(|e| decode_err(path, e));
    let (w, h) = (parse(&fields[1])?, parse(&fields[2])?);
    let scale: f64 = fields[3].parse().map_err(|e| decode_err(path, e))?;
    let little = scale < 0.0;
    let need = w * h * channels * 4;
    if bytes.len() < pos + need {
        return Err(decode_err(
            path,
            format!("expected {need} data bytes, found {}", bytes.len().saturating_sub(pos)),
        ));
    }
    let mut values = vec![0.0; w * h];
    for row in 0..h {
        // rows are stored bottom to top
        let v = h - 1 - row;
        for u in 0..w {
            let at = pos + ((row * w + u) * channels) * 4;
            let b = [bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]];
            let x = if little {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            } as f64;
            values[v * w + u] = if x.is_finite() { x } else { f64::NAN };
        }
    }
    DisparityMap::new(w, h, values)
}

/// Little-endian single-channel PFM; unknown pixels become +inf.
pub fn write_pfm(map: &DisparityMap, path: impl AsRef<Path>) -> Result<(), StereoError> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", map.width, map.height).into_bytes();
    for v in (0..map.height).rev() {
        for u in 0..map.width {
            let d = map.get(u, v);
            let x = if d.is_finite() { d as f32 } else { f32::INFINITY };
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    write_atomic(path.as_ref(), &out)
}

/// Binary PGM (P5) encoding.
pub fn pgm_bytes(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend_from_slice(&raster.pixels);
    out
}

pub fn write_pgm(raster: &Raster, path: impl AsRef<Path>) -> Result<(), StereoError> {
    write_atomic(path.as_ref(), &pgm_bytes(raster))
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StereoError> {
    let io = |source| StereoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luminance_of_red_is_76() {
        let img = DynamicImage::ImageRgb8(::image::RgbImage::from_raw(1, 1, vec![255, 0, 0]).unwrap());
        assert_eq!(luminance(&img), vec![76]);
        let img = DynamicImage::ImageRgb8(::image::RgbImage::from_raw(1, 1, vec![10, 200, 30]).unwrap());
        let want = (0.299f64 * 10.0 + 0.587 * 200.0 + 0.114 * 30.0).round() as u8;
        assert_eq!(luminance(&img), vec![want]);
    }

    #[test]
    fn crop_and_downsample() {
        let r = Raster::new(4, 2, vec![0, 2, 4, 6, 10, 12, 14, 16]).unwrap();
        assert_eq!(r.crop(1, 0, 2, 2).unwrap().pixels(), &[2, 4, 12, 14]);
        assert_eq!(r.downsample(2).pixels(), &[6, 10]);
        assert!(r.crop(3, 0, 2, 1).is_err());
        let d = DisparityMap::new(2, 2, vec![4.0, f64::NAN, 8.0, 6.0]).unwrap();
        assert_eq!(d.downsample(2).values(), &[3.0]);
    }

    #[test]
    fn interpolated_sampling() {
        let r = Raster::new(3, 1, vec![0, 10, 30]).unwrap();
        assert_eq!(r.sample_row(0.5, 0), 5.0);
        assert_eq!(r.sample_row(1.25, 0), 15.0);
        assert_eq!(r.sample_row(-4.0, 0), 0.0);
        assert_eq!(r.sample_row(7.5, 0), 30.0);
    }

    #[test]
    fn fit_within_keeps_centre() {
        let r = Raster::new(8, 4, (0..32).collect()).unwrap();
        let pair = ImagePair::new(r.clone(), r, None).unwrap();
        let f = pair.fit_within(2, 3).unwrap();
        assert_eq!(f.left.shape(), (2, 3));
        // factor 2 gives a 2×4 image, centred 3-wide window starts at column 0
        assert_eq!(f.left, pair.left.downsample(2).crop(0, 0, 3, 2).unwrap());
    }
}
