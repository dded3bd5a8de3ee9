//! Image containers and the RGB to HSI decomposition.
//!
//! Everything downstream consumes [`Plane`]s: 2D scalar fields holding one of
//! the hue, saturation or intensity channels. Channels are normalized reals
//! in `[0, 1]`; 8-bit rasters divide by 255 on load.

use thiserror::Error;

/// Errors from constructing image containers with inconsistent data.
#[derive(Debug, Error)]
pub enum RasterError {
    #[error("dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("buffer holds {got} values, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("channel value {value} outside [0, 1]")]
    ValueOutOfRange { value: f64 },
}

/// An RGB image with channels as reals in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl RgbImage {
    /// Builds an image from row-major pixels, validating dimensions and the
    /// `[0, 1]` channel range.
    pub fn new(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        if pixels.len() != width * height {
            return Err(RasterError::LengthMismatch {
                expected: width * height,
                got: pixels.len(),
            });
        }
        for px in &pixels {
            for &c in px {
                if !(0.0..=1.0).contains(&c) {
                    return Err(RasterError::ValueOutOfRange { value: c });
                }
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    ///
    /// Panics if the dimensions are zero or `f` produces a channel outside
    /// `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [f64; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels).expect("from_fn produced an invalid image")
    }

    /// Decodes packed 8-bit RGB bytes, mapping each channel to `v / 255`.
    pub fn from_rgb8(width: usize, height: usize, data: &[u8]) -> Result<Self, RasterError> {
        if data.len() != width * height * 3 {
            return Err(RasterError::LengthMismatch {
                expected: width * height * 3,
                got: data.len(),
            });
        }
        let pixels = data
            .chunks_exact(3)
            .map(|c| {
                [
                    f64::from(c[0]) / 255.0,
                    f64::from(c[1]) / 255.0,
                    f64::from(c[2]) / 255.0,
                ]
            })
            .collect();
        Self::new(width, height, pixels)
    }

    /// Packs the image into 8-bit RGB bytes, rounding each channel.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() * 3);
        for px in &self.pixels {
            for &c in px {
                out.push((c * 255.0).round() as u8);
            }
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    /// Copies the `w x h` window with top-left corner `(x0, y0)`.
    ///
    /// Panics if the window does not fit; callers validate bounds.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> RgbImage {
        assert!(x0 + w <= self.width && y0 + h <= self.height);
        let mut pixels = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            let row = &self.pixels[y * self.width + x0..y * self.width + x0 + w];
            pixels.extend_from_slice(row);
        }
        RgbImage {
            width: w,
            height: h,
            pixels,
        }
    }
}

/// Which channel a [`Plane`] holds. H, S and I planes keep values in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneKind {
    Hue,
    Saturation,
    Intensity,
    Generic,
}

/// A 2D scalar field, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    kind: PlaneKind,
    values: Vec<f64>,
}

impl Plane {
    pub fn new(
        width: usize,
        height: usize,
        kind: PlaneKind,
        values: Vec<f64>,
    ) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        if values.len() != width * height {
            return Err(RasterError::LengthMismatch {
                expected: width * height,
                got: values.len(),
            });
        }
        if kind != PlaneKind::Generic {
            for &v in &values {
                if !(0.0..=1.0).contains(&v) {
                    return Err(RasterError::ValueOutOfRange { value: v });
                }
            }
        }
        Ok(Self {
            width,
            height,
            kind,
            values,
        })
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel; panics on
    /// invalid output, mirroring [`RgbImage::from_fn`].
    pub fn from_fn(
        width: usize,
        height: usize,
        kind: PlaneKind,
        f: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, kind, values).expect("from_fn produced an invalid plane")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn kind(&self) -> PlaneKind {
        self.kind
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Minimum and maximum value over the plane.
    pub fn min_max(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.values {
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    }

    /// Renders the plane to 8-bit grayscale as `round(v * 255)`; values are
    /// expected to be in `[0, 1]`.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.values
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// The hue, saturation and intensity planes of one image; all three share
/// identical dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct HsiPlanes {
    pub h: Plane,
    pub s: Plane,
    pub i: Plane,
}

impl HsiPlanes {
    pub fn width(&self) -> usize {
        self.h.width()
    }

    pub fn height(&self) -> usize {
        self.h.height()
    }
}

/// Converts one RGB triple to (hue, saturation, intensity), all in `[0, 1]`.
///
/// Triangle model: `I = (R+G+B)/3`, `S = 1 - min(R,G,B)/I` (0 when `I = 0`),
/// and hue from the angle
/// `theta = arccos( ((R-G)+(R-B))/2 / sqrt((R-G)^2 + (R-B)(G-B)) )`
/// as `H = theta/360deg`, mirrored to `1 - theta/360deg` when `B > G`.
/// Gray pixels (`S = 0`) have no defined hue and map to `H = 0`.
pub fn hsi_pixel(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    // Summing in sorted order makes I (and with it S) bit-exactly invariant
    // under channel permutation.
    let mut sorted = [r, g, b];
    sorted.sort_unstable_by(f64::total_cmp);
    let intensity = (sorted[0] + sorted[1] + sorted[2]) / 3.0;
    if r == g && g == b {
        // Exact gray: S must be exactly 0 and hue is undefined.
        return (0.0, 0.0, intensity);
    }
    let min = sorted[0];
    let saturation = if intensity > 0.0 {
        (1.0 - min / intensity).max(0.0)
    } else {
        0.0
    };
    if saturation == 0.0 {
        return (0.0, 0.0, intensity);
    }
    let num = 0.5 * ((r - g) + (r - b));
    let den_sq = (r - g) * (r - g) + (r - b) * (g - b);
    if den_sq <= 0.0 {
        // Subnormal channel differences can underflow the discriminant; hue
        // is then numerically undefined and defaults like the gray case.
        return (0.0, saturation, intensity);
    }
    let theta = (num / den_sq.sqrt()).clamp(-1.0, 1.0).acos();
    let mut hue = theta / std::f64::consts::TAU;
    if b > g {
        hue = 1.0 - hue;
    }
    if hue >= 1.0 {
        hue = 0.0; // hue is circular; fold the closed endpoint onto 0
    }
    (hue, saturation, intensity)
}

/// Decomposes an RGB image into its H, S and I planes.
pub fn rgb_to_hsi(img: &RgbImage) -> HsiPlanes {
    let n = img.width() * img.height();
    let mut h = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut i = Vec::with_capacity(n);
    for px in img.pixels() {
        let (ph, ps, pi) = hsi_pixel(px[0], px[1], px[2]);
        h.push(ph);
        s.push(ps);
        i.push(pi);
    }
    HsiPlanes {
        h: Plane::new(img.width(), img.height(), PlaneKind::Hue, h).expect("hue out of range"),
        s: Plane::new(img.width(), img.height(), PlaneKind::Saturation, s)
            .expect("saturation out of range"),
        i: Plane::new(img.width(), img.height(), PlaneKind::Intensity, i)
            .expect("intensity out of range"),
    }
}
