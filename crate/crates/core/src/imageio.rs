//! Raster loading, cropping, resizing and serialization of square gray grids.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A `2^n × 2^n` gray image with values in `[0, 1]`, stored row-major
/// (row index `b` is the y coordinate, column index `a` the x coordinate).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridJson", into = "GridJson")]
pub struct ImageGrid {
    n: usize,
    pixels: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    n: usize,
    pixels: Vec<f64>,
}

impl TryFrom<GridJson> for ImageGrid {
    type Error = Error;
    fn try_from(g: GridJson) -> Result<Self> {
        ImageGrid::new(g.n, g.pixels)
    }
}

impl From<ImageGrid> for GridJson {
    fn from(g: ImageGrid) -> Self {
        GridJson { n: g.n, pixels: g.pixels }
    }
}

impl ImageGrid {
    pub fn new(n: usize, pixels: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 15 {
            return invalid(format!("grid exponent n={n} outside 1..=15"));
        }
        let side = 1usize << n;
        if pixels.len() != side * side {
            return Err(Error::Dimension(format!("{} pixels for a {side}×{side} grid", pixels.len())));
        }
        if let Some(x) = pixels.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return invalid(format!("pixel value {x} outside [0, 1]"));
        }
        Ok(ImageGrid { n, pixels })
    }

    /// Builds a grid from `f(a, b)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let side = 1usize << n.min(15);
        let pixels = (0..side * side).map(|i| f(i % side, i / side)).collect();
        Self::new(n, pixels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Pixel at column `a`, row `b`.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.pixels[b * self.side() + a]
    }

    /// Keeps every `2^levels`-th row and column.
    pub fn downsample(&self, levels: usize) -> Result<Self> {
        if levels >= self.n {
            return invalid(format!("cannot downsample n={} by {levels} levels", self.n));
        }
        let step = 1 << levels;
        Self::from_fn(self.n - levels, |a, b| self.get(a * step, b * step))
    }

    /// Central `2^n_out` square.
    pub fn crop_center(&self, n_out: usize) -> Result<Self> {
        if n_out > self.n || n_out == 0 {
            return invalid(format!("cannot crop n={} to n_out={n_out}", self.n));
        }
        let off = (self.side() - (1 << n_out)) / 2;
        Self::from_fn(n_out, |a, b| self.get(a + off, b + off))
    }

    /// Binary PGM (P5, maxval 255), values rounded to the nearest level.
    pub fn to_pgm(&self) -> Vec<u8> {
        let side = self.side();
        let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
        out.extend(self.pixels.iter().map(|x| (x * 255.0).round() as u8));
        out
    }
}

/// A decoded gray raster of arbitrary shape with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayRaster {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl GrayRaster {
    fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// Decodes a binary PGM (P5) file. Samples are scaled by `1/maxval`.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayRaster> {
    let mut pos = 0;
    if bytes.get(..2) != Some(b"P5") {
        return Err(Error::Decode("missing P5 magic".into()));
    }
    pos += 2;
    let mut header = [0usize; 3];
    for field in header.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Decode("truncated header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|c| c.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos || pos - start > 9 {
            return Err(Error::Decode("malformed header field".into()));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text.parse().map_err(|_| Error::Decode("malformed header field".into()))?;
    }
    let [width, height, maxval] = header;
    if !bytes.get(pos).is_some_and(|c| c.is_ascii_whitespace()) {
        return Err(Error::Decode("missing separator after maxval".into()));
    }
    pos += 1;
    if width == 0 || height == 0 {
        return Err(Error::Decode("zero-size image".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Decode(format!("maxval {maxval} outside 1..=65535")));
    }
    let bps = if maxval < 256 { 1 } else { 2 };
    let count = width
        .checked_mul(height)
        .filter(|c| c.checked_mul(bps).is_some_and(|b| b <= bytes.len() - pos))
        .ok_or_else(|| Error::Decode("truncated raster".into()))?;
    let raster = &bytes[pos..pos + count * bps];
    let values = if bps == 1 {
        raster.iter().map(|&v| (v as f64 / maxval as f64).min(1.0)).collect()
    } else {
        raster.chunks_exact(2).map(|c| (u16::from_be_bytes([c[0], c[1]]) as f64 / maxval as f64).min(1.0)).collect()
    };
    Ok(GrayRaster { width, height, values })
}

/// Decodes PNG or binary PGM bytes into a gray raster. Color channels are
/// averaged without weights; alpha is ignored.
pub fn decode_raster(bytes: &[u8]) -> Result<GrayRaster> {
    if bytes.starts_with(b"P5") {
        return decode_pgm(bytes);
    }
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Decode(e.to_string()))?;
    let rgb = img.to_rgb32f();
    let (width, height) = (rgb.width() as usize, rgb.height() as usize);
    if width == 0 || height == 0 {
        return Err(Error::Decode("zero-size image".into()));
    }
    let values = rgb.pixels().map(|p| (p.0.iter().map(|&c| c as f64).sum::<f64>() / 3.0).clamp(0.0, 1.0)).collect();
    Ok(GrayRaster { width, height, values })
}

/// Largest centered square crop followed by a bilinear resize to `2^n`.
pub fn grid_from_raster(raster: &GrayRaster, n_target: usize) -> Result<ImageGrid> {
    if n_target == 0 {
        return invalid("n_target must be at least 1");
    }
    let s = raster.width.min(raster.height);
    let (x0, y0) = ((raster.width - s) / 2, (raster.height - s) / 2);
    let out = 1usize << n_target.min(15);
    let scale = s as f64 / out as f64;
    let coord = |i: usize| {
        let c = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (s - 1) as f64);
        let lo = c.floor() as usize;
        (lo, (lo + 1).min(s - 1), c - lo as f64)
    };
    ImageGrid::from_fn(n_target, |a, b| {
        let (xa, xb, tx) = coord(a);
        let (ya, yb, ty) = coord(b);
        let top = (1.0 - tx) * raster.at(x0 + xa, y0 + ya) + tx * raster.at(x0 + xb, y0 + ya);
        let bot = (1.0 - tx) * raster.at(x0 + xa, y0 + yb) + tx * raster.at(x0 + xb, y0 + yb);
        ((1.0 - ty) * top + ty * bot).clamp(0.0, 1.0)
    })
}

/// Loads a PNG or PGM file as a `2^n_target` grid.
pub fn load_grid(path: impl AsRef<Path>, n_target: usize) -> Result<ImageGrid> {
    let bytes = std::fs::read(path)?;
    grid_from_raster(&decode_raster(&bytes)?, n_target)
}
