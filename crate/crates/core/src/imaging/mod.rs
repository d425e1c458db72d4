//! Frames, grayscale conversion, Gaussian smoothing, and Canny edge maps.

pub mod pnm;

use thiserror::Error;

/// Luminance weights for RGB to gray conversion (ITU-R BT.601 primaries).
/// Single source of truth: conversion code and tests both read this constant.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("frame data length {got} does not match {width}x{height}x{channels}")]
    DataLength {
        width: usize,
        height: usize,
        channels: usize,
        got: usize,
    },
    #[error("unsupported channel count {0}, expected 1 or 3")]
    UnsupportedChannels(usize),
    #[error("operation requires a {expected}-channel frame, got {got}")]
    ChannelMismatch { expected: usize, got: usize },
    #[error("frame {width}x{height} is smaller than the 3x3 kernel support")]
    FrameTooSmall { width: usize, height: usize },
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("thresholds must satisfy 0 <= low < high, got low {low} high {high}")]
    InvalidThresholds { low: f64, high: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed image file: {0}")]
    Malformed(String),
}

/// Row-major raster with interleaved channels; 1 channel (gray) or 3 (RGB).
/// All samples are in `[0, 255]` by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<u8>,
    ) -> Result<Self, ImagingError> {
        if channels != 1 && channels != 3 {
            return Err(ImagingError::UnsupportedChannels(channels));
        }
        if data.len() != width * height * channels {
            return Err(ImagingError::DataLength {
                width,
                height,
                channels,
                got: data.len(),
            });
        }
        Ok(Frame {
            width,
            height,
            channels,
            data,
        })
    }

    /// Uniform frame of the given intensity (applied to every channel).
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Self {
        Frame::new(width, height, channels, vec![value; width * height * channels])
            .expect("filled frame dimensions are consistent")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    pub fn sample(&self, row: usize, col: usize, channel: usize) -> u8 {
        self.data[(row * self.width + col) * self.channels + channel]
    }

    #[inline]
    pub fn set_sample(&mut self, row: usize, col: usize, channel: usize, value: u8) {
        self.data[(row * self.width + col) * self.channels + channel] = value;
    }

    /// Gray value at a pixel; panics unless the frame has one channel.
    #[inline]
    pub fn gray(&self, row: usize, col: usize) -> u8 {
        debug_assert_eq!(self.channels, 1);
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set_gray(&mut self, row: usize, col: usize, value: u8) {
        debug_assert_eq!(self.channels, 1);
        self.data[row * self.width + col] = value;
    }
}

/// Binary edge raster; `1` marks an edge pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl EdgeMap {
    pub fn empty(width: usize, height: usize) -> Self {
        EdgeMap {
            width,
            height,
            bits: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn is_edge(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col] != 0
    }

    #[inline]
    pub fn set_edge(&mut self, row: usize, col: usize, on: bool) {
        self.bits[row * self.width + col] = u8::from(on);
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    /// Edge pixels as `(row, col)` in row-major order.
    pub fn edge_pixels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for row in 0..self.height {
            for col in 0..self.width {
                if self.is_edge(row, col) {
                    out.push((row, col));
                }
            }
        }
        out
    }

    /// Renders the map as a gray frame with edges at 255.
    pub fn to_frame(&self) -> Frame {
        let data = self.bits.iter().map(|&b| if b != 0 { 255 } else { 0 }).collect();
        Frame::new(self.width, self.height, 1, data).expect("edge map dimensions are consistent")
    }
}

/// Canny stage thresholds and smoothing width.
///
/// Thresholds apply to the Sobel gradient magnitude of the smoothed frame
/// (unnormalized 3x3 Sobel, so a full-contrast step yields magnitudes well
/// above 255). `low < high`; pixels at or above `high` seed hysteresis,
/// pixels at or above `low` extend it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CannyParams {
    pub low_threshold: f64,
    pub high_threshold: f64,
    pub sigma: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        CannyParams {
            low_threshold: 50.0,
            high_threshold: 150.0,
            sigma: 1.4,
        }
    }
}

impl CannyParams {
    pub fn validate(&self) -> Result<(), ImagingError> {
        if !(self.sigma > 0.0) {
            return Err(ImagingError::InvalidSigma(self.sigma));
        }
        if !(self.low_threshold >= 0.0 && self.low_threshold < self.high_threshold) {
            return Err(ImagingError::InvalidThresholds {
                low: self.low_threshold,
                high: self.high_threshold,
            });
        }
        Ok(())
    }
}

/// Collapses RGB to gray with [`LUMA_WEIGHTS`]; a gray input is returned
/// unchanged.
pub fn to_grayscale(frame: &Frame) -> Frame {
    if frame.channels == 1 {
        return frame.clone();
    }
    let mut data = Vec::with_capacity(frame.width * frame.height);
    for px in frame.data.chunks_exact(3) {
        let y = LUMA_WEIGHTS[0] * f64::from(px[0])
            + LUMA_WEIGHTS[1] * f64::from(px[1])
            + LUMA_WEIGHTS[2] * f64::from(px[2]);
        data.push(y.round().clamp(0.0, 255.0) as u8);
    }
    Frame::new(frame.width, frame.height, 1, data).expect("grayscale preserves dimensions")
}

/// Discrete Gaussian taps for the given sigma; radius `max(1, ceil(3 sigma))`,
/// normalized to sum 1.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

#[inline]
fn clamp_index(i: i64, len: usize) -> usize {
    i.clamp(0, len as i64 - 1) as usize
}

/// Separable Gaussian convolution with replicate padding, in f64.
fn smooth_f64(frame: &Frame, sigma: f64) -> Vec<f64> {
    let (w, h) = (frame.width, frame.height);
    let taps = gaussian_kernel(sigma);
    let radius = (taps.len() / 2) as i64;

    let mut horizontal = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (t, tap) in taps.iter().enumerate() {
                let src = clamp_index(col as i64 + t as i64 - radius, w);
                acc += tap * f64::from(frame.gray(row, src));
            }
            horizontal[row * w + col] = acc;
        }
    }

    let mut out = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (t, tap) in taps.iter().enumerate() {
                let src = clamp_index(row as i64 + t as i64 - radius, h);
                acc += tap * horizontal[src * w + col];
            }
            out[row * w + col] = acc;
        }
    }
    out
}

/// Gaussian blur of a gray frame. Output samples stay in `[0, 255]`; a
/// constant frame maps to itself exactly.
pub fn gaussian_smooth(frame: &Frame, sigma: f64) -> Result<Frame, ImagingError> {
    if frame.channels != 1 {
        return Err(ImagingError::ChannelMismatch {
            expected: 1,
            got: frame.channels,
        });
    }
    if !(sigma > 0.0) {
        return Err(ImagingError::InvalidSigma(sigma));
    }
    let smoothed = smooth_f64(frame, sigma);
    let data = smoothed
        .iter()
        .map(|&v| v.round().clamp(0.0, 255.0) as u8)
        .collect();
    Frame::new(frame.width, frame.height, 1, data).map_err(Into::into)
}

/// 3x3 Sobel gradients with replicate padding: `(gx, gy)` per pixel, where
/// `gx` responds to horizontal (column-wise) intensity change and `gy` to
/// vertical. Unnormalized kernel, weights `(1, 2, 1)`.
fn sobel_gradients(values: &[f64], width: usize, height: usize) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0; width * height];
    let mut gy = vec![0.0; width * height];
    let at = |r: i64, c: i64| -> f64 {
        values[clamp_index(r, height) * width + clamp_index(c, width)]
    };
    for row in 0..height as i64 {
        for col in 0..width as i64 {
            let tl = at(row - 1, col - 1);
            let tc = at(row - 1, col);
            let tr = at(row - 1, col + 1);
            let ml = at(row, col - 1);
            let mr = at(row, col + 1);
            let bl = at(row + 1, col - 1);
            let bc = at(row + 1, col);
            let br = at(row + 1, col + 1);
            let idx = row as usize * width + col as usize;
            gx[idx] = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            gy[idx] = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
        }
    }
    (gx, gy)
}

/// Non-maximum suppression: keeps a pixel's magnitude only if it is at least
/// as large as both neighbors along the quantized gradient direction
/// (sectors at 0, 45, 90, 135 degrees with 22.5 degree boundaries).
/// The outermost ring is always suppressed.
fn non_maximum_suppression(
    magnitude: &[f64],
    gx: &[f64],
    gy: &[f64],
    width: usize,
    height: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; width * height];
    for row in 1..height - 1 {
        for col in 1..width - 1 {
            let idx = row * width + col;
            let mag = magnitude[idx];
            if mag == 0.0 {
                continue;
            }
            let mut angle = gy[idx].atan2(gx[idx]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            } else if angle >= 180.0 {
                angle -= 180.0;
            }
            let (n1, n2) = if !(22.5..157.5).contains(&angle) {
                (magnitude[idx - 1], magnitude[idx + 1])
            } else if angle < 67.5 {
                (magnitude[idx + width + 1], magnitude[idx - width - 1])
            } else if angle < 112.5 {
                (magnitude[idx - width], magnitude[idx + width])
            } else {
                (magnitude[idx - width + 1], magnitude[idx + width - 1])
            };
            if mag >= n1 && mag >= n2 {
                out[idx] = mag;
            }
        }
    }
    out
}

/// Double-threshold hysteresis over the suppressed magnitude map: pixels at
/// or above the high threshold seed an 8-connected flood through pixels at
/// or above the low threshold. The outermost ring never becomes an edge.
fn hysteresis(
    suppressed: &[f64],
    width: usize,
    height: usize,
    low: f64,
    high: f64,
) -> EdgeMap {
    let mut edges = EdgeMap::empty(width, height);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for row in 1..height - 1 {
        for col in 1..width - 1 {
            if suppressed[row * width + col] < high || edges.is_edge(row, col) {
                continue;
            }
            stack.push((row, col));
            edges.set_edge(row, col, true);
            while let Some((r, c)) = stack.pop() {
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let nr = r as i64 + dr;
                        let nc = c as i64 + dc;
                        if nr < 1 || nc < 1 || nr >= height as i64 - 1 || nc >= width as i64 - 1 {
                            continue;
                        }
                        let (nr, nc) = (nr as usize, nc as usize);
                        if !edges.is_edge(nr, nc) && suppressed[nr * width + nc] >= low {
                            edges.set_edge(nr, nc, true);
                            stack.push((nr, nc));
                        }
                    }
                }
            }
        }
    }
    edges
}

/// Full Canny pipeline on a gray frame: Gaussian smoothing, Sobel gradients,
/// non-maximum suppression, and hysteresis thresholding.
pub fn canny_edges(frame: &Frame, params: &CannyParams) -> Result<EdgeMap, ImagingError> {
    params.validate()?;
    if frame.channels != 1 {
        return Err(ImagingError::ChannelMismatch {
            expected: 1,
            got: frame.channels,
        });
    }
    if frame.width < 3 || frame.height < 3 {
        return Err(ImagingError::FrameTooSmall {
            width: frame.width,
            height: frame.height,
        });
    }
    let (w, h) = (frame.width, frame.height);
    let smoothed = smooth_f64(frame, params.sigma);
    let (gx, gy) = sobel_gradients(&smoothed, w, h);
    let magnitude: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let suppressed = non_maximum_suppression(&magnitude, &gx, &gy, w, h);
    Ok(hysteresis(
        &suppressed,
        w,
        h,
        params.low_threshold,
        params.high_threshold,
    ))
}

/// Smoothed Sobel gradient magnitude (the quantity the Canny thresholds see).
/// Exposed for diagnostics and threshold calibration.
pub fn gradient_magnitude(frame: &Frame, sigma: f64) -> Result<Vec<f64>, ImagingError> {
    if frame.channels != 1 {
        return Err(ImagingError::ChannelMismatch {
            expected: 1,
            got: frame.channels,
        });
    }
    if !(sigma > 0.0) {
        return Err(ImagingError::InvalidSigma(sigma));
    }
    let smoothed = smooth_f64(frame, sigma);
    let (gx, gy) = sobel_gradients(&smoothed, frame.width, frame.height);
    Ok(gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect())
}
