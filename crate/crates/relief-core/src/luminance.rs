//! PNM ingestion and grayscale luminance conversion.
//!
//! Supports the four classic Netpbm formats: P2/P5 (grayscale, ASCII and
//! binary) and P3/P6 (RGB, ASCII and binary). Comments (`#` to end of
//! line) are allowed anywhere whitespace is legal in the header. Binary
//! rasters with maxval > 255 use big-endian 16-bit samples.
//!
//! Color is reduced to luminance with the Rec.601 weights
//! (0.299, 0.587, 0.114); no gamma correction is applied.

use crate::matrix::Matrix;
use thiserror::Error;

/// Rec.601 luma weights for red and green; blue is the remainder.
const W_RED: f64 = 0.299;
const W_GREEN: f64 = 0.587;

#[derive(Debug, Error)]
pub enum LuminanceError {
    #[error("unsupported magic {found:?} at byte {offset}")]
    UnsupportedMagic { offset: usize, found: String },
    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },
    #[error("maxval {value} at byte {offset} outside 1..=65535")]
    MaxvalOutOfRange { offset: usize, value: u64 },
    #[error("truncated payload at byte {offset}: expected {expected} bytes, found {found}")]
    TruncatedPayload {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("sample {value} at byte {offset} exceeds maxval {maxval}")]
    SampleOutOfRange {
        offset: usize,
        value: u32,
        maxval: u16,
    },
    #[error("empty image")]
    EmptyImage,
}

/// RGB raster with integer samples in `[0, maxval]`, row-major RGB triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Length is `3 * width * height`.
    pub pixels: Vec<u16>,
    pub maxval: u16,
}

/// Grayscale raster with luminance values in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Length is `width * height`.
    pub values: Vec<f64>,
}

impl GrayImage {
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(self.height, self.width, self.values.clone())
    }
}

/// Result of decoding a PNM file: gray for P2/P5, RGB for P3/P6.
#[derive(Debug, Clone)]
pub enum PnmImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl PnmImage {
    /// Reduce to grayscale, converting RGB via [`rgb_to_luminance`].
    pub fn into_gray(self) -> GrayImage {
        match self {
            PnmImage::Gray(g) => g,
            PnmImage::Rgb(rgb) => rgb_to_luminance(&rgb),
        }
    }
}

/// Min, max, and mean of a grayscale image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<u64, LuminanceError> {
        self.skip_ws_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        let mut digits = 0;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            value = value
                .saturating_mul(10)
                .saturating_add((self.bytes[self.pos] - b'0') as u64);
            digits += 1;
            self.pos += 1;
        }
        if digits == 0 {
            return Err(LuminanceError::MalformedHeader {
                offset: start,
                reason: format!("expected {what}"),
            });
        }
        Ok(value)
    }

    /// Consume the single whitespace byte separating the header from a
    /// binary raster.
    fn expect_single_ws(&mut self) -> Result<(), LuminanceError> {
        match self.bytes.get(self.pos) {
            Some(b' ' | b'\t' | b'\r' | b'\n') => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(LuminanceError::MalformedHeader {
                offset: self.pos,
                reason: "expected whitespace before binary raster".into(),
            }),
        }
    }
}

/// Decode a PNM byte stream (P2/P3/P5/P6).
pub fn load_pnm(bytes: &[u8]) -> Result<PnmImage, LuminanceError> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(LuminanceError::UnsupportedMagic {
            offset: 0,
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned(),
        });
    }
    let magic = bytes[1];
    if !matches!(magic, b'2' | b'3' | b'5' | b'6') {
        return Err(LuminanceError::UnsupportedMagic {
            offset: 0,
            found: String::from_utf8_lossy(&bytes[..2]).into_owned(),
        });
    }
    let mut cur = Cursor::new(bytes);
    cur.pos = 2;

    let width = cur.next_uint("width")? as usize;
    let height = cur.next_uint("height")? as usize;
    if width == 0 || height == 0 {
        return Err(LuminanceError::MalformedHeader {
            offset: cur.pos,
            reason: format!("zero dimension {width}x{height}"),
        });
    }
    let maxval_offset = cur.pos;
    let maxval = cur.next_uint("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(LuminanceError::MaxvalOutOfRange {
            offset: maxval_offset,
            value: maxval,
        });
    }
    let maxval = maxval as u16;

    let channels = if matches!(magic, b'3' | b'6') { 3 } else { 1 };
    let sample_count = channels * width * height;

    let samples = match magic {
        b'2' | b'3' => read_ascii_samples(&mut cur, sample_count, maxval)?,
        _ => read_binary_samples(&mut cur, sample_count, maxval)?,
    };

    Ok(match magic {
        b'2' | b'5' => PnmImage::Gray(GrayImage {
            width,
            height,
            values: samples
                .into_iter()
                .map(|s| s as f64 / maxval as f64)
                .collect(),
        }),
        _ => PnmImage::Rgb(RgbImage {
            width,
            height,
            pixels: samples,
            maxval,
        }),
    })
}

fn read_ascii_samples(
    cur: &mut Cursor<'_>,
    count: usize,
    maxval: u16,
) -> Result<Vec<u16>, LuminanceError> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        cur.skip_ws_and_comments();
        if cur.pos >= cur.bytes.len() {
            return Err(LuminanceError::TruncatedPayload {
                offset: cur.pos,
                expected: count,
                found: out.len(),
            });
        }
        let offset = cur.pos;
        let value = cur.next_uint("sample")?;
        if value > maxval as u64 {
            return Err(LuminanceError::SampleOutOfRange {
                offset,
                value: value.min(u32::MAX as u64) as u32,
                maxval,
            });
        }
        out.push(value as u16);
    }
    Ok(out)
}

fn read_binary_samples(
    cur: &mut Cursor<'_>,
    count: usize,
    maxval: u16,
) -> Result<Vec<u16>, LuminanceError> {
    cur.expect_single_ws()?;
    let wide = maxval > 255;
    let bytes_per_sample = if wide { 2 } else { 1 };
    let needed = count * bytes_per_sample;
    let avail = cur.bytes.len() - cur.pos;
    if avail < needed {
        return Err(LuminanceError::TruncatedPayload {
            offset: cur.bytes.len(),
            expected: needed,
            found: avail,
        });
    }
    let raster = &cur.bytes[cur.pos..cur.pos + needed];
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let value = if wide {
            u16::from_be_bytes([raster[2 * i], raster[2 * i + 1]])
        } else {
            raster[i] as u16
        };
        if value > maxval {
            return Err(LuminanceError::SampleOutOfRange {
                offset: cur.pos + i * bytes_per_sample,
                value: value as u32,
                maxval,
            });
        }
        out.push(value);
    }
    Ok(out)
}

/// Convert RGB to luminance with the Rec.601 weights, normalized to `[0, 1]`.
///
/// Evaluated as `b + 0.299 (r - b) + 0.587 (g - b)`, which is algebraically
/// the weighted sum and maps gray input (r = g = b = v) to exactly
/// `v / maxval`.
pub fn rgb_to_luminance(img: &RgbImage) -> GrayImage {
    let maxval = img.maxval as f64;
    let values = img
        .pixels
        .chunks_exact(3)
        .map(|px| {
            let (r, g, b) = (px[0] as f64, px[1] as f64, px[2] as f64);
            let lum = (b + W_RED * (r - b) + W_GREEN * (g - b)) / maxval;
            lum.clamp(0.0, 1.0)
        })
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        values,
    }
}

/// Min/max/mean diagnostics; errors on an empty image.
pub fn stats(img: &GrayImage) -> Result<GrayStats, LuminanceError> {
    if img.values.is_empty() {
        return Err(LuminanceError::EmptyImage);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in &img.values {
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    Ok(GrayStats {
        min,
        max,
        mean: sum / img.values.len() as f64,
    })
}

/// Encode a grayscale image as ASCII PGM (P2), quantizing to `maxval` levels.
pub fn write_pnm_p2(img: &GrayImage, maxval: u16) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n{}\n", img.width, img.height, maxval).into_bytes();
    for row in img.values.chunks(img.width.max(1)) {
        let line: Vec<String> = row
            .iter()
            .map(|v| format!("{}", (v * maxval as f64).round() as u32))
            .collect();
        out.extend_from_slice(line.join(" ").as_bytes());
        out.push(b'\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_extremal_samples() {
        let img = load_pnm(b"P2 2 2 255\n0 255 255 0\n").unwrap();
        match img {
            PnmImage::Gray(g) => {
                assert_eq!(g.width, 2);
                assert_eq!(g.height, 2);
                assert_eq!(g.values, vec![0.0, 1.0, 1.0, 0.0]);
            }
            PnmImage::Rgb(_) => panic!("P2 must decode as gray"),
        }
    }

    #[test]
    fn p6_single_white_pixel() {
        let mut bytes = b"P6 1 1 255\n".to_vec();
        bytes.extend_from_slice(&[255, 255, 255]);
        match load_pnm(&bytes).unwrap() {
            PnmImage::Rgb(rgb) => {
                assert_eq!((rgb.width, rgb.height), (1, 1));
                assert_eq!(rgb.pixels, vec![255, 255, 255]);
            }
            PnmImage::Gray(_) => panic!("P6 must decode as RGB"),
        }
    }

    #[test]
    fn p5_truncated_payload() {
        let mut bytes = b"P5 3 2 255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5]);
        match load_pnm(&bytes) {
            Err(LuminanceError::TruncatedPayload {
                expected, found, ..
            }) => {
                assert_eq!(expected, 6);
                assert_eq!(found, 5);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_magic_reports_offset_zero() {
        match load_pnm(b"P4 1 1\n\0") {
            Err(LuminanceError::UnsupportedMagic { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected magic error, got {other:?}"),
        }
    }

    #[test]
    fn maxval_out_of_range() {
        assert!(matches!(
            load_pnm(b"P2 1 1 70000\n0\n"),
            Err(LuminanceError::MaxvalOutOfRange { value: 70000, .. })
        ));
        assert!(matches!(
            load_pnm(b"P2 1 1 0\n0\n"),
            Err(LuminanceError::MaxvalOutOfRange { value: 0, .. })
        ));
    }

    #[test]
    fn comments_allowed_in_header() {
        let img = load_pnm(b"P2 # comment\n2 #w\n 1 # h\n255 # maxval\n128 64\n").unwrap();
        match img {
            PnmImage::Gray(g) => {
                assert_eq!((g.width, g.height), (2, 1));
                assert!((g.values[0] - 128.0 / 255.0).abs() < 1e-15);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn sixteen_bit_binary_big_endian() {
        let mut bytes = b"P5 1 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0x80, 0x00]);
        match load_pnm(&bytes).unwrap() {
            PnmImage::Gray(g) => assert!((g.values[0] - 32768.0 / 65535.0).abs() < 1e-15),
            _ => panic!(),
        }
    }

    #[test]
    fn luminance_white_black_red() {
        let img = RgbImage {
            width: 3,
            height: 1,
            pixels: vec![255, 255, 255, 0, 0, 0, 255, 0, 0],
            maxval: 255,
        };
        let g = rgb_to_luminance(&img);
        assert_eq!(g.values[0], 1.0);
        assert_eq!(g.values[1], 0.0);
        assert_eq!(g.values[2], 0.299);
    }

    #[test]
    fn gray_input_maps_to_exact_fraction() {
        for v in [0u16, 1, 77, 128, 254, 255] {
            let img = RgbImage {
                width: 1,
                height: 1,
                pixels: vec![v, v, v],
                maxval: 255,
            };
            assert_eq!(rgb_to_luminance(&img).values[0], v as f64 / 255.0);
        }
    }

    #[test]
    fn stats_examples() {
        let g = GrayImage {
            width: 2,
            height: 2,
            values: vec![0.0, 1.0, 1.0, 0.0],
        };
        let s = stats(&g).unwrap();
        assert_eq!((s.min, s.max, s.mean), (0.0, 1.0, 0.5));

        let c = GrayImage {
            width: 3,
            height: 3,
            values: vec![0.3; 9],
        };
        let s = stats(&c).unwrap();
        assert_eq!((s.min, s.max, s.mean), (0.3, 0.3, 0.3));

        let two = GrayImage {
            width: 2,
            height: 1,
            values: vec![0.2, 0.4],
        };
        let s = stats(&two).unwrap();
        assert!((s.mean - 0.3).abs() < 1e-15);
    }

    #[test]
    fn stats_empty_image_errors() {
        let g = GrayImage {
            width: 0,
            height: 0,
            values: vec![],
        };
        assert!(matches!(stats(&g), Err(LuminanceError::EmptyImage)));
    }

    #[test]
    fn p2_round_trip_within_quantization() {
        let g = GrayImage {
            width: 3,
            height: 2,
            values: vec![0.0, 0.123, 0.5, 0.777, 0.999, 1.0],
        };
        let encoded = write_pnm_p2(&g, 255);
        let back = load_pnm(&encoded).unwrap().into_gray();
        for (a, b) in g.values.iter().zip(&back.values) {
            assert!((a - b).abs() <= 1.0 / 255.0);
        }
    }
}
