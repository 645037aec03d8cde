//! Portable anymap (PNM) support: PBM (P1/P4) and PGM (P2/P5) parsing,
//! canonical serialization, and grayscale binarization.
//!
//! The writer emits a fixed canonical form (single newline separators, one
//! row per line in the ASCII variants) so that golden files are stable, and
//! `parse_pnm(write_pnm(x))` reproduces `x` exactly for every valid image.

use thiserror::Error;

/// Errors produced while parsing PNM bytes. Every variant carries the byte
/// offset at which the problem was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PnmError {
    #[error("unknown magic number at byte {offset} (expected P1, P2, P4 or P5)")]
    UnknownMagic { offset: usize },
    #[error("malformed header at byte {offset}: expected {expected}")]
    MalformedHeader {
        offset: usize,
        expected: &'static str,
    },
    #[error("header dimension {value} at byte {offset} must be positive")]
    NonPositiveDimension { offset: usize, value: i64 },
    #[error(
        "image dimensions {width}x{height} declared at byte {offset} exceed the supported size"
    )]
    OversizedImage {
        offset: usize,
        width: u64,
        height: u64,
    },
    #[error("max value {value} at byte {offset} must be in 1..=65535")]
    BadMaxValue { offset: usize, value: i64 },
    #[error("input ends at byte {offset} with {got} of {expected} samples read")]
    TruncatedData {
        offset: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid sample at byte {offset}")]
    BadSample { offset: usize },
    #[error("sample {value} at byte {offset} exceeds max value {max_value}")]
    SampleOutOfRange {
        offset: usize,
        value: u32,
        max_value: u16,
    },
}

/// Upper bound on width*height accepted by the parser.
const MAX_SAMPLES: u64 = 1 << 24;

/// Grayscale raster parsed from a PGM file (P2/P5).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    max_value: u16,
    pixels: Vec<u16>,
}

impl RasterImage {
    /// Builds a raster image, asserting the type invariants
    /// (positive dimensions, `pixels.len() == width * height`,
    /// every pixel `<= max_value`).
    pub fn new(width: usize, height: usize, max_value: u16, pixels: Vec<u16>) -> Self {
        assert!(width > 0 && height > 0, "dimensions must be positive");
        assert!(max_value > 0, "max_value must be positive");
        assert_eq!(pixels.len(), width * height, "pixel buffer length mismatch");
        assert!(
            pixels.iter().all(|&p| p <= max_value),
            "pixel exceeds max_value"
        );
        Self {
            width,
            height,
            max_value,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn max_value(&self) -> u16 {
        self.max_value
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> u16 {
        self.pixels[y * self.width + x]
    }
}

/// Binary (bilevel) raster; a bit of 1 marks a foreground (inked) pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BinaryImage {
    /// Builds a binary image, asserting positive dimensions,
    /// `bits.len() == width * height` and every element in {0, 1}.
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Self {
        assert!(width > 0 && height > 0, "dimensions must be positive");
        assert_eq!(bits.len(), width * height, "bit buffer length mismatch");
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, x: usize, y: usize) -> u8 {
        self.bits[y * self.width + x]
    }
}

/// A parsed PNM file: bilevel for P1/P4, grayscale for P2/P5.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PnmImage {
    Bitmap(BinaryImage),
    Gray(RasterImage),
}

/// Parses PNM bytes (magic P1/P2/P4/P5). Header comments (`#` to end of
/// line) are skipped; the declared dimensions are authoritative and the
/// parser never reads past the declared width*height samples.
pub fn parse_pnm(bytes: &[u8]) -> Result<PnmImage, PnmError> {
    let mut cur = Cursor {
        data: bytes,
        pos: 0,
    };
    let magic = match (bytes.first(), bytes.get(1)) {
        (Some(b'P'), Some(&m @ (b'1' | b'2' | b'4' | b'5'))) => m,
        _ => return Err(PnmError::UnknownMagic { offset: 0 }),
    };
    cur.pos = 2;

    let width = cur.read_dimension()?;
    let height = cur.read_dimension()?;
    if (width as u64) * (height as u64) > MAX_SAMPLES {
        return Err(PnmError::OversizedImage {
            offset: 2,
            width: width as u64,
            height: height as u64,
        });
    }
    let samples = width * height;

    match magic {
        b'1' => {
            let bits = cur.read_ascii_bits(samples)?;
            Ok(PnmImage::Bitmap(BinaryImage::new(width, height, bits)))
        }
        b'2' => {
            let max_value = cur.read_max_value()?;
            let pixels = cur.read_ascii_samples(samples, max_value)?;
            Ok(PnmImage::Gray(RasterImage::new(
                width, height, max_value, pixels,
            )))
        }
        b'4' => {
            cur.expect_single_whitespace()?;
            let bits = cur.read_packed_bits(width, height)?;
            Ok(PnmImage::Bitmap(BinaryImage::new(width, height, bits)))
        }
        b'5' => {
            let max_value = cur.read_max_value()?;
            cur.expect_single_whitespace()?;
            let pixels = cur.read_binary_samples(samples, max_value)?;
            Ok(PnmImage::Gray(RasterImage::new(
                width, height, max_value, pixels,
            )))
        }
        _ => unreachable!(),
    }
}

/// Serializes an image in the canonical form: P1/P2 when `ascii`,
/// P4/P5 otherwise.
pub fn write_pnm(image: &PnmImage, ascii: bool) -> Vec<u8> {
    match image {
        PnmImage::Bitmap(img) => write_bitmap(img, ascii),
        PnmImage::Gray(img) => write_gray(img, ascii),
    }
}

fn write_bitmap(img: &BinaryImage, ascii: bool) -> Vec<u8> {
    if ascii {
        let mut out = format!("P1\n{} {}\n", img.width, img.height).into_bytes();
        for row in img.bits.chunks(img.width) {
            push_ascii_row(&mut out, row.iter().map(|&b| u32::from(b)));
        }
        out
    } else {
        let mut out = format!("P4\n{} {}\n", img.width, img.height).into_bytes();
        for row in img.bits.chunks(img.width) {
            let mut byte = 0u8;
            for (i, &bit) in row.iter().enumerate() {
                byte |= bit << (7 - i % 8);
                if i % 8 == 7 {
                    out.push(byte);
                    byte = 0;
                }
            }
            if !img.width.is_multiple_of(8) {
                out.push(byte);
            }
        }
        out
    }
}

fn write_gray(img: &RasterImage, ascii: bool) -> Vec<u8> {
    if ascii {
        let mut out = format!("P2\n{} {}\n{}\n", img.width, img.height, img.max_value).into_bytes();
        for row in img.pixels.chunks(img.width) {
            push_ascii_row(&mut out, row.iter().map(|&p| u32::from(p)));
        }
        out
    } else {
        let mut out = format!("P5\n{} {}\n{}\n", img.width, img.height, img.max_value).into_bytes();
        if img.max_value < 256 {
            out.extend(img.pixels.iter().map(|&p| p as u8));
        } else {
            for &p in &img.pixels {
                out.extend_from_slice(&p.to_be_bytes());
            }
        }
        out
    }
}

fn push_ascii_row(out: &mut Vec<u8>, values: impl Iterator<Item = u32>) {
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.push(b' ');
        }
        out.extend_from_slice(v.to_string().as_bytes());
    }
    out.push(b'\n');
}

/// Thresholds a grayscale raster into a binary image: a pixel strictly below
/// `threshold` is dark ink and becomes foreground (1).
///
/// `threshold` must be in `0..=max_value + 1`; 0 maps everything to
/// background and `max_value + 1` maps everything to foreground.
pub fn binarize(image: &RasterImage, threshold: u32) -> BinaryImage {
    assert!(
        threshold <= u32::from(image.max_value) + 1,
        "threshold out of range"
    );
    let bits = image
        .pixels
        .iter()
        .map(|&p| u8::from(u32::from(p) < threshold))
        .collect();
    BinaryImage::new(image.width, image.height, bits)
}

/// Midpoint binarization threshold for a given sample range:
/// `ceil((max_value + 1) / 2)`, i.e. 128 for 8-bit images.
pub fn default_threshold(max_value: u16) -> u32 {
    (u32::from(max_value) + 2) / 2
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments (header context only).
    fn skip_separators(&mut self) {
        while let Some(b) = self.peek() {
            if b == b'#' {
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads a (possibly signed) decimal header token.
    /// Returns the value and the token's byte offset.
    fn read_header_int(&mut self, expected: &'static str) -> Result<(i64, usize), PnmError> {
        self.skip_separators();
        let start = self.pos;
        let mut negative = false;
        if self.peek() == Some(b'-') {
            negative = true;
            self.pos += 1;
        }
        let mut value: i64 = 0;
        let mut saw_digit = false;
        while let Some(b @ b'0'..=b'9') = self.peek() {
            saw_digit = true;
            value = value.saturating_mul(10).saturating_add(i64::from(b - b'0'));
            self.pos += 1;
        }
        if !saw_digit {
            return Err(PnmError::MalformedHeader {
                offset: start,
                expected,
            });
        }
        Ok((if negative { -value } else { value }, start))
    }

    fn read_dimension(&mut self) -> Result<usize, PnmError> {
        let (value, offset) = self.read_header_int("image dimension")?;
        if value <= 0 {
            return Err(PnmError::NonPositiveDimension { offset, value });
        }
        Ok(value as usize)
    }

    fn read_max_value(&mut self) -> Result<u16, PnmError> {
        let (value, offset) = self.read_header_int("max sample value")?;
        if !(1..=65535).contains(&value) {
            return Err(PnmError::BadMaxValue { offset, value });
        }
        Ok(value as u16)
    }

    /// The single whitespace byte separating a binary-variant header from
    /// its sample data.
    fn expect_single_whitespace(&mut self) -> Result<(), PnmError> {
        match self.peek() {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(PnmError::MalformedHeader {
                offset: self.pos,
                expected: "whitespace before sample data",
            }),
            None => Err(PnmError::TruncatedData {
                offset: self.pos,
                expected: 1,
                got: 0,
            }),
        }
    }

    fn read_ascii_bits(&mut self, expected: usize) -> Result<Vec<u8>, PnmError> {
        let mut bits = Vec::with_capacity(expected);
        while bits.len() < expected {
            self.skip_separators();
            match self.peek() {
                Some(b @ (b'0' | b'1')) => {
                    bits.push(b - b'0');
                    self.pos += 1;
                }
                Some(_) => return Err(PnmError::BadSample { offset: self.pos }),
                None => {
                    return Err(PnmError::TruncatedData {
                        offset: self.pos,
                        expected,
                        got: bits.len(),
                    })
                }
            }
        }
        Ok(bits)
    }

    fn read_ascii_samples(
        &mut self,
        expected: usize,
        max_value: u16,
    ) -> Result<Vec<u16>, PnmError> {
        let mut pixels = Vec::with_capacity(expected);
        while pixels.len() < expected {
            self.skip_separators();
            let start = self.pos;
            if self.peek().is_none() {
                return Err(PnmError::TruncatedData {
                    offset: self.pos,
                    expected,
                    got: pixels.len(),
                });
            }
            let mut value: u32 = 0;
            let mut saw_digit = false;
            while let Some(b @ b'0'..=b'9') = self.peek() {
                saw_digit = true;
                value = value.saturating_mul(10).saturating_add(u32::from(b - b'0'));
                self.pos += 1;
            }
            if !saw_digit {
                return Err(PnmError::BadSample { offset: start });
            }
            if value > u32::from(max_value) {
                return Err(PnmError::SampleOutOfRange {
                    offset: start,
                    value,
                    max_value,
                });
            }
            pixels.push(value as u16);
        }
        Ok(pixels)
    }

    fn read_packed_bits(&mut self, width: usize, height: usize) -> Result<Vec<u8>, PnmError> {
        let row_bytes = width.div_ceil(8);
        let mut bits = Vec::with_capacity(width * height);
        for _ in 0..height {
            let row =
                self.data
                    .get(self.pos..self.pos + row_bytes)
                    .ok_or(PnmError::TruncatedData {
                        offset: self.data.len(),
                        expected: width * height,
                        got: bits.len(),
                    })?;
            self.pos += row_bytes;
            for x in 0..width {
                bits.push((row[x / 8] >> (7 - x % 8)) & 1);
            }
        }
        Ok(bits)
    }

    fn read_binary_samples(
        &mut self,
        expected: usize,
        max_value: u16,
    ) -> Result<Vec<u16>, PnmError> {
        let bytes_per_sample = if max_value < 256 { 1 } else { 2 };
        let mut pixels = Vec::with_capacity(expected);
        while pixels.len() < expected {
            let offset = self.pos;
            let raw = self.data.get(offset..offset + bytes_per_sample).ok_or(
                PnmError::TruncatedData {
                    offset: self.data.len(),
                    expected,
                    got: pixels.len(),
                },
            )?;
            self.pos += bytes_per_sample;
            let value = if bytes_per_sample == 1 {
                u32::from(raw[0])
            } else {
                u32::from(u16::from_be_bytes([raw[0], raw[1]]))
            };
            if value > u32::from(max_value) {
                return Err(PnmError::SampleOutOfRange {
                    offset,
                    value,
                    max_value,
                });
            }
            pixels.push(value as u16);
        }
        Ok(pixels)
    }
}
