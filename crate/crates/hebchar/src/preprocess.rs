//! Preprocessing: crop a binary image to its region of interest, normalize
//! it onto a fixed feature grid, and encode the grid as a bipolar vector.
//!
//! The grid defaults to 8 rows x 6 columns (48 features). Cells keep their
//! raw {0, 1} values for display and golden tests; the net consumes the
//! bipolar {-1, +1} encoding so that every self-correlation equals the
//! feature dimension.

use thiserror::Error;

use crate::pnm::{binarize, default_threshold, BinaryImage, PnmImage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreprocessError {
    #[error("image has no foreground pixels")]
    BlankImage,
}

/// Fixed-size {0, 1} feature matrix extracted from a character patch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGrid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl BinaryGrid {
    pub fn new(rows: usize, cols: usize, cells: Vec<u8>) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
        assert_eq!(cells.len(), rows * cols, "cell buffer length mismatch");
        assert!(cells.iter().all(|&c| c <= 1), "cells must be 0 or 1");
        Self { rows, cols, cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.cols + col]
    }

    /// One image pixel per cell.
    pub fn to_image(&self) -> BinaryImage {
        BinaryImage::new(self.cols, self.rows, self.cells.clone())
    }
}

/// Row-major bipolar {-1, +1} flattening of a [`BinaryGrid`]; the input
/// pattern of the knowledge-base update rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    values: Vec<i8>,
}

impl FeatureVector {
    pub fn new(values: Vec<i8>) -> Self {
        assert!(!values.is_empty(), "feature vector must be non-empty");
        assert!(
            values.iter().all(|&v| v == 1 || v == -1),
            "values must be -1 or +1"
        );
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }
}

/// Tight axis-aligned bounding box of the foreground bits; every boundary
/// row and column of the result contains at least one 1.
pub fn crop(image: &BinaryImage) -> Result<BinaryImage, PreprocessError> {
    let (w, h) = (image.width(), image.height());
    let mut min_x = w;
    let mut min_y = h;
    let mut max_x = 0usize;
    let mut max_y = 0usize;
    let mut any = false;
    for y in 0..h {
        for x in 0..w {
            if image.bit(x, y) == 1 {
                any = true;
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    if !any {
        return Err(PreprocessError::BlankImage);
    }
    let out_w = max_x - min_x + 1;
    let out_h = max_y - min_y + 1;
    let mut bits = Vec::with_capacity(out_w * out_h);
    for y in min_y..=max_y {
        for x in min_x..=max_x {
            bits.push(image.bit(x, y));
        }
    }
    Ok(BinaryImage::new(out_w, out_h, bits))
}

/// Partitions the image into `rows x cols` rectangular blocks and sets each
/// cell to 1 iff at least half of its block is foreground.
///
/// Block (r, c) covers source rows `floor(r*H/rows) .. floor((r+1)*H/rows)`
/// and the analogous columns; when the image is smaller than the grid the
/// nearest source pixel is replicated so every block is non-empty.
pub fn to_grid(image: &BinaryImage, rows: usize, cols: usize) -> BinaryGrid {
    assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
    let (w, h) = (image.width(), image.height());
    let mut cells = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let r0 = r * h / rows;
        let r1 = ((r + 1) * h / rows).max(r0 + 1);
        for c in 0..cols {
            let c0 = c * w / cols;
            let c1 = ((c + 1) * w / cols).max(c0 + 1);
            let mut foreground = 0usize;
            for y in r0..r1 {
                for x in c0..c1 {
                    foreground += usize::from(image.bit(x, y));
                }
            }
            let block = (r1 - r0) * (c1 - c0);
            cells.push(u8::from(2 * foreground >= block));
        }
    }
    BinaryGrid::new(rows, cols, cells)
}

/// Row-major flatten with cell 1 -> +1 and cell 0 -> -1.
pub fn encode(grid: &BinaryGrid) -> FeatureVector {
    FeatureVector::new(
        grid.cells()
            .iter()
            .map(|&c| if c == 1 { 1 } else { -1 })
            .collect(),
    )
}

/// Inverse of [`encode`] for the given grid shape.
pub fn decode(vector: &FeatureVector, rows: usize, cols: usize) -> BinaryGrid {
    assert_eq!(vector.dim(), rows * cols, "shape mismatch");
    BinaryGrid::new(
        rows,
        cols,
        vector.values().iter().map(|&v| u8::from(v == 1)).collect(),
    )
}

/// Grid shape and binarization threshold for the preprocessing pipeline.
/// A `threshold` of `None` selects the per-image midpoint default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub rows: usize,
    pub cols: usize,
    pub threshold: Option<u32>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 6,
            threshold: None,
        }
    }
}

/// Full feature extraction: binarize (grayscale inputs only), crop to the
/// region of interest, normalize onto the grid, and encode.
pub fn pipeline(
    image: &PnmImage,
    config: &PreprocessConfig,
) -> Result<FeatureVector, PreprocessError> {
    let binary = match image {
        PnmImage::Bitmap(img) => img.clone(),
        PnmImage::Gray(img) => {
            let threshold = config
                .threshold
                .unwrap_or_else(|| default_threshold(img.max_value()));
            binarize(img, threshold.min(u32::from(img.max_value()) + 1))
        }
    };
    let cropped = crop(&binary)?;
    Ok(encode(&to_grid(&cropped, config.rows, config.cols)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pnm::RasterImage;
    use proptest::prelude::*;

    /// The 8x6 extracted-pixels reference matrix for the letter A.
    pub(crate) const A_MATRIX: [[u8; 6]; 8] = [
        [0, 0, 1, 1, 0, 0],
        [0, 1, 0, 0, 1, 0],
        [1, 0, 0, 0, 0, 1],
        [1, 0, 0, 0, 0, 1],
        [1, 1, 1, 1, 1, 1],
        [1, 0, 0, 0, 0, 1],
        [1, 0, 0, 0, 0, 1],
        [1, 0, 0, 0, 0, 1],
    ];

    pub(crate) fn a_matrix_grid() -> BinaryGrid {
        BinaryGrid::new(8, 6, A_MATRIX.iter().flatten().copied().collect())
    }

    #[test]
    fn crop_single_pixel() {
        let mut bits = vec![0u8; 16];
        bits[2 * 4 + 1] = 1;
        let out = crop(&BinaryImage::new(4, 4, bits)).unwrap();
        assert_eq!(out, BinaryImage::new(1, 1, vec![1]));
    }

    #[test]
    fn crop_tight_image_is_identity() {
        let img = a_matrix_grid().to_image();
        assert_eq!(crop(&img).unwrap(), img);
    }

    #[test]
    fn crop_blank_image_errors() {
        let img = BinaryImage::new(3, 3, vec![0; 9]);
        assert_eq!(crop(&img), Err(PreprocessError::BlankImage));
    }

    #[test]
    fn to_grid_identity_on_reference_matrix() {
        let grid = to_grid(&a_matrix_grid().to_image(), 8, 6);
        assert_eq!(grid, a_matrix_grid());
        assert_eq!(grid.cells()[..6], [0, 0, 1, 1, 0, 0]);
        assert_eq!(grid.cells()[4 * 6..5 * 6], [1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn to_grid_uniform_blocks() {
        // 16x12 image of uniform 2x2 blocks reproduces the 8x6 source grid.
        let grid = a_matrix_grid();
        let mut bits = vec![0u8; 16 * 12];
        for y in 0..16 {
            for x in 0..12 {
                bits[y * 12 + x] = grid.cell(y / 2, x / 2);
            }
        }
        let down = to_grid(&BinaryImage::new(12, 16, bits), 8, 6);
        assert_eq!(down, grid);
    }

    #[test]
    fn to_grid_half_foreground_ties_to_one() {
        // One 2x2 block with exactly two foreground pixels.
        let img = BinaryImage::new(2, 2, vec![1, 0, 0, 1]);
        let grid = to_grid(&img, 1, 1);
        assert_eq!(grid.cells(), &[1]);
    }

    #[test]
    fn to_grid_upscales_by_replication() {
        let img = BinaryImage::new(2, 1, vec![1, 0]);
        let grid = to_grid(&img, 2, 4);
        assert_eq!(grid.cells(), &[1, 1, 0, 0, 1, 1, 0, 0]);
    }

    #[test]
    fn encode_all_zero_grid() {
        let grid = BinaryGrid::new(2, 2, vec![0; 4]);
        assert_eq!(encode(&grid).values(), &[-1, -1, -1, -1]);
    }

    #[test]
    fn encode_reference_matrix_positions() {
        let grid = a_matrix_grid();
        let fv = encode(&grid);
        assert_eq!(fv.dim(), 48);
        for (i, &v) in fv.values().iter().enumerate() {
            let expected = if grid.cells()[i] == 1 { 1 } else { -1 };
            assert_eq!(v, expected, "position {i}");
        }
    }

    #[test]
    fn pipeline_matches_manual_composition() {
        let img = a_matrix_grid().to_image();
        let manual = encode(&to_grid(&crop(&img).unwrap(), 8, 6));
        let piped = pipeline(&PnmImage::Bitmap(img), &PreprocessConfig::default()).unwrap();
        assert_eq!(piped, manual);
    }

    #[test]
    fn pipeline_blank_raster_errors() {
        let img = RasterImage::new(3, 3, 255, vec![255; 9]);
        let res = pipeline(&PnmImage::Gray(img), &PreprocessConfig::default());
        assert_eq!(res, Err(PreprocessError::BlankImage));
    }

    #[test]
    fn pipeline_padded_matrix_matches_unpadded() {
        // Embed the reference matrix at an offset inside a 20x20 white canvas.
        let grid = a_matrix_grid();
        let mut bits = vec![0u8; 20 * 20];
        for r in 0..8 {
            for c in 0..6 {
                bits[(r + 7) * 20 + (c + 9)] = grid.cell(r, c);
            }
        }
        let padded = pipeline(
            &PnmImage::Bitmap(BinaryImage::new(20, 20, bits)),
            &PreprocessConfig::default(),
        )
        .unwrap();
        let unpadded = pipeline(
            &PnmImage::Bitmap(grid.to_image()),
            &PreprocessConfig::default(),
        )
        .unwrap();
        assert_eq!(padded, unpadded);
    }

    fn arb_nonblank_image() -> impl Strategy<Value = BinaryImage> {
        (1usize..=16, 1usize..=16)
            .prop_flat_map(|(w, h)| {
                proptest::collection::vec(0u8..=1, w * h).prop_map(move |bits| (w, h, bits))
            })
            .prop_filter_map("needs at least one foreground bit", |(w, h, bits)| {
                bits.contains(&1).then(|| BinaryImage::new(w, h, bits))
            })
    }

    fn arb_grid() -> impl Strategy<Value = BinaryGrid> {
        (1usize..=8, 1usize..=8)
            .prop_flat_map(|(r, c)| {
                proptest::collection::vec(0u8..=1, r * c).prop_map(move |cells| (r, c, cells))
            })
            .prop_map(|(r, c, cells)| BinaryGrid::new(r, c, cells))
    }

    proptest! {
        #[test]
        fn crop_is_idempotent(img in arb_nonblank_image()) {
            let once = crop(&img).unwrap();
            let twice = crop(&once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn pipeline_is_translation_invariant(
            img in arb_nonblank_image(),
            pad_left in 0usize..=5,
            pad_top in 0usize..=5,
            pad_right in 0usize..=5,
            pad_bottom in 0usize..=5,
        ) {
            let (w, h) = (img.width(), img.height());
            let (big_w, big_h) = (w + pad_left + pad_right, h + pad_top + pad_bottom);
            let mut bits = vec![0u8; big_w * big_h];
            for y in 0..h {
                for x in 0..w {
                    bits[(y + pad_top) * big_w + (x + pad_left)] = img.bit(x, y);
                }
            }
            let config = PreprocessConfig::default();
            let base = pipeline(&PnmImage::Bitmap(img), &config).unwrap();
            let shifted = pipeline(&PnmImage::Bitmap(BinaryImage::new(big_w, big_h, bits)), &config).unwrap();
            prop_assert_eq!(base, shifted);
        }

        #[test]
        fn encode_decode_roundtrip(grid in arb_grid()) {
            let fv = encode(&grid);
            prop_assert_eq!(decode(&fv, grid.rows(), grid.cols()), grid);
        }

        #[test]
        fn to_grid_output_dims(img in arb_nonblank_image(), rows in 1usize..=10, cols in 1usize..=10) {
            let grid = to_grid(&img, rows, cols);
            prop_assert_eq!(grid.rows(), rows);
            prop_assert_eq!(grid.cols(), cols);
        }
    }
}
