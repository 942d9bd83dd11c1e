//! Per-cell geometric transforms over a non-overlapping grid.

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::RngStream;

use super::geometric::{warp_region, Border, InverseAffine, Rect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub rows: usize,
    pub cols: usize,
    /// Chance that a given cell is transformed.
    pub cell_probability: f64,
    pub max_rotate_degrees: f64,
    /// Maximum translation as a fraction of the cell extent.
    pub max_translate_fraction: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            rows: 4,
            cols: 4,
            cell_probability: 0.5,
            max_rotate_degrees: 15.0,
            max_translate_fraction: 0.1,
        }
    }
}

impl GridParams {
    pub fn validate_for(&self, height: usize, width: usize) -> Result<()> {
        let limit = height.min(width);
        if self.rows < 1 || self.cols < 1 || self.rows > limit || self.cols > limit {
            return Err(Error::argument(format!(
                "grid {}x{} does not fit a {height}x{width} image",
                self.rows, self.cols
            )));
        }
        if !(0.0..=1.0).contains(&self.cell_probability) {
            return Err(Error::argument(format!(
                "grid cell probability {} not in [0, 1]",
                self.cell_probability
            )));
        }
        Ok(())
    }
}

/// Cell rectangles in row-major order; the last row and column absorb the
/// remainder pixels.
pub fn grid_cells(height: usize, width: usize, rows: usize, cols: usize) -> Vec<Rect> {
    let (ch, cw) = (height / rows, width / cols);
    let mut cells = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let y0 = r * ch;
        let h = if r + 1 == rows { height - y0 } else { ch };
        for c in 0..cols {
            let x0 = c * cw;
            let w = if c + 1 == cols { width - x0 } else { cw };
            cells.push(Rect {
                y0,
                x0,
                height: h,
                width: w,
            });
        }
    }
    cells
}

/// The transform applied to one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellTransform {
    Rotate(f64),
    TranslateX(i64),
    TranslateY(i64),
}

impl CellTransform {
    fn affine(self) -> InverseAffine {
        match self {
            CellTransform::Rotate(deg) => InverseAffine::rotation(deg),
            CellTransform::TranslateX(dx) => InverseAffine::translation(dx as f64, 0.0),
            CellTransform::TranslateY(dy) => InverseAffine::translation(0.0, dy as f64),
        }
    }
}

/// Draws the per-cell plan: for each cell, a coin and (if it lands) one of
/// rotate / translate-x / translate-y with its magnitude.
pub fn plan_grid(
    cells: &[Rect],
    params: &GridParams,
    rng: &mut RngStream,
) -> Result<Vec<Option<CellTransform>>> {
    cells
        .iter()
        .map(|cell| {
            if rng.next_unit_uniform() >= params.cell_probability {
                return Ok(None);
            }
            let max_t = params.max_translate_fraction;
            let t = match rng.next_index(3)? {
                0 => CellTransform::Rotate(
                    rng.next_range(-params.max_rotate_degrees, params.max_rotate_degrees),
                ),
                1 => CellTransform::TranslateX(
                    (rng.next_range(-max_t, max_t) * cell.width as f64).round() as i64,
                ),
                _ => CellTransform::TranslateY(
                    (rng.next_range(-max_t, max_t) * cell.height as f64).round() as i64,
                ),
            };
            Ok(Some(t))
        })
        .collect()
}

pub fn grid_transform(
    image: &ImageTensor,
    params: &GridParams,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    params.validate_for(image.height(), image.width())?;
    let cells = grid_cells(image.height(), image.width(), params.rows, params.cols);
    let plan = plan_grid(&cells, params, rng)?;
    let mut out = image.clone();
    for (cell, t) in cells.iter().zip(plan) {
        if let Some(t) = t {
            out = warp_region(&out, *cell, t.affine(), Border::Reflect);
        }
    }
    Ok(out)
}
