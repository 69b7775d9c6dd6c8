//! Pitchfork fracture networks.
//!
//! One level occupies a box of `w x h` cells (horizontal orientation): a
//! spine along the middle row from the left edge to the middle column, a
//! crossbar on the middle column spanning the two quarter rows, and two prongs
//! along the quarter rows out to the right edge. Each prong is the spine of
//! the next level, whose box is the matching right-hand quadrant. Vertical
//! orientation is the transpose. Where levels overlap the larger fracture
//! wins.

use serde::{Deserialize, Serialize};

use super::{GridSpec, PermeabilityField};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractureSpec {
    pub depth: usize,
    pub base_orientation: Orientation,
    pub matrix_perm: f64,
    pub max_contrast: f64,
}

impl FractureSpec {
    /// Permeability of level `level` (1 = largest).
    pub fn level_perm(&self, level: usize) -> f64 {
        let exponent = (self.depth - level + 1) as f64 / self.depth as f64;
        self.matrix_perm * self.max_contrast.powf(exponent)
    }
}

/// Fracture level of every cell (0 = matrix), column-major.
pub fn fracture_cells(grid: &GridSpec, spec: &FractureSpec) -> Result<Vec<usize>> {
    if spec.depth == 0 {
        return Err(Error::FractureTooDeep {
            depth: 0,
            nx: grid.nx,
            ny: grid.ny,
            reason: "depth must be at least 1".into(),
        });
    }
    let (along, cross) = match spec.base_orientation {
        Orientation::Horizontal => (grid.nx, grid.ny),
        Orientation::Vertical => (grid.ny, grid.nx),
    };
    let (mut a, mut c) = (along, cross);
    for level in 1..=spec.depth {
        if a < 2 || c < 4 {
            return Err(Error::FractureTooDeep {
                depth: spec.depth,
                nx: grid.nx,
                ny: grid.ny,
                reason: format!(
                    "level {level} needs a box at least 2 cells along and 4 across the fracture, got {a}x{c}"
                ),
            });
        }
        a /= 2;
        c /= 2;
    }

    let mut level_of = vec![0usize; grid.n_cells()];
    let mut mark = |u: usize, v: usize, level: usize| {
        let (col, row) = match spec.base_orientation {
            Orientation::Horizontal => (u, v),
            Orientation::Vertical => (v, u),
        };
        let cell = &mut level_of[grid.index(col, row)];
        if *cell == 0 || *cell > level {
            *cell = level;
        }
    };
    let mut boxes = vec![(0usize, 0usize, along, cross)];
    for level in 1..=spec.depth {
        let mut next = Vec::with_capacity(boxes.len() * 2);
        for (u0, v0, w, h) in boxes {
            let mid_u = u0 + w / 2;
            let (q1, mid_v, q3) = (v0 + h / 4, v0 + h / 2, v0 + h / 2 + h / 4);
            for u in u0..=mid_u {
                mark(u, mid_v, level);
            }
            for v in q1..=q3 {
                mark(mid_u, v, level);
            }
            for u in mid_u..u0 + w {
                mark(u, q1, level);
                mark(u, q3, level);
            }
            next.push((mid_u, v0, w / 2, h / 2));
            next.push((mid_u, mid_v, w / 2, h / 2));
        }
        boxes = next;
    }
    Ok(level_of)
}

pub fn generate_pitchfork_permeability(
    grid: &GridSpec,
    spec: &FractureSpec,
) -> Result<PermeabilityField> {
    if !(spec.matrix_perm > 0.0 && spec.matrix_perm.is_finite()) {
        return Err(Error::InvalidPermeability(format!(
            "matrix permeability {}",
            spec.matrix_perm
        )));
    }
    if !(spec.max_contrast >= 1.0 && spec.max_contrast.is_finite()) {
        return Err(Error::InvalidPermeability(format!(
            "contrast {} must be at least 1",
            spec.max_contrast
        )));
    }
    let levels = fracture_cells(grid, spec)?;
    let values: Vec<f64> = levels
        .iter()
        .map(|&l| {
            if l == 0 {
                spec.matrix_perm
            } else {
                spec.level_perm(l)
            }
        })
        .collect();
    PermeabilityField::from_values(&values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(depth: usize, contrast: f64) -> FractureSpec {
        FractureSpec {
            depth,
            base_orientation: Orientation::Horizontal,
            matrix_perm: 1.0,
            max_contrast: contrast,
        }
    }

    #[test]
    fn four_by_four_layout() {
        let g = GridSpec::new(4, 4).unwrap();
        let f = generate_pitchfork_permeability(&g, &spec(1, 100.0)).unwrap();
        let cells = [(0, 2), (1, 2), (2, 1), (2, 2), (2, 3), (3, 1), (3, 3)];
        for col in 0..4 {
            for row in 0..4 {
                let want = if cells.contains(&(col, row)) {
                    100.0
                } else {
                    1.0
                };
                assert!(
                    (f.value(g.index(col, row)) - want).abs() < 1e-9,
                    "cell ({col},{row})"
                );
            }
        }
    }

    #[test]
    fn unit_contrast_is_uniform() {
        let g = GridSpec::new(8, 8).unwrap();
        let f = generate_pitchfork_permeability(&g, &spec(1, 1.0)).unwrap();
        assert!(f.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn vertical_is_transpose() {
        let g = GridSpec::new(8, 8).unwrap();
        let h = fracture_cells(&g, &spec(2, 10.0)).unwrap();
        let mut s = spec(2, 10.0);
        s.base_orientation = Orientation::Vertical;
        let v = fracture_cells(&g, &s).unwrap();
        for col in 0..8 {
            for row in 0..8 {
                assert_eq!(h[g.index(col, row)], v[g.index(row, col)]);
            }
        }
    }

    #[test]
    fn too_deep_is_rejected() {
        let g = GridSpec::new(4, 4).unwrap();
        assert!(matches!(
            fracture_cells(&g, &spec(2, 10.0)),
            Err(Error::FractureTooDeep { .. })
        ));
        assert!(matches!(
            fracture_cells(&g, &spec(0, 10.0)),
            Err(Error::FractureTooDeep { .. })
        ));
        let narrow = GridSpec::new(16, 2).unwrap();
        assert!(fracture_cells(&narrow, &spec(1, 10.0)).is_err());
    }

    // Counts from an independent recursive enumeration.
    #[test]
    fn sixty_four_depth_three() {
        let g = GridSpec::new(64, 64).unwrap();
        let s = spec(3, 1000.0);
        let levels = fracture_cells(&g, &s).unwrap();
        let count = |l: usize| levels.iter().filter(|&&v| v == l).count();
        assert_eq!((count(1), count(2), count(3)), (127, 92, 88));
        let f = generate_pitchfork_permeability(&g, &s).unwrap();
        for (cell, &l) in levels.iter().enumerate() {
            let want = if l == 0 { 1.0 } else { s.level_perm(l) };
            assert!((f.value(cell) / want - 1.0).abs() < 1e-12);
        }
        assert!((s.level_perm(1) / s.level_perm(2) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn level_perms_decrease() {
        let s = spec(3, 1000.0);
        assert!((s.level_perm(1) - 1000.0).abs() < 1e-9);
        assert!((s.level_perm(2) - 100.0).abs() < 1e-9);
        assert!((s.level_perm(3) - 10.0).abs() < 1e-9);
    }
}
