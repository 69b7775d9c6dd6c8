use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{BoundaryCondition, GridSpec, PermeabilityField, SparseMatrix};
use crate::error::{Error, Result};

const SOLVE_TOLERANCE: f64 = 1e-10;

/// `A x = b` with `A` of size `2^n_b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub n_b: usize,
}

impl LinearSystem {
    pub fn new(matrix: SparseMatrix, rhs: Vec<f64>) -> Result<Self> {
        let n = matrix.dim();
        if n < 2 || !n.is_power_of_two() || rhs.len() != n {
            return Err(Error::InvalidGrid(format!(
                "system of size {n} with rhs length {} is not a power-of-two square system",
                rhs.len()
            )));
        }
        Ok(LinearSystem {
            matrix,
            rhs,
            n_b: n.trailing_zeros() as usize,
        })
    }

    pub fn from_dense(matrix: &DMatrix<f64>, rhs: Vec<f64>) -> Result<Self> {
        Self::new(SparseMatrix::from_dense(matrix), rhs)
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn rhs_norm(&self) -> f64 {
        self.rhs.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Five-point finite-volume discretization of `-div(k grad p) = f`.
pub fn assemble_system(
    grid: &GridSpec,
    perm: &PermeabilityField,
    bc: &BoundaryCondition,
) -> Result<LinearSystem> {
    grid.validated()?;
    let n = grid.n_cells();
    if perm.len() != n {
        return Err(Error::InvalidPermeability(format!(
            "field has {} cells, grid has {n}",
            perm.len()
        )));
    }
    bc.validate(n)?;
    let k = perm.values();
    let (gx, gy) = (grid.dy / grid.dx, grid.dx / grid.dy);
    let mut triplets = Vec::with_capacity(5 * n);
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut face = |i: usize, j: usize, t: f64, diag: &mut Vec<f64>| {
        diag[i] += t;
        diag[j] += t;
        triplets.push((i, j, -t));
        triplets.push((j, i, -t));
    };
    for col in 0..grid.nx {
        for row in 0..grid.ny {
            let i = grid.index(col, row);
            if col + 1 < grid.nx {
                let j = grid.index(col + 1, row);
                face(i, j, harmonic(k[i], k[j]) * gx, &mut diag);
            }
            if row + 1 < grid.ny {
                let j = grid.index(col, row + 1);
                face(i, j, harmonic(k[i], k[j]) * gy, &mut diag);
            }
        }
    }
    let (p_left, p_right) = match bc {
        BoundaryCondition::PressureGradient { p_left, p_right } => (*p_left, *p_right),
        BoundaryCondition::Wells { sites } => {
            for &(i, rate) in sites {
                rhs[i] = rate;
            }
            (0.0, 0.0)
        }
    };
    for row in 0..grid.ny {
        for (col, p) in [(0, p_left), (grid.nx - 1, p_right)] {
            let i = grid.index(col, row);
            let t = 2.0 * k[i] * gx;
            diag[i] += t;
            rhs[i] += t * p;
        }
    }
    triplets.extend(diag.iter().enumerate().map(|(i, d)| (i, i, *d)));
    LinearSystem::new(SparseMatrix::from_triplets(n, triplets), rhs)
}

fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    let s = a.clone().singular_values();
    let (max, min) = s.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), v| {
        (hi.max(*v), lo.min(*v))
    });
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Dense direct solve with a relative-residual check.
pub fn classical_solve(sys: &LinearSystem) -> Result<Vec<f64>> {
    let a = sys.dense();
    let b = DVector::from_column_slice(&sys.rhs);
    let Some(x) = a.clone().lu().solve(&b) else {
        return Err(Error::Singular {
            condition: condition_estimate(&a),
            residual: f64::INFINITY,
        });
    };
    let residual = (&a * &x - &b).norm() / b.norm().max(f64::MIN_POSITIVE);
    if !residual.is_finite() || residual > SOLVE_TOLERANCE {
        return Err(Error::Singular {
            condition: condition_estimate(&a),
            residual,
        });
    }
    Ok(x.iter().copied().collect())
}

pub fn region_average(pressures: &[f64], region: &[usize]) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::InvalidRegion("region is empty".into()));
    }
    if let Some(i) = region.iter().find(|&&i| i >= pressures.len()) {
        return Err(Error::InvalidRegion(format!(
            "node {i} outside {} nodes",
            pressures.len()
        )));
    }
    Ok(region.iter().map(|&i| pressures[i]).sum::<f64>() / region.len() as f64)
}
