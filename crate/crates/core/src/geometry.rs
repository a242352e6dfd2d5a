//! Surface lattice geometry and the Jakes spatial-correlation model.
//!
//! Elements are laid out row-major: element `m` sits at row `m / my`,
//! column `m % my`. Correlation between two elements is the zero-order
//! spherical Bessel function of their normalized distance, `j0(2πd/λ)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Planar grid of `my × mz` candidate element positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGrid {
    my: usize,
    mz: usize,
    spacing_m: f64,
    wavelength_m: f64,
}

impl SurfaceGrid {
    pub fn new(my: usize, mz: usize, spacing_m: f64, wavelength_m: f64) -> Result<Self> {
        if my == 0 || mz == 0 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least one element per axis, got {my}x{mz}"
            )));
        }
        if !(spacing_m.is_finite() && spacing_m > 0.0) {
            return Err(Error::InvalidInput(format!("spacing must be positive, got {spacing_m}")));
        }
        if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
            return Err(Error::InvalidInput(format!(
                "wavelength must be positive, got {wavelength_m}"
            )));
        }
        Ok(Self { my, mz, spacing_m, wavelength_m })
    }

    pub fn my(&self) -> usize {
        self.my
    }

    pub fn mz(&self) -> usize {
        self.mz
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    /// Total element count `M = my · mz`.
    pub fn len(&self) -> usize {
        self.my * self.mz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the spacing is below half a wavelength. Sparser grids are
    /// allowed but the caller should warn.
    pub fn is_dense(&self) -> bool {
        self.spacing_m < self.wavelength_m / 2.0
    }

    /// Number of lattice rows (`M / my`).
    pub fn rows(&self) -> usize {
        self.mz
    }

    /// Number of lattice columns (`my`).
    pub fn cols(&self) -> usize {
        self.my
    }

    pub fn element_coords(&self, m: usize) -> Result<(usize, usize)> {
        if m >= self.len() {
            return Err(Error::IndexOutOfRange { index: m, len: self.len() });
        }
        Ok((m / self.my, m % self.my))
    }

    /// Inverse of [`element_coords`](Self::element_coords).
    pub fn element_index(&self, row: usize, col: usize) -> Result<usize> {
        if row >= self.rows() || col >= self.cols() {
            return Err(Error::InvalidInput(format!(
                "lattice position ({row}, {col}) outside {}x{} grid",
                self.rows(),
                self.cols()
            )));
        }
        Ok(row * self.my + col)
    }

    pub fn pairwise_distance(&self, i: usize, j: usize) -> Result<f64> {
        let (ri, ci) = self.element_coords(i)?;
        let (rj, cj) = self.element_coords(j)?;
        let dr = ri.abs_diff(rj) as f64;
        let dc = ci.abs_diff(cj) as f64;
        Ok(self.spacing_m * dr.hypot(dc))
    }
}

/// Zero-order spherical Bessel function of the first kind, `sin(x)/x`.
pub fn spherical_j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // sin(x)/x loses relative precision near zero; the series is exact here.
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Spatial correlation matrix and its symmetric square root.
#[derive(Debug, Clone)]
pub struct CorrelationModel {
    j: DMatrix<f64>,
    j_sqrt: DMatrix<f64>,
    eigen_floor: f64,
}

impl CorrelationModel {
    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn j_sqrt(&self) -> &DMatrix<f64> {
        &self.j_sqrt
    }

    pub fn eigen_floor(&self) -> f64 {
        self.eigen_floor
    }

    pub fn len(&self) -> usize {
        self.j.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds `J[i][j] = j0(2π·d_ij/λ)` and its PSD root with eigenvalues
/// clamped at zero.
pub fn build_correlation(grid: &SurfaceGrid) -> CorrelationModel {
    build_correlation_with_floor(grid, 0.0).expect("a finite correlation matrix always decomposes")
}

pub fn build_correlation_with_floor(grid: &SurfaceGrid, eigen_floor: f64) -> Result<CorrelationModel> {
    let j = correlation_matrix(grid);
    let j_sqrt = matrix_sqrt(&j, eigen_floor)?;
    Ok(CorrelationModel { j, j_sqrt, eigen_floor })
}

/// The correlation matrix alone, without the square root.
pub fn correlation_matrix(grid: &SurfaceGrid) -> DMatrix<f64> {
    let m = grid.len();
    let k = 2.0 * PI / grid.wavelength_m();
    let mut j = DMatrix::<f64>::identity(m, m);
    for a in 0..m {
        for b in (a + 1)..m {
            let d = grid.pairwise_distance(a, b).expect("indices in range");
            let v = spherical_j0(k * d);
            j[(a, b)] = v;
            j[(b, a)] = v;
        }
    }
    j
}

fn symmetric_eigen(j: &DMatrix<f64>, eigen_floor: f64) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if !j.is_square() {
        return Err(Error::InvalidInput(format!(
            "matrix must be square, got {}x{}",
            j.nrows(),
            j.ncols()
        )));
    }
    if j.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    if !(eigen_floor.is_finite() && eigen_floor >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "eigenvalue floor must be nonnegative, got {eigen_floor}"
        )));
    }
    let mut eig = SymmetricEigen::try_new(j.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::InvalidInput("eigendecomposition did not converge".into()))?;
    for lambda in eig.eigenvalues.iter_mut() {
        if *lambda < eigen_floor {
            *lambda = eigen_floor;
        }
    }
    Ok(eig)
}

/// Symmetric PSD square root `Q·Λ^{1/2}·Qᵀ` after clamping eigenvalues
/// below `eigen_floor` up to it.
pub fn matrix_sqrt(j: &DMatrix<f64>, eigen_floor: f64) -> Result<DMatrix<f64>> {
    let eig = symmetric_eigen(j, eigen_floor)?;
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (mut col, lambda) in scaled.column_iter_mut().zip(eig.eigenvalues.iter()) {
        col *= lambda.sqrt();
    }
    let root = &scaled * q.transpose();
    // Symmetrize away rounding asymmetry.
    Ok((&root + root.transpose()) * 0.5)
}

/// `Q·Λ_clamped·Qᵀ`, the matrix whose exact root [`matrix_sqrt`] returns.
pub fn clamped_matrix(j: &DMatrix<f64>, eigen_floor: f64) -> Result<DMatrix<f64>> {
    let eig = symmetric_eigen(j, eigen_floor)?;
    Ok(eig.recompose())
}
