//! Dense eigen/SVD contract: full spectra with residual guarantees, singular
//! values from the symmetrized twin, Schatten sums.
//!
//! The factorizations themselves are delegated to LAPACK; this module owns the
//! ordering, conjugate pairing, residual verification and serialization.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::LayerpotError;
use crate::operators::OperatorMatrix;

/// Relative residual accepted for an eigenpair, `||Av - lambda v||_2 / ||A||_F`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// An eigenvalue is flagged real when `|Im| <= 1e-8 * max(1, |lambda|)`.
pub const REAL_FLAG_TOL: f64 = 1e-8;

/// Full spectrum of a Nystrom matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues ordered by descending modulus.
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenvectors (columns, unit Euclidean norm), aligned with
    /// `eigenvalues`; absent for the eigenvalues-only path.
    pub eigenvectors: Option<Array2<Complex64>>,
    /// Per-pair relative residuals; empty when eigenvectors are absent.
    pub residuals: Vec<f64>,
    /// Real flags; complex entries come in conjugate pairs.
    pub real_flags: Vec<bool>,
    /// Singular values of the symmetrized twin, nonincreasing.
    pub singular_values: Vec<f64>,
    pub shape_label: String,
    pub grid_label: String,
    /// Cleared when the solver failed to meet the residual bound.
    pub solver_ok: bool,
}

/// Serialized form of a spectrum.
#[derive(Debug, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub shape: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub eigenvalues: Vec<[f64; 2]>,
    pub singular_values: Vec<f64>,
    pub residual_max: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn residual_max(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Index of the eigenpair whose eigenvector is constant (the lambda = -1
    /// pair), identified by coefficient of variation, not by value proximity.
    pub fn constant_eigenpair(&self) -> Option<usize> {
        let vecs = self.eigenvectors.as_ref()?;
        (0..self.len()).find(|&j| {
            let col = vecs.column(j);
            let n = col.len() as f64;
            let mean = col.sum() / n;
            if mean.norm() < 1e-12 {
                return false;
            }
            let var: f64 = col.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / n;
            var.sqrt() / mean.norm() <= 1e-6
        })
    }

    /// Real part of eigenvalue `j`; meaningful when `real_flags[j]` holds.
    pub fn real_eigenvalue(&self, j: usize) -> f64 {
        self.eigenvalues[j].re
    }

    /// Extracts the eigenvector of a real-flagged pair as a real vector,
    /// rotated so its largest component is real.
    pub fn real_eigenvector(&self, j: usize) -> Option<Array1<f64>> {
        let vecs = self.eigenvectors.as_ref()?;
        if !self.real_flags[j] {
            return None;
        }
        let col = vecs.column(j);
        let pivot = col
            .iter()
            .cloned()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())?;
        if pivot.norm() == 0.0 {
            return None;
        }
        let phase = pivot / pivot.norm();
        Some(col.iter().map(|v| (v / phase).re).collect())
    }

    pub fn to_record(&self) -> SpectrumRecord {
        SpectrumRecord {
            shape: self.shape_label.clone(),
            n: self.len(),
            eigenvalues: self.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            singular_values: self.singular_values.clone(),
            residual_max: self.residual_max(),
        }
    }
}

/// One eigenvalue per CSV row: index, re, im, alpha (paired singular value),
/// shape, N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumCsvRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub alpha: f64,
    pub shape: String,
    #[serde(rename = "N")]
    pub n: usize,
}

/// Flattens a spectrum into CSV rows, pairing each eigenvalue with the
/// singular value of the same rank.
pub fn spectrum_csv_rows(spectrum: &Spectrum) -> Vec<SpectrumCsvRow> {
    (0..spectrum.len())
        .map(|j| SpectrumCsvRow {
            index: j,
            re: spectrum.eigenvalues[j].re,
            im: spectrum.eigenvalues[j].im,
            alpha: spectrum.singular_values.get(j).copied().unwrap_or(0.0),
            shape: spectrum.shape_label.clone(),
            n: spectrum.len(),
        })
        .collect()
}

fn order_descending_modulus(vals: &Array1<Complex64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&i, &j| {
        vals[j]
            .norm()
            .partial_cmp(&vals[i].norm())
            .unwrap()
            .then(vals[j].re.partial_cmp(&vals[i].re).unwrap())
            .then(vals[j].im.partial_cmp(&vals[i].im).unwrap())
    });
    idx
}

fn real_flag(z: Complex64) -> bool {
    z.im.abs() <= REAL_FLAG_TOL * 1.0_f64.max(z.norm())
}

/// Full eigendecomposition of the Nystrom matrix, plus singular values of its
/// symmetrized twin.
///
/// Never fails silently: a residual above [`RESIDUAL_TOL`] clears `solver_ok`
/// but the partial result is still returned.
pub fn eigenpairs(matrix: &OperatorMatrix) -> Result<Spectrum, LayerpotError> {
    if matrix.a.iter().any(|v| !v.is_finite()) {
        return Err(LayerpotError::SolverFailure(
            "matrix contains non-finite entries".into(),
        ));
    }
    let (vals, vecs) = matrix
        .a
        .eig()
        .map_err(|e| LayerpotError::SolverFailure(format!("eig: {e}")))?;

    let order = order_descending_modulus(&vals);
    let n = vals.len();
    let a_complex = matrix.a.mapv(|v| Complex64::new(v, 0.0));
    let fro = matrix.a.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut eigenvalues = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut real_flags = Vec::with_capacity(n);
    let mut columns = Array2::zeros((n, n));
    for (slot, &j) in order.iter().enumerate() {
        let lambda = vals[j];
        let col = vecs.column(j);
        let norm: f64 = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let v: Array1<Complex64> = col.iter().map(|z| z / norm).collect();
        let av = a_complex.dot(&v);
        let res: f64 = av
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / fro;
        eigenvalues.push(lambda);
        residuals.push(res);
        real_flags.push(real_flag(lambda));
        columns.column_mut(slot).assign(&v);
    }

    let solver_ok = residuals.iter().all(|&r| r <= RESIDUAL_TOL);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(columns),
        residuals,
        real_flags,
        singular_values: singular_values(matrix)?,
        shape_label: matrix.shape_label.clone(),
        grid_label: matrix.grid_label.clone(),
        solver_ok,
    })
}

/// Eigenvalues only (no vectors, no residuals); used by grid-refinement
/// checks where the full decomposition would dominate the runtime.
pub fn eigenvalues_only(matrix: &OperatorMatrix) -> Result<Vec<Complex64>, LayerpotError> {
    let vals = matrix
        .a
        .eigvals()
        .map_err(|e| LayerpotError::SolverFailure(format!("eigvals: {e}")))?;
    let order = order_descending_modulus(&vals);
    Ok(order.iter().map(|&j| vals[j]).collect())
}

/// Singular values of the symmetrized twin, nonincreasing.
pub fn singular_values(matrix: &OperatorMatrix) -> Result<Vec<f64>, LayerpotError> {
    let sym = matrix.symmetrized();
    let (_, s, _) = sym
        .svd(false, false)
        .map_err(|e| LayerpotError::SolverFailure(format!("svd: {e}")))?;
    let mut out: Vec<f64> = s.to_vec();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(out)
}

/// Schatten sum `sum_j alpha_j^r` for `r >= 1`.
pub fn schatten_sum(values: &[f64], r: f64) -> Result<f64, LayerpotError> {
    if r < 1.0 {
        return Err(LayerpotError::InvalidArgument(format!(
            "Schatten exponent must be >= 1, got {r}"
        )));
    }
    Ok(values.iter().map(|a| a.powf(r)).sum())
}
