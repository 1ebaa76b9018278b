//! Nystrom assembly of the double layer potential in 2D and 3D, and the 2D
//! single layer potential with the Kussmaul-Martensen log-kernel splitting.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, Axis};
use rayon::prelude::*;

use crate::error::LayerpotError;
use crate::geometry::{Curve2D, Surface3D};
use crate::quadrature::{gauss_legendre, log_sin_weights};

/// Node locations of an assembled operator.
#[derive(Debug, Clone)]
pub enum NodeGrid {
    /// Uniform parameter nodes `t_j` on a curve.
    Curve { t: Vec<f64> },
    /// Product grid `(theta_k, phi_l)` on a surface, row-major in `theta`.
    Surface {
        theta_phi: Vec<(f64, f64)>,
        n_theta: usize,
        n_phi: usize,
    },
}

/// Dense Nystrom matrix together with its quadrature data.
///
/// `a` is the eigenvalue-faithful matrix (eigenvalues approximate the
/// operator spectrum); the symmetrized twin `D^{1/2} A D^{-1/2}` is the
/// L2-isometric representative used for singular values and Schatten sums.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub a: Array2<f64>,
    pub weights: Array1<f64>,
    pub nodes: NodeGrid,
    pub shape_label: String,
    pub grid_label: String,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Similarity transform `D^{1/2} A D^{-1/2}` with `D = diag(w_j)`.
    pub fn symmetrized(&self) -> Array2<f64> {
        let n = self.dim();
        let sqrt_w: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = self.a[[i, j]] * sqrt_w[i] / sqrt_w[j];
            }
        }
        out
    }

    /// Largest deviation of a row sum from -1 (the discrete image of K1 = -1).
    pub fn row_sum_defect(&self) -> f64 {
        self.a
            .sum_axis(Axis(1))
            .iter()
            .map(|s| (s + 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Double layer kernel on a curve: `(1/pi) nu_y log(1/|x - y|)` with
/// `x = q(s)`, `y = q(t)`; continuous across the diagonal where it equals
/// `-kappa(t) / (2 pi)`.
pub fn dlp_kernel_2d(curve: &Curve2D, s: f64, t: f64) -> f64 {
    let fs = curve.frame(s);
    let ft = curve.frame(t);
    let dx = fs.point[0] - ft.point[0];
    let dy = fs.point[1] - ft.point[1];
    let r2 = dx * dx + dy * dy;
    // near-diagonal samples fall back to the curvature limit
    if r2 < 1e-28 {
        return -ft.curvature / (2.0 * PI);
    }
    (ft.normal[0] * dx + ft.normal[1] * dy) / (PI * r2)
}

/// Assembles the 2D double layer Nystrom matrix on `n` uniform nodes.
///
/// The kernel is smooth on a C^2 curve, so the plain trapezoid rule is
/// spectrally accurate: `A_ij = h k(t_i, t_j) |q'(t_j)|` with `h = 2 pi / n`.
pub fn assemble_dlp_2d(curve: &Curve2D, n: usize) -> Result<OperatorMatrix, LayerpotError> {
    if n < 16 || n % 2 != 0 {
        return Err(LayerpotError::InvalidGrid(format!(
            "2D node count must be even and >= 16, got {n}"
        )));
    }
    let h = 2.0 * PI / n as f64;
    let t: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
    let frames: Vec<_> = t.iter().map(|&tj| curve.frame(tj)).collect();
    let weights = Array1::from_iter(frames.iter().map(|f| h * f.speed));

    let mut a = Array2::zeros((n, n));
    a.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let fi = &frames[i];
            for j in 0..n {
                let fj = &frames[j];
                let k = if i == j {
                    -fj.curvature / (2.0 * PI)
                } else {
                    let dx = fi.point[0] - fj.point[0];
                    let dy = fi.point[1] - fj.point[1];
                    let r2 = dx * dx + dy * dy;
                    (fj.normal[0] * dx + fj.normal[1] * dy) / (PI * r2)
                };
                row[j] = h * k * fj.speed;
            }
        });

    Ok(OperatorMatrix {
        a,
        weights,
        nodes: NodeGrid::Curve { t },
        shape_label: curve.label().to_string(),
        grid_label: format!("N{n}"),
    })
}

/// 2D single layer matrix with the periodic log-kernel splitting.
///
/// `log|q(s) - q(t)| = 1/2 log(4 sin^2((s-t)/2)) + smooth remainder`; the
/// singular half is integrated with the classical spectral weights, the
/// remainder with the trapezoid rule.
pub struct SlpMatrix {
    pub s: Array2<f64>,
    pub weights: Array1<f64>,
    /// Set when the curve diameter is >= 1 and positivity of S1 is not
    /// guaranteed.
    pub diameter_warning: bool,
}

pub fn slp_matrix_2d(curve: &Curve2D, n: usize) -> Result<SlpMatrix, LayerpotError> {
    if n < 16 || n % 2 != 0 {
        return Err(LayerpotError::InvalidGrid(format!(
            "2D node count must be even and >= 16, got {n}"
        )));
    }
    let diameter_warning = curve.diameter() >= 1.0;
    let h = 2.0 * PI / n as f64;
    let t: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
    let frames: Vec<_> = t.iter().map(|&tj| curve.frame(tj)).collect();
    let r = log_sin_weights(n);

    let mut s = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            // smooth part: 1/2 log(|q(s)-q(t)|^2 / (4 sin^2((s-t)/2)))
            let smooth = if i == j {
                frames[j].speed.ln()
            } else {
                let dx = frames[i].point[0] - frames[j].point[0];
                let dy = frames[i].point[1] - frames[j].point[1];
                let r2 = dx * dx + dy * dy;
                let sin2 = ((t[i] - t[j]) / 2.0).sin().powi(2);
                0.5 * (r2 / (4.0 * sin2)).ln()
            };
            let d = (i + n - j) % n;
            // (S psi)(t_i) = -(1/pi) int log|q(s) - q(t_i)| psi(s) |q'(s)| ds
            s[[i, j]] = -(0.5 * r[d] + h * smooth) * frames[j].speed / PI;
        }
    }

    Ok(SlpMatrix {
        s,
        weights: Array1::from_iter(frames.iter().map(|f| h * f.speed)),
        diameter_warning,
    })
}

/// Applies the single layer potential to a density sampled on the nodes.
pub fn apply_slp_2d(slp: &SlpMatrix, density: &Array1<f64>) -> Array1<f64> {
    slp.s.dot(density)
}

/// Assembles the 3D double layer Nystrom matrix with Gauss-Legendre nodes in
/// `cos theta` and uniform nodes in `phi`.
///
/// The diagonal is the row-sum (Gauss identity) correction:
/// `A_ii = -1 - sum_{j != i} A_ij`, so every row sum is exactly -1.
pub fn assemble_dlp_3d(
    surface: &Surface3D,
    n_theta: usize,
    n_phi: usize,
) -> Result<OperatorMatrix, LayerpotError> {
    if n_theta < 16 || n_phi < 16 {
        return Err(LayerpotError::InvalidGrid(format!(
            "3D grid must be at least 16 x 16, got {n_theta} x {n_phi}"
        )));
    }
    let (gl_nodes, gl_weights) = gauss_legendre(n_theta);
    let h_phi = 2.0 * PI / n_phi as f64;

    let n = n_theta * n_phi;
    let mut theta_phi = Vec::with_capacity(n);
    let mut frames = Vec::with_capacity(n);
    let mut weights = Array1::zeros(n);
    let mut idx = 0;
    for (k, &x) in gl_nodes.iter().enumerate() {
        let theta = x.acos();
        for l in 0..n_phi {
            let phi = h_phi * l as f64;
            let f = surface.frame(theta, phi);
            weights[idx] = gl_weights[k] * h_phi * f.area_element;
            theta_phi.push((theta, phi));
            frames.push(f);
            idx += 1;
        }
    }

    let mut a = Array2::zeros((n, n));
    a.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let xi = frames[i].point;
            let mut off_diag_sum = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let yj = frames[j].point;
                let nj = frames[j].normal;
                let d = [xi[0] - yj[0], xi[1] - yj[1], xi[2] - yj[2]];
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                let v = weights[j] * (d[0] * nj[0] + d[1] * nj[1] + d[2] * nj[2])
                    / (2.0 * PI * r * r * r);
                row[j] = v;
                off_diag_sum += v;
            }
            row[i] = -1.0 - off_diag_sum;
        });

    Ok(OperatorMatrix {
        a,
        weights,
        nodes: NodeGrid::Surface {
            theta_phi,
            n_theta,
            n_phi,
        },
        shape_label: surface.label().to_string(),
        grid_label: format!("{n_theta}x{n_phi}"),
    })
}
