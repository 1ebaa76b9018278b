//! Eigenfunction post-processing: nodal counting on the boundary,
//! holomorphic continuation into the complexified parameter annulus,
//! argument-principle zero counts, sign and S-orthogonality checks.

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::LayerpotError;
use crate::geometry::Curve2D;
use crate::interp::TrigInterp;
use crate::operators::{apply_slp_2d, slp_matrix_2d};

/// Default half-width of the complexified parameter strip.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// A real eigenfunction sampled on the uniform node grid, normalized so that
/// `||e||_{L2(boundary)} = 2 pi`.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    pub lambda: f64,
    /// Node samples, `values[j] = e(2 pi j / n)`.
    pub values: Array1<f64>,
    /// Whether L2 normalization to 2 pi succeeded (requires the curve weights).
    pub normalized: bool,
}

impl Eigenfunction {
    /// Wraps raw node samples, rescaling to `||e||_{L2} = 2 pi` with the
    /// quadrature weights `w_j = h |q'(t_j)|` of the curve.
    pub fn new(
        lambda: f64,
        samples: &Array1<f64>,
        curve: &Curve2D,
    ) -> Result<Self, LayerpotError> {
        let n = samples.len();
        let h = 2.0 * PI / n as f64;
        let l2sq: f64 = samples
            .iter()
            .enumerate()
            .map(|(j, &v)| h * curve.frame(h * j as f64).speed * v * v)
            .sum();
        if l2sq.sqrt() < 1e-14 {
            return Err(LayerpotError::InvalidArgument(
                "eigenvector is numerically zero".into(),
            ));
        }
        let scale = 2.0 * PI / l2sq.sqrt();
        Ok(Eigenfunction {
            lambda,
            values: samples.mapv(|v| v * scale),
            normalized: true,
        })
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }
}

/// Counts real zeros of the eigenfunction as sign changes of its
/// trigonometric interpolant on a 16x refined grid.
///
/// Samples below `1e-9 * ||e||_inf` are treated as ambiguous and skipped, so
/// a zero touched without crossing does not produce a spurious pair.
pub fn nodal_count(eigenfunction: &Eigenfunction) -> Result<usize, LayerpotError> {
    let n = eigenfunction.node_count();
    let interp = TrigInterp::new(eigenfunction.values.as_slice().unwrap());
    let fine = interp.refine(16 * n);
    let sup = fine.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if sup < 1e-14 {
        return Err(LayerpotError::InvalidArgument(
            "eigenfunction is numerically zero".into(),
        ));
    }
    let threshold = 1e-9 * sup;
    let signs: Vec<i8> = fine
        .iter()
        .filter(|v| v.abs() > threshold)
        .map(|v| if *v > 0.0 { 1 } else { -1 })
        .collect();
    if signs.is_empty() {
        return Err(LayerpotError::InvalidArgument(
            "eigenfunction has no unambiguous samples".into(),
        ));
    }
    let mut count = 0;
    for k in 0..signs.len() {
        if signs[k] != signs[(k + 1) % signs.len()] {
            count += 1;
        }
    }
    Ok(count)
}

/// Checks that the strip continuation `q^C` is usable at half-width `eps`:
/// nonvanishing derivative and injectivity on each horizontal contour.
pub fn annulus_valid(curve: &Curve2D, eps: f64) -> bool {
    let n = 512;
    for im in [-eps, 0.0, eps] {
        let pts: Vec<Complex64> = (0..n)
            .map(|j| {
                let t = Complex64::new(2.0 * PI * j as f64 / n as f64, im);
                curve.q_complex(t)
            })
            .collect();
        let min_dq = (0..n)
            .map(|j| {
                let t = Complex64::new(2.0 * PI * j as f64 / n as f64, im);
                curve.dq_complex(t).norm()
            })
            .fold(f64::INFINITY, f64::min);
        if min_dq < 1e-8 {
            return false;
        }
        // crude injectivity: image points on the contour stay distinct
        let spacing = 2.0 * PI / n as f64 * min_dq;
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if (pts[i] - pts[j]).norm() < 0.1 * spacing {
                    return false;
                }
            }
        }
    }
    true
}

/// Holomorphic continuation of an eigenfunction to the parameter strip, via
/// the contour representation of `K e` divided by `lambda`.
///
/// Requires `|lambda| >= 1e-8` and `|Im t| <= eps` with a validated strip.
pub fn holomorphic_extension(
    eigenfunction: &Eigenfunction,
    curve: &Curve2D,
    t: Complex64,
    eps: f64,
) -> Result<Complex64, LayerpotError> {
    if eigenfunction.lambda.abs() < 1e-8 {
        return Err(LayerpotError::InvalidArgument(
            "holomorphic extension undefined for lambda ~ 0".into(),
        ));
    }
    if t.im.abs() > eps {
        return Err(LayerpotError::InvalidArgument(format!(
            "parameter Im t = {} outside the strip |Im t| <= {eps}",
            t.im
        )));
    }
    let n = eigenfunction.node_count();
    let h = 2.0 * PI / n as f64;
    let qc = curve.q_complex(t);
    let qcs = curve.q_star_complex(t);
    let mut integral = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let s = h * j as f64;
        let sc = Complex64::new(s, 0.0);
        let q = curve.q_complex(sc);
        let dq = curve.dq_complex(sc);
        // bracket sign matches the outward-normal convention of the kernel
        let term = dq.conj() / (q.conj() - qcs) - dq / (q - qc);
        integral += eigenfunction.values[j] * term * h;
    }
    Ok(integral / (Complex64::new(0.0, 2.0 * PI) * eigenfunction.lambda))
}

/// Zero count of the continued eigenfunction inside the strip
/// `[0, 2 pi] + i [-eps/2, eps/2]`, by the argument principle.
///
/// The continuation is evaluated through the trigonometric interpolant of the
/// node samples; by uniqueness of analytic continuation this agrees with the
/// contour-formula extension wherever the latter is defined, and it also
/// covers mean-zero densities in the null space.
///
/// The winding is summed over the two horizontal contours (the vertical
/// edges cancel by periodicity), with the phase sampling refined until every
/// increment is below pi/2. A contour sample falling on a near-zero of the
/// function nudges `eps` by 10% and retries, up to 3 times.
pub fn annulus_zero_count(
    eigenfunction: &Eigenfunction,
    curve: &Curve2D,
    eps: f64,
) -> Result<usize, LayerpotError> {
    if !annulus_valid(curve, eps) {
        return Err(LayerpotError::InvalidArgument(format!(
            "strip half-width {eps} is not valid for this curve"
        )));
    }
    let interp = TrigInterp::new(eigenfunction.values.as_slice().unwrap());
    let mut eps_try = eps;
    let mut last_err = None;
    for attempt in 0..4 {
        match winding_count(&interp, eigenfunction.node_count(), eps_try) {
            Ok(c) => return Ok(c),
            Err(e) => {
                last_err = Some(e);
                // alternate nudging down and up
                let sign = if attempt % 2 == 0 { -1.0 } else { 1.0 };
                eps_try = eps * (1.0 + sign * 0.1 * (attempt / 2 + 1) as f64);
            }
        }
    }
    Err(last_err.unwrap())
}

fn winding_count(
    interp: &TrigInterp,
    n: usize,
    eps: f64,
) -> Result<usize, LayerpotError> {
    let half = eps / 2.0;
    let w_bottom = contour_winding(interp, n, -half)?;
    let w_top = contour_winding(interp, n, half)?;
    let zeros = w_bottom - w_top;
    if zeros < 0 {
        return Err(LayerpotError::SolverFailure(format!(
            "negative winding count {zeros}: contour passed too close to a zero"
        )));
    }
    Ok(zeros as usize)
}

/// Winding number of the continued eigenfunction along `Im t = level`,
/// traversed left to right, by adaptive phase-increment summation.
fn contour_winding(interp: &TrigInterp, n: usize, level: f64) -> Result<i64, LayerpotError> {
    let mut m = 4 * n;
    loop {
        let f: Vec<Complex64> = (0..m)
            .map(|k| interp.eval_complex(Complex64::new(2.0 * PI * k as f64 / m as f64, level)))
            .collect();
        let sup = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if f.iter().any(|z| z.norm() <= 1e-12 * sup) {
            return Err(LayerpotError::SolverFailure(
                "contour sample too close to a zero".into(),
            ));
        }
        let mut total = 0.0;
        let mut ok = true;
        for k in 0..m {
            let inc = (f[(k + 1) % m] / f[k]).arg();
            if inc.abs() >= PI / 2.0 {
                ok = false;
                break;
            }
            total += inc;
        }
        if ok {
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        m *= 2;
        if m > 1 << 18 {
            return Err(LayerpotError::SolverFailure(
                "phase increments did not refine below pi/2".into(),
            ));
        }
    }
}

/// Per-eigenpair nodal data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodalReport {
    pub lambda: f64,
    pub real_zeros: usize,
    pub annulus_zeros: usize,
    /// `real_zeros / |log|lambda||`.
    pub ratio: f64,
    pub epsilon: f64,
    pub normalized: bool,
}

/// Nodal-law summary over a set of eigenpairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodalBoundReport {
    pub rows: Vec<NodalReport>,
    /// Empirical constant: running max of the ratios.
    pub empirical_constant: f64,
    /// Set when the ratios grow along the (decaying) spectrum, which would
    /// contradict the logarithmic law.
    pub super_logarithmic: bool,
}

/// Builds per-pair nodal reports and the empirical `C` of the
/// `zeros < C |log|lambda||` law.
pub fn nodal_bound_report(
    eigenfunctions: &[Eigenfunction],
    curve: &Curve2D,
    eps: f64,
) -> Result<NodalBoundReport, LayerpotError> {
    if eigenfunctions.len() < 3 {
        return Err(LayerpotError::InvalidArgument(
            "nodal bound report needs at least 3 eigenpairs".into(),
        ));
    }
    let mut rows = Vec::new();
    for ef in eigenfunctions {
        let real_zeros = nodal_count(ef)?;
        let annulus_zeros = annulus_zero_count(ef, curve, eps)?;
        let log_lambda = ef.lambda.abs().ln().abs();
        rows.push(NodalReport {
            lambda: ef.lambda,
            real_zeros,
            annulus_zeros,
            ratio: real_zeros as f64 / log_lambda,
            epsilon: eps,
            normalized: ef.normalized,
        });
    }
    let empirical_constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    // growth flag: the smallest-|lambda| pair should not dominate the ratios
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| b.lambda.abs().partial_cmp(&a.lambda.abs()).unwrap());
    let first_half_max = sorted[..sorted.len() / 2 + 1]
        .iter()
        .map(|r| r.ratio)
        .fold(0.0, f64::max);
    let super_logarithmic = sorted.last().unwrap().ratio > 1.5 * first_half_max;
    Ok(NodalBoundReport {
        rows,
        empirical_constant,
        super_logarithmic,
    })
}

/// Sign-change and S-weighted orthogonality data for one eigenpair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignOrthogonalityReport {
    pub lambda: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// Whether the eigenfunction attains both signs.
    pub changes_sign: bool,
    /// `|<e, S^{-1}1>| / (||e|| ||S^{-1}1||)` on the diameter-0.9 rescaling.
    ///
    /// `S^{-1}1` spans the orthogonal complement of the non-constant
    /// eigenspace: the Calderon identity `S K^adj = K S` makes the adjoint
    /// eigenfunctions `S^{-1} e_lambda`, and biorthogonality against the
    /// constant pair gives `<e_lambda, S^{-1}1> = 0` for `lambda != -1`.
    /// (Pairing against `S1` itself only vanishes for one parity class.)
    pub s_orthogonality: f64,
    /// Set when S1 failed to be positive somewhere (should not happen after
    /// the rescale).
    pub s1_positive: bool,
}

/// Checks Theorem-3.1-style sign behaviour and the single-layer-weighted
/// orthogonality to the constant pair for `lambda != -1`.
///
/// The curve is rescaled to diameter 0.9 before building S; eigenfunctions of
/// K are scale-invariant so the node samples carry over unchanged.
pub fn sign_and_orthogonality_check(
    eigenfunction: &Eigenfunction,
    curve: &Curve2D,
) -> Result<SignOrthogonalityReport, LayerpotError> {
    use ndarray_linalg::Solve;
    let n = eigenfunction.node_count();
    let scale = 0.9 / curve.diameter();
    let rescaled = curve.scaled(scale)?;
    let slp = slp_matrix_2d(&rescaled, n)?;
    let ones = Array1::ones(n);
    let s1 = apply_slp_2d(&slp, &ones);
    let s1_positive = s1.iter().all(|&v| v > 0.0);
    let sinv1 = slp
        .s
        .solve(&ones)
        .map_err(|e| LayerpotError::SolverFailure(format!("single layer solve: {e}")))?;

    let w = &slp.weights;
    let e = &eigenfunction.values;
    let inner: f64 = (0..n).map(|j| w[j] * e[j] * sinv1[j]).sum();
    let norm_e: f64 = (0..n).map(|j| w[j] * e[j] * e[j]).sum::<f64>().sqrt();
    let norm_s1: f64 = (0..n).map(|j| w[j] * sinv1[j] * sinv1[j]).sum::<f64>().sqrt();

    let min_value = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_value = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(SignOrthogonalityReport {
        lambda: eigenfunction.lambda,
        min_value,
        max_value,
        changes_sign: min_value < 0.0 && max_value > 0.0,
        s_orthogonality: inner.abs() / (norm_e * norm_s1),
        s1_positive,
    })
}

/// Extracts the real-flagged eigenfunctions with `|lambda| >= floor` from a
/// spectrum, excluding the constant pair, normalized for nodal work.
pub fn real_eigenfunctions(
    spectrum: &crate::spectral::Spectrum,
    curve: &Curve2D,
    floor: f64,
) -> Vec<Eigenfunction> {
    let constant = spectrum.constant_eigenpair();
    let mut out = Vec::new();
    for j in 0..spectrum.len() {
        if Some(j) == constant
            || !spectrum.real_flags[j]
            || spectrum.eigenvalues[j].norm() < floor
        {
            continue;
        }
        if let Some(v) = spectrum.real_eigenvector(j) {
            if let Ok(ef) = Eigenfunction::new(spectrum.eigenvalues[j].re, &v, curve) {
                out.push(ef);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::assemble_dlp_2d;
    use crate::spectral::eigenpairs;
    use approx::assert_abs_diff_eq;

    fn synthetic(curve: &Curve2D, n: usize, f: impl Fn(f64) -> f64, lambda: f64) -> Eigenfunction {
        let samples = Array1::from_iter((0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)));
        Eigenfunction::new(lambda, &samples, curve).unwrap()
    }

    #[test]
    fn constant_function_has_no_zeros() {
        let c = Curve2D::circle(1.0).unwrap();
        let ef = synthetic(&c, 64, |_| 1.0, -1.0);
        assert_eq!(nodal_count(&ef).unwrap(), 0);
        assert_eq!(annulus_zero_count(&ef, &c, 0.1).unwrap(), 0);
    }

    #[test]
    fn cosine_zero_counts() {
        let c = Curve2D::circle(1.0).unwrap();
        for k in [1usize, 3, 5] {
            let ef = synthetic(&c, 64, |t| (k as f64 * t).cos(), 0.5);
            assert_eq!(nodal_count(&ef).unwrap(), 2 * k, "cos({k}t)");
            assert_eq!(annulus_zero_count(&ef, &c, 0.1).unwrap(), 2 * k);
        }
    }

    #[test]
    fn normalization_is_l2_two_pi() {
        let c = Curve2D::circle(1.0).unwrap();
        let ef = synthetic(&c, 64, |t| 3.0 * t.cos(), 0.5);
        let h = 2.0 * PI / 64.0;
        let l2: f64 = ef
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| h * c.frame(h * j as f64).speed * v * v)
            .sum::<f64>()
            .sqrt();
        assert_abs_diff_eq!(l2, 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn rejects_zero_eigenvector() {
        let c = Curve2D::circle(1.0).unwrap();
        let zeros = Array1::zeros(64);
        assert!(Eigenfunction::new(0.5, &zeros, &c).is_err());
    }

    #[test]
    fn extension_of_constant_is_one() {
        let c = Curve2D::circle(1.0).unwrap();
        let raw = Eigenfunction {
            lambda: -1.0,
            values: Array1::ones(64),
            normalized: false,
        };
        for (re, im) in [(0.7, 0.03), (3.0, -0.04), (5.5, 0.0)] {
            let v = holomorphic_extension(&raw, &c, Complex64::new(re, im), 0.1).unwrap();
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-10);
        }
        // normalization just rescales the extension
        let ef = synthetic(&c, 64, |_| 1.0, -1.0);
        let v = holomorphic_extension(&ef, &c, Complex64::new(1.2, 0.05), 0.1).unwrap();
        assert_abs_diff_eq!(v.re, ef.values[0], epsilon = 1e-9);
    }

    #[test]
    fn circle_complexified_chord_identity() {
        // r^2(s, t) = 4 sin^2((theta - s + i xi) / 2) on the unit circle
        let c = Curve2D::circle(1.0).unwrap();
        let s = 0.8;
        let t = Complex64::new(2.1, 0.05);
        let q_s = c.q_complex(Complex64::new(s, 0.0));
        let r2 = (q_s - c.q_complex(t)) * (q_s.conj() - c.q_star_complex(t));
        let half = (Complex64::new(t.re - s, t.im)) / 2.0;
        let expect = 4.0 * half.sin() * half.sin();
        assert_abs_diff_eq!(r2.re, expect.re, epsilon = 1e-12);
        assert_abs_diff_eq!(r2.im, expect.im, epsilon = 1e-12);
    }

    #[test]
    fn extension_rejects_bad_arguments() {
        let c = Curve2D::circle(1.0).unwrap();
        let ef = synthetic(&c, 64, |_| 1.0, -1.0);
        assert!(holomorphic_extension(&ef, &c, Complex64::new(0.0, 0.3), 0.1).is_err());
        let ef0 = synthetic(&c, 64, |t| t.cos(), 1e-12);
        assert!(holomorphic_extension(&ef0, &c, Complex64::new(0.0, 0.0), 0.1).is_err());
    }

    #[test]
    fn annulus_is_valid_for_analytic_shapes() {
        assert!(annulus_valid(&Curve2D::circle(1.0).unwrap(), 0.1));
        assert!(annulus_valid(&Curve2D::ellipse(2.0, 0.5).unwrap(), 0.1));
    }

    #[test]
    fn ellipse_eigenfunction_extension_matches_interpolant() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let m = assemble_dlp_2d(&e, 256).unwrap();
        let spec = eigenpairs(&m).unwrap();
        let efs = real_eigenfunctions(&spec, &e, 1e-2);
        let target = (-1.0f64).exp();
        let ef = efs
            .iter()
            .find(|f| (f.lambda - target).abs() < 1e-6)
            .expect("lambda = e^{-2R} eigenpair");
        let interp = TrigInterp::new(ef.values.as_slice().unwrap());
        for j in 0..32 {
            let t = 2.0 * PI * j as f64 / 32.0 + 0.013;
            let ext = holomorphic_extension(ef, &e, Complex64::new(t, 0.0), 0.1).unwrap();
            assert!((ext.re - interp.eval(t)).abs() < 1e-6, "t={t}");
            assert!(ext.im.abs() < 1e-6);
        }
    }

    #[test]
    fn ellipse_nodal_counts_match_pair_index() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let m = assemble_dlp_2d(&e, 256).unwrap();
        let spec = eigenpairs(&m).unwrap();
        let efs = real_eigenfunctions(&spec, &e, 1e-4);
        for m_idx in 1..=3usize {
            for sign in [1.0, -1.0] {
                let target = sign * (-(m_idx as f64)).exp();
                let ef = efs
                    .iter()
                    .find(|f| (f.lambda - target).abs() < 1e-6)
                    .expect("known eigenvalue");
                assert_eq!(nodal_count(ef).unwrap(), 2 * m_idx, "lambda={target}");
            }
        }
    }

    #[test]
    fn sign_and_orthogonality_on_ellipse() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let m = assemble_dlp_2d(&e, 256).unwrap();
        let spec = eigenpairs(&m).unwrap();
        let efs = real_eigenfunctions(&spec, &e, 1e-6);
        let target = (-1.0f64).exp();
        let ef = efs
            .iter()
            .find(|f| (f.lambda - target).abs() < 1e-6)
            .unwrap();
        let rep = sign_and_orthogonality_check(ef, &e).unwrap();
        assert!(rep.changes_sign);
        assert!(rep.s1_positive);
        assert!(rep.s_orthogonality <= 1e-6, "got {}", rep.s_orthogonality);
    }

    #[test]
    fn constant_is_exempt_from_orthogonality() {
        let c = Curve2D::circle(1.0).unwrap();
        let ef = synthetic(&c, 64, |_| 1.0, -1.0);
        let rep = sign_and_orthogonality_check(&ef, &c).unwrap();
        assert!(!rep.changes_sign);
        assert!(rep.s1_positive);
        // <1, S1> is genuinely nonzero for the constant pair
        assert!(rep.s_orthogonality > 0.1);
    }
}
