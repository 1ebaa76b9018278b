//! Spectrum post-processing: trace identities, eigenvalue symmetry audits,
//! Weyl inequality checks, decay-rate fits, exact sphere spectra and the
//! odd-zeta lower bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::LayerpotError;
use crate::geometry::Curve2D;
use crate::interp::TrigInterp;
use crate::operators::{assemble_dlp_2d, OperatorMatrix};
use crate::spectral::{schatten_sum, singular_values, Spectrum};

/// Trace summary of a 2D operator.
///
/// `defect = tr(K*K) - 1` is the isoperimetric defect: nonnegative, zero
/// exactly on circles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    pub shape: String,
    pub n: usize,
    /// Sum of the Nystrom diagonal, the discrete `-1/(2 pi) int kappa ds`.
    pub trace_k: f64,
    /// `tr(K*K)` as the Frobenius norm of the symmetrized twin, which is
    /// exactly the discrete double integral of the squared kernel.
    pub trace_kstark_quadrature: f64,
    /// `tr(K*K)` as the sum of squared singular values.
    pub trace_kstark_svd: f64,
    pub defect: f64,
}

pub fn trace_report(curve: &Curve2D, n: usize) -> Result<TraceReport, LayerpotError> {
    let matrix = assemble_dlp_2d(curve, n)?;
    trace_report_from(&matrix)
}

pub fn trace_report_from(matrix: &OperatorMatrix) -> Result<TraceReport, LayerpotError> {
    let trace_k = (0..matrix.dim()).map(|i| matrix.a[[i, i]]).sum();
    let sym = matrix.symmetrized();
    let trace_kstark_quadrature: f64 = sym.iter().map(|v| v * v).sum();
    let sv = singular_values(matrix)?;
    let trace_kstark_svd = schatten_sum(&sv, 2.0)?;
    Ok(TraceReport {
        shape: matrix.shape_label.clone(),
        n: matrix.dim(),
        trace_k,
        trace_kstark_quadrature,
        trace_kstark_svd,
        defect: trace_kstark_svd - 1.0,
    })
}

/// One matched `(lambda, -lambda)` pair in a symmetry audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryPair {
    pub lambda: [f64; 2],
    pub partner: [f64; 2],
    pub mismatch: f64,
}

/// Pairing report for the origin-symmetry of 2D Fredholm eigenvalues.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub pairs: Vec<SymmetryPair>,
    pub worst_mismatch: f64,
}

/// Audits the `sigma_p(K) \ {-1}` symmetry about the origin.
///
/// The constant eigenpair is excluded by eigenvector constancy; the remaining
/// eigenvalues with `|lambda| >= 1e-6` are matched greedily to the partner
/// minimizing `|lambda + mu|`, up to `max_pairs` pairs.
pub fn symmetry_audit(spectrum: &Spectrum, max_pairs: usize) -> SymmetryReport {
    let constant = spectrum.constant_eigenpair();
    let candidates: Vec<usize> = (0..spectrum.len())
        .filter(|&j| Some(j) != constant && spectrum.eigenvalues[j].norm() >= 1e-6)
        .collect();

    let mut used = vec![false; spectrum.len()];
    let mut pairs = Vec::new();
    for &i in &candidates {
        if used[i] || pairs.len() >= max_pairs {
            continue;
        }
        let li = spectrum.eigenvalues[i];
        let best = candidates
            .iter()
            .filter(|&&j| j != i && !used[j])
            .min_by(|&&a, &&b| {
                let da = (li + spectrum.eigenvalues[a]).norm();
                let db = (li + spectrum.eigenvalues[b]).norm();
                da.partial_cmp(&db).unwrap()
            });
        if let Some(&j) = best {
            used[i] = true;
            used[j] = true;
            let lj = spectrum.eigenvalues[j];
            pairs.push(SymmetryPair {
                lambda: [li.re, li.im],
                partner: [lj.re, lj.im],
                mismatch: (li + lj).norm(),
            });
        }
    }
    let worst_mismatch = pairs.iter().map(|p| p.mismatch).fold(0.0, f64::max);
    SymmetryReport {
        pairs,
        worst_mismatch,
    }
}

/// Weyl inequality check for one exponent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylEntry {
    pub r: f64,
    /// `sum |lambda_j|^r`
    pub eigen_sum: f64,
    /// `sum alpha_j^r`
    pub singular_sum: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylReport {
    pub entries: Vec<WeylEntry>,
    /// `max_j j |lambda_j|^2` (1-based), the `lambda_j = o(j^{-1/2})` diagnostic.
    pub decay_diagnostic: f64,
}

/// Asserts `sum |lambda_j|^r <= sum alpha_j^r` for each exponent.
///
/// A violation beyond rounding slack indicates a solver bug and is a hard
/// failure.
pub fn weyl_audit(spectrum: &Spectrum, r_list: &[f64]) -> Result<WeylReport, LayerpotError> {
    let mut entries = Vec::new();
    for &r in r_list {
        let eigen_sum: f64 = spectrum.eigenvalues.iter().map(|z| z.norm().powf(r)).sum();
        let singular_sum = schatten_sum(&spectrum.singular_values, r)?;
        if eigen_sum > singular_sum + 1e-10 * singular_sum.max(1.0) {
            return Err(LayerpotError::SolverFailure(format!(
                "Weyl inequality violated for r={r}: {eigen_sum} > {singular_sum}"
            )));
        }
        entries.push(WeylEntry {
            r,
            eigen_sum,
            singular_sum,
        });
    }
    let decay_diagnostic = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, z)| (j + 1) as f64 * z.norm_sqr())
        .fold(0.0, f64::max);
    Ok(WeylReport {
        entries,
        decay_diagnostic,
    })
}

/// Decay model for [`fit_decay`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `|lambda_j| ~ e^{-c j}`: fit `log|lambda_j|` against `j`.
    Exponential,
    /// `|lambda_j| ~ j^{c}`: fit `log|lambda_j|` against `log j`.
    Power,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    /// Decay rate: `c > 0` for the exponential model (per index step),
    /// the (signed) exponent for the power model.
    pub rate: f64,
    pub r_squared: f64,
    /// 1-based index range and point count of the fit window.
    pub window: (usize, usize, usize),
}

/// Fit window: eigenvalue moduli inside `[1e-12, 1e-1]`, which excludes the
/// -1 eigenvalue and anything at the solver noise floor.
pub const FIT_FLOOR: f64 = 1e-12;
pub const FIT_CAP: f64 = 1e-1;

/// Windowed least-squares fit of eigenvalue decay.
///
/// Multiple eigenvalues of (numerically) equal modulus — the +/- pairs in 2D,
/// the spherical clusters in 3D — are collapsed to a single point at their
/// mean 1-based index, so the fit sees the decay law rather than the
/// multiplicity staircase.
pub fn fit_decay(spectrum: &Spectrum, model: DecayModel) -> Result<DecayFit, LayerpotError> {
    let windowed: Vec<(usize, f64)> = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| (FIT_FLOOR..=FIT_CAP).contains(&z.norm()))
        .map(|(j, z)| (j + 1, z.norm()))
        .collect();
    // collapse runs of equal modulus (relative gap 1e-6)
    let mut clusters: Vec<(f64, f64)> = Vec::new(); // (mean index, modulus)
    let mut run: Vec<(usize, f64)> = Vec::new();
    for &(j, m) in &windowed {
        if let Some(&(_, head)) = run.first() {
            if (head - m).abs() > 1e-6 * head {
                let mean = run.iter().map(|&(i, _)| i as f64).sum::<f64>() / run.len() as f64;
                clusters.push((mean, head));
                run.clear();
            }
        }
        run.push((j, m));
    }
    if let Some(&(_, head)) = run.first() {
        let mean = run.iter().map(|&(i, _)| i as f64).sum::<f64>() / run.len() as f64;
        clusters.push((mean, head));
    }
    let pts: Vec<(f64, f64)> = clusters
        .iter()
        .map(|&(x, m)| match model {
            DecayModel::Exponential => (x, m.ln()),
            DecayModel::Power => (x.ln(), m.ln()),
        })
        .collect();
    if windowed.len() < 8 || pts.len() < 3 {
        return Err(LayerpotError::InvalidArgument(format!(
            "decay fit needs at least 8 eigenvalues in the window, found {}",
            windowed.len()
        )));
    }

    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r_squared = 1.0 - ss_res / ss_tot;

    let first = spectrum
        .eigenvalues
        .iter()
        .position(|z| (FIT_FLOOR..=FIT_CAP).contains(&z.norm()))
        .unwrap()
        + 1;
    let rate = match model {
        DecayModel::Exponential => -slope,
        DecayModel::Power => slope,
    };
    Ok(DecayFit {
        rate,
        r_squared,
        window: (first, first + pts.len() - 1, pts.len()),
    })
}

/// Exact sphere spectrum: eigenvalue `-1/(2l+1)` with multiplicity `2l+1`
/// for `l = 0 ..= lmax`; `(lmax+1)^2` eigenvalues in total.
pub fn sphere_exact_spectrum(lmax: usize) -> Spectrum {
    let mut eigenvalues = Vec::new();
    for l in 0..=lmax {
        let lambda = -1.0 / (2 * l + 1) as f64;
        for _ in 0..(2 * l + 1) {
            eigenvalues.push(Complex64::new(lambda, 0.0));
        }
    }
    let singular_values: Vec<f64> = eigenvalues.iter().map(|z| z.norm()).collect();
    let real_flags = vec![true; eigenvalues.len()];
    Spectrum {
        eigenvalues,
        eigenvectors: None,
        residuals: Vec::new(),
        real_flags,
        singular_values,
        shape_label: "sphere_exact".into(),
        grid_label: format!("lmax{lmax}"),
        solver_ok: true,
    }
}

/// Lower bound `(1 - 2^{-(2p-1)}) zeta(2p-1) = sum_l (2l+1)^{-(2p-1)}` for
/// `p > 1`, by direct summation with an Euler-Maclaurin tail (remainder well
/// below 1e-12).
pub fn zeta_bound(p: f64) -> Result<f64, LayerpotError> {
    if p <= 1.0 {
        return Err(LayerpotError::InvalidArgument(format!(
            "zeta bound needs p > 1 (series diverges), got {p}"
        )));
    }
    let s = 2.0 * p - 1.0;
    let cut: u64 = 200_000;
    let mut sum = 0.0;
    for l in 0..cut {
        sum += (2.0 * l as f64 + 1.0).powf(-s);
    }
    // tail: integral + 1/2 f(L) - f'(L)/12
    let x = 2.0 * cut as f64 + 1.0;
    let tail = x.powf(1.0 - s) / (2.0 * (s - 1.0)) + 0.5 * x.powf(-s) - (2.0 * s) * x.powf(-s - 1.0) / 12.0;
    Ok(sum + tail)
}

/// One eigenpair's `|lambda| ||e||_inf / ||e||_L1` ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormRatio {
    pub lambda: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormRatioReport {
    pub ratios: Vec<NormRatio>,
    /// Empirical constant: max of the ratios.
    pub constant: f64,
}

/// Estimates the L1 -> Linf eigenfunction constant over the real-flagged
/// eigenpairs with `|lambda| >= 1e-8`, using trigonometric interpolation for
/// the sup norm and quadrature for the L1 norm.
pub fn linfty_l1_constant(spectrum: &Spectrum, curve: &Curve2D) -> NormRatioReport {
    let mut ratios = Vec::new();
    let n = spectrum.len();
    let refine = 16 * n;
    let h_fine = 2.0 * std::f64::consts::PI / refine as f64;
    for j in 0..n {
        let lambda = spectrum.eigenvalues[j];
        if !spectrum.real_flags[j] || lambda.norm() < 1e-8 {
            continue;
        }
        let Some(v) = spectrum.real_eigenvector(j) else {
            continue;
        };
        let interp = TrigInterp::new(v.as_slice().unwrap());
        let mut sup = 0.0f64;
        let mut l1 = 0.0;
        for i in 0..refine {
            let t = h_fine * i as f64;
            let e = interp.eval(t);
            sup = sup.max(e.abs());
            l1 += e.abs() * curve.frame(t).speed * h_fine;
        }
        if l1 > 0.0 {
            ratios.push(NormRatio {
                lambda: lambda.re,
                ratio: lambda.norm() * sup / l1,
            });
        }
    }
    let constant = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
    NormRatioReport { ratios, constant }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigenpairs;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn circle_trace_report_is_exact() {
        let c = Curve2D::circle(1.7).unwrap();
        let r = trace_report(&c, 64).unwrap();
        assert_abs_diff_eq!(r.trace_k, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.trace_kstark_svd, 1.0, epsilon = 1e-12);
        assert!(r.defect.abs() <= 1e-12);
    }

    #[test]
    fn ellipse_has_positive_defect_and_consistent_traces() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let r = trace_report(&e, 256).unwrap();
        assert_abs_diff_eq!(r.trace_k, -1.0, epsilon = 1e-10);
        assert!(r.defect > 0.0);
        assert_abs_diff_eq!(
            r.trace_kstark_quadrature,
            r.trace_kstark_svd,
            epsilon = 1e-8
        );
    }

    #[test]
    fn defect_shrinks_towards_the_circle() {
        // the ellipse approaches a circle as R grows; the defect is
        // scale-invariant so no area normalization is needed
        let mut last = f64::INFINITY;
        for r in [0.5, 1.0, 1.5, 2.0] {
            let e = Curve2D::ellipse(2.0, r).unwrap();
            let rep = trace_report(&e, 256).unwrap();
            assert!(rep.defect > 0.0);
            assert!(rep.defect < last, "defect not decreasing at R={r}");
            last = rep.defect;
        }
    }

    #[test]
    fn ellipse_symmetry_audit() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let m = assemble_dlp_2d(&e, 256).unwrap();
        let s = eigenpairs(&m).unwrap();
        let rep = symmetry_audit(&s, 10);
        assert!(rep.pairs.len() >= 5);
        assert!(
            rep.worst_mismatch <= 1e-7,
            "worst mismatch {}",
            rep.worst_mismatch
        );
    }

    #[test]
    fn circle_symmetry_audit_is_vacuous() {
        let c = Curve2D::circle(1.0).unwrap();
        let m = assemble_dlp_2d(&c, 64).unwrap();
        let s = eigenpairs(&m).unwrap();
        let rep = symmetry_audit(&s, 10);
        assert!(rep.pairs.is_empty());
    }

    #[test]
    fn weyl_holds_on_ellipse() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let m = assemble_dlp_2d(&e, 256).unwrap();
        let s = eigenpairs(&m).unwrap();
        let rep = weyl_audit(&s, &[2.0, 4.0]).unwrap();
        for entry in &rep.entries {
            assert!(entry.eigen_sum < entry.singular_sum);
        }
    }

    #[test]
    fn ellipse_exponential_rate_matches_r() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let m = assemble_dlp_2d(&e, 256).unwrap();
        let s = eigenpairs(&m).unwrap();
        let fit = fit_decay(&s, DecayModel::Exponential).unwrap();
        // |lambda_j| = e^{-m R ...}: two eigenvalues per m gives rate R per index
        assert!((fit.rate - 0.5).abs() < 0.025, "rate {}", fit.rate);
        assert!(fit.r_squared >= 0.999);
    }

    #[test]
    fn sphere_exact_power_fit() {
        let s = sphere_exact_spectrum(60);
        let fit = fit_decay(&s, DecayModel::Power).unwrap();
        assert!(
            (fit.rate + 0.5).abs() < 0.05,
            "power exponent {} not near -1/2",
            fit.rate
        );
    }

    #[test]
    fn sphere_exact_counts() {
        let s = sphere_exact_spectrum(1);
        let expect = [-1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (z, e) in s.eigenvalues.iter().zip(expect) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
        }
        let s2 = sphere_exact_spectrum(2);
        assert_eq!(s2.len(), 9);
        assert_eq!(
            s2.eigenvalues.iter().filter(|z| (z.re + 0.2).abs() < 1e-12).count(),
            5
        );
        for lmax in [3usize, 7] {
            assert_eq!(sphere_exact_spectrum(lmax).len(), (lmax + 1) * (lmax + 1));
        }
    }

    #[test]
    fn zeta_bound_reference_values() {
        // (3/4) zeta(2) = pi^2 / 8
        assert_abs_diff_eq!(zeta_bound(1.5).unwrap(), PI * PI / 8.0, epsilon = 1e-12);
        // (7/8) zeta(3)
        assert_abs_diff_eq!(zeta_bound(2.0).unwrap(), 1.0518_f64, epsilon = 1e-4);
        // large p: only the l = 0 term survives
        assert_abs_diff_eq!(zeta_bound(20.0).unwrap(), 1.0, epsilon = 1e-11);
        assert!(zeta_bound(1.0).is_err());
    }

    #[test]
    fn exact_sphere_schatten_partial_sums_increase_to_zeta_bound() {
        let target = zeta_bound(2.0).unwrap();
        let mut last = 0.0;
        for lmax in [5, 10, 20, 40] {
            let s = sphere_exact_spectrum(lmax);
            let sum = schatten_sum(&s.singular_values, 4.0).unwrap();
            assert!(sum > last);
            assert!(sum < target);
            last = sum;
        }
        assert!((target - last) < 1e-3);
    }

    #[test]
    fn circle_constant_eigenfunction_ratio() {
        let c = Curve2D::circle(1.0).unwrap();
        let m = assemble_dlp_2d(&c, 64).unwrap();
        let s = eigenpairs(&m).unwrap();
        let rep = linfty_l1_constant(&s, &c);
        // only the constant eigenpair survives the |lambda| threshold;
        // its ratio is 1/(2 pi R)
        assert_eq!(rep.ratios.len(), 1);
        assert_abs_diff_eq!(rep.constant, 1.0 / (2.0 * PI), epsilon = 1e-10);
    }

    #[test]
    fn ellipse_norm_constant_stable_under_refinement() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let c128 = {
            let m = assemble_dlp_2d(&e, 128).unwrap();
            linfty_l1_constant(&eigenpairs(&m).unwrap(), &e).constant
        };
        let c256 = {
            let m = assemble_dlp_2d(&e, 256).unwrap();
            linfty_l1_constant(&eigenpairs(&m).unwrap(), &e).constant
        };
        assert!((c128 - c256).abs() / c256 < 0.05);
    }
}
