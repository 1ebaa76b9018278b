//! Parameter sweeps over curve and ellipsoid families: eigenvalue floors,
//! Martensen cluster sums, Schatten minimization targets, positive-eigenvalue
//! searches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

use crate::analysis::{trace_report, zeta_bound};
use crate::error::LayerpotError;
use crate::geometry::{Curve2D, Surface3D};
use crate::operators::{assemble_dlp_2d, assemble_dlp_3d};
use crate::spectral::{eigenpairs, schatten_sum, singular_values, Spectrum};

/// One Martensen cluster: the `2l+1` eigenvalues nearest `-1/(2l+1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterSum {
    pub l: usize,
    pub eigenvalues: Vec<f64>,
    pub sum: f64,
    /// Set when the gap to the nearest unclaimed eigenvalue is smaller than
    /// the intra-cluster spread, so the greedy grouping is unreliable.
    pub overlap_warning: bool,
}

/// Groups eigenvalues into spherical-harmonic clusters for `l = 0..=lmax`.
///
/// Greedy by proximity to `-1/(2l+1)` without reuse; intended for
/// near-spherical ellipsoids (axis ratio at most 1.5) where the clusters stay
/// separated.
pub fn ellipsoid_cluster_sums(
    spectrum: &Spectrum,
    lmax: usize,
) -> Result<Vec<ClusterSum>, LayerpotError> {
    let needed: usize = (0..=lmax).map(|l| 2 * l + 1).sum();
    if spectrum.len() < needed {
        return Err(LayerpotError::InvalidArgument(format!(
            "need at least {needed} eigenvalues for lmax = {lmax}"
        )));
    }
    let reals: Vec<f64> = spectrum.eigenvalues.iter().map(|z| z.re).collect();
    let mut used = vec![false; reals.len()];
    let mut out = Vec::new();
    for l in 0..=lmax {
        let target = -1.0 / (2 * l + 1) as f64;
        let mut picked = Vec::new();
        for _ in 0..(2 * l + 1) {
            let j = (0..reals.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| {
                    (reals[a] - target)
                        .abs()
                        .partial_cmp(&(reals[b] - target).abs())
                        .unwrap()
                })
                .unwrap();
            used[j] = true;
            picked.push(reals[j]);
        }
        picked.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let spread = picked.last().unwrap() - picked.first().unwrap();
        let gap = (0..reals.len())
            .filter(|&j| !used[j])
            .map(|j| {
                picked
                    .iter()
                    .map(|&v| (reals[j] - v).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min);
        out.push(ClusterSum {
            l,
            sum: picked.iter().sum(),
            eigenvalues: picked,
            overlap_warning: gap < spread,
        });
    }
    Ok(out)
}

/// Minimum eigenvalue after excluding the constant-eigenvector pair at -1.
///
/// Returns `Ok(None)` when nothing else of modulus above 1e-6 remains (for
/// instance the circle, whose spectrum is just {-1, 0}).
pub fn lambda_floor(spectrum: &Spectrum) -> Result<Option<f64>, LayerpotError> {
    let constant = spectrum.constant_eigenpair().ok_or_else(|| {
        LayerpotError::SolverFailure(
            "constant eigenvector not found; discretization too coarse".into(),
        )
    })?;
    let floor = (0..spectrum.len())
        .filter(|&j| j != constant && spectrum.real_flags[j] && spectrum.eigenvalues[j].norm() > 1e-6)
        .map(|j| spectrum.eigenvalues[j].re)
        .fold(f64::INFINITY, f64::min);
    if floor.is_finite() {
        Ok(Some(floor))
    } else {
        Ok(None)
    }
}

/// One sweep result; 2D rows fill `defect`, 3D rows fill the Schatten and
/// cluster columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    /// `shape@grid`, the resume key.
    pub key: String,
    pub shape: String,
    pub grid: String,
    pub lambda_floor: Option<f64>,
    pub lambda_max: f64,
    pub defect: Option<f64>,
    pub schatten: Option<f64>,
    pub cluster_sum_l0: Option<f64>,
    pub cluster_sum_l1: Option<f64>,
    pub cluster_sum_l2: Option<f64>,
    pub cluster_warning: bool,
}

/// Sweep summary over an ellipsoid grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub argmax_lambda_floor: String,
    pub min_schatten: String,
    pub min_schatten_value: f64,
    pub zeta_target: f64,
    pub pass_flags: SweepPassFlags,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPassFlags {
    pub argmax_at_sphere: bool,
    pub min_schatten_at_sphere: bool,
    /// Min Schatten sum within 5% of the zeta target.
    pub schatten_near_zeta: bool,
    /// Every non-sphere row has a floor strictly below -1/3.
    pub nonsphere_below_third: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub summary: Option<SweepSummary>,
}

fn ellipsoid_label(b: f64, c: f64) -> String {
    format!("ellipsoid(1,{b},{c})")
}

fn load_ledger(path: &Path) -> Result<HashMap<String, SweepRow>, LayerpotError> {
    let mut out = HashMap::new();
    if path.exists() {
        let mut rdr = csv::Reader::from_path(path)?;
        for row in rdr.deserialize::<SweepRow>() {
            let row = row?;
            out.insert(row.key.clone(), row);
        }
    }
    Ok(out)
}

fn append_ledger(path: &Path, rows: &[SweepRow], had_any: bool) -> Result<(), LayerpotError> {
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(!had_any)
        .from_writer(file);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn ellipsoid_row(b: f64, c: f64, p: f64, n_theta: usize, n_phi: usize) -> Result<SweepRow, LayerpotError> {
    let grid = format!("{n_theta}x{n_phi}");
    let shape = ellipsoid_label(b, c);
    let surf = Surface3D::ellipsoid(1.0, b, c)?;
    let m = assemble_dlp_3d(&surf, n_theta, n_phi)?;
    let spec = eigenpairs(&m)?;
    let floor = lambda_floor(&spec)?;
    let lambda_max = spec.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let sv = singular_values(&m)?;
    let schatten = schatten_sum(&sv, 2.0 * p)?;
    let clusters = ellipsoid_cluster_sums(&spec, 2)?;
    Ok(SweepRow {
        key: format!("{shape}@{grid}"),
        shape,
        grid,
        lambda_floor: floor,
        lambda_max,
        defect: None,
        schatten: Some(schatten),
        cluster_sum_l0: Some(clusters[0].sum),
        cluster_sum_l1: Some(clusters[1].sum),
        cluster_sum_l2: Some(clusters[2].sum),
        cluster_warning: clusters.iter().any(|c| c.overlap_warning),
    })
}

/// Sweeps ellipsoids `(1, b, c)`; rows already present in the ledger file are
/// reused, new rows are appended as they complete.
pub fn sweep_ellipsoids(
    axes: &[(f64, f64)],
    p: f64,
    n_theta: usize,
    n_phi: usize,
    ledger: Option<&Path>,
) -> Result<Sweep, LayerpotError> {
    if p <= 1.0 {
        return Err(LayerpotError::InvalidArgument(
            "Schatten exponent p must exceed 1".into(),
        ));
    }
    let existing = match ledger {
        Some(path) => load_ledger(path)?,
        None => HashMap::new(),
    };
    let had_any = !existing.is_empty();
    let grid = format!("{n_theta}x{n_phi}");

    // dedupe by unordered axis pair: (1,b,c) and (1,c,b) are congruent
    let mut seen = std::collections::HashSet::new();
    let mut jobs: Vec<(f64, f64)> = Vec::new();
    for &(b, c) in axes {
        let (lo, hi) = if b <= c { (b, c) } else { (c, b) };
        if seen.insert(format!("{lo:.6}:{hi:.6}")) {
            jobs.push((lo, hi));
        }
    }

    let todo: Vec<(f64, f64)> = jobs
        .iter()
        .filter(|(b, c)| !existing.contains_key(&format!("{}@{grid}", ellipsoid_label(*b, *c))))
        .cloned()
        .collect();
    let fresh: Vec<SweepRow> = todo
        .par_iter()
        .map(|&(b, c)| ellipsoid_row(b, c, p, n_theta, n_phi))
        .collect::<Result<_, _>>()?;
    if let Some(path) = ledger {
        append_ledger(path, &fresh, had_any)?;
    }

    let by_key: HashMap<String, SweepRow> = existing
        .into_iter()
        .chain(fresh.into_iter().map(|r| (r.key.clone(), r)))
        .collect();
    let rows: Vec<SweepRow> = jobs
        .iter()
        .map(|(b, c)| by_key[&format!("{}@{grid}", ellipsoid_label(*b, *c))].clone())
        .collect();

    let summary = summarize_ellipsoids(&rows, p);
    Ok(Sweep { rows, summary: Some(summary) })
}

fn summarize_ellipsoids(rows: &[SweepRow], p: f64) -> SweepSummary {
    let is_sphere = |r: &SweepRow| r.shape == ellipsoid_label(1.0, 1.0);
    let argmax = rows
        .iter()
        .filter(|r| r.lambda_floor.is_some())
        .max_by(|a, b| {
            a.lambda_floor
                .unwrap()
                .partial_cmp(&b.lambda_floor.unwrap())
                .unwrap()
        })
        .expect("nonempty sweep");
    let min_s = rows
        .iter()
        .filter(|r| r.schatten.is_some())
        .min_by(|a, b| a.schatten.unwrap().partial_cmp(&b.schatten.unwrap()).unwrap())
        .expect("nonempty sweep");
    let zeta_target = zeta_bound(2.0 * p - 1.0).unwrap_or(f64::NAN);
    let min_schatten_value = min_s.schatten.unwrap();
    SweepSummary {
        argmax_lambda_floor: argmax.shape.clone(),
        min_schatten: min_s.shape.clone(),
        min_schatten_value,
        zeta_target,
        pass_flags: SweepPassFlags {
            argmax_at_sphere: is_sphere(argmax),
            min_schatten_at_sphere: is_sphere(min_s),
            schatten_near_zeta: (min_schatten_value - zeta_target).abs() <= 0.05 * zeta_target,
            nonsphere_below_third: rows
                .iter()
                .filter(|r| !is_sphere(r))
                .all(|r| r.lambda_floor.map_or(false, |f| f < -1.0 / 3.0)),
        },
    }
}

/// Sweeps ellipses of fixed focal parameter `c` over the radii `rs`, tracking
/// the trace defect toward the circle limit.
pub fn sweep_ellipses(
    rs: &[f64],
    c: f64,
    n: usize,
    ledger: Option<&Path>,
) -> Result<Sweep, LayerpotError> {
    let existing = match ledger {
        Some(path) => load_ledger(path)?,
        None => HashMap::new(),
    };
    let had_any = !existing.is_empty();
    let mut fresh = Vec::new();
    let mut rows = Vec::new();
    for &r in rs {
        let shape = format!("ellipse({c},{r})");
        let key = format!("{shape}@{n}");
        if let Some(row) = existing.get(&key) {
            rows.push(row.clone());
            continue;
        }
        let curve = Curve2D::ellipse(c, r)?;
        let m = assemble_dlp_2d(&curve, n)?;
        let spec = eigenpairs(&m)?;
        let report = trace_report(&curve, n)?;
        let floor = lambda_floor(&spec)?;
        let lambda_max = spec.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let row = SweepRow {
            key,
            shape,
            grid: n.to_string(),
            lambda_floor: floor,
            lambda_max,
            defect: Some(report.defect),
            schatten: None,
            cluster_sum_l0: None,
            cluster_sum_l1: None,
            cluster_sum_l2: None,
            cluster_warning: false,
        };
        fresh.push(row.clone());
        rows.push(row);
    }
    if let Some(path) = ledger {
        append_ledger(path, &fresh, had_any)?;
    }
    Ok(Sweep { rows, summary: None })
}

/// Eigenvalues above 1e-3 found on a family of spheroids `(1, 1, c)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositiveFinding {
    pub aspect: f64,
    pub positive_eigenvalues: Vec<f64>,
}

/// Grid-scale roughness of an eigenvector on the theta-phi grid: max of the
/// relative one-step differences along each direction, normalized to [0, 1].
fn mode_roughness(
    v: ndarray::ArrayView1<num_complex::Complex64>,
    n_theta: usize,
    n_phi: usize,
) -> f64 {
    let mut dphi = 0.0f64;
    let mut dtheta = 0.0f64;
    let mut norm = 0.0f64;
    for it in 0..n_theta {
        for ip in 0..n_phi {
            let a = v[it * n_phi + ip];
            dphi += (a - v[it * n_phi + (ip + 1) % n_phi]).norm_sqr();
            if it + 1 < n_theta {
                dtheta += (a - v[(it + 1) * n_phi + ip]).norm_sqr();
            }
            norm += a.norm_sqr();
        }
    }
    (dphi.max(dtheta) / norm).sqrt() / 2.0
}

/// Scans spheroids `(1, 1, c)` for positive eigenvalues.
///
/// The quadrature's unresolved tail produces spurious positive eigenvalues of
/// order 1e-2 to 5e-2 on every surface; those modes oscillate at grid scale,
/// so candidates are kept only when the eigenvector is smooth (roughness
/// below 0.35). Demonstrates existence on strongly oblate shapes; no
/// literature value is matched because the reference spheroid parameters are
/// not available.
pub fn positive_eigenvalue_search(
    aspects: &[f64],
    n_theta: usize,
    n_phi: usize,
) -> Result<Vec<PositiveFinding>, LayerpotError> {
    aspects
        .par_iter()
        .map(|&c| {
            let surf = Surface3D::ellipsoid(1.0, 1.0, c)?;
            let m = assemble_dlp_3d(&surf, n_theta, n_phi)?;
            let spec = eigenpairs(&m)?;
            let vecs = spec.eigenvectors.as_ref().unwrap();
            let mut pos: Vec<f64> = (0..spec.len())
                .filter(|&j| {
                    spec.real_flags[j]
                        && spec.eigenvalues[j].re > 1e-3
                        && mode_roughness(vecs.column(j), n_theta, n_phi) < 0.35
                })
                .map(|j| spec.eigenvalues[j].re)
                .collect();
            pos.sort_by(|a, b| b.partial_cmp(a).unwrap());
            Ok(PositiveFinding {
                aspect: c,
                positive_eigenvalues: pos,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sphere_exact_spectrum;
    use approx::assert_abs_diff_eq;

    fn sphere_spectrum(n_theta: usize, n_phi: usize) -> Spectrum {
        let s = Surface3D::sphere(1.0).unwrap();
        let m = assemble_dlp_3d(&s, n_theta, n_phi).unwrap();
        eigenpairs(&m).unwrap()
    }

    #[test]
    fn sphere_cluster_sums_are_minus_one() {
        let spec = sphere_spectrum(16, 32);
        let clusters = ellipsoid_cluster_sums(&spec, 2).unwrap();
        for c in &clusters {
            assert_eq!(c.eigenvalues.len(), 2 * c.l + 1);
            assert_abs_diff_eq!(c.sum, -1.0, epsilon = 5e-2);
        }
    }

    #[test]
    fn exact_sphere_floor_is_minus_third() {
        let exact = sphere_exact_spectrum(5);
        // exact spectrum carries no eigenvectors; check the value directly
        let floor = exact
            .eigenvalues
            .iter()
            .filter(|z| (z.re + 1.0).abs() > 1e-12)
            .fold(f64::INFINITY, |acc, z| acc.min(z.re));
        assert_abs_diff_eq!(floor, -1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn discrete_sphere_floor_near_minus_third() {
        let spec = sphere_spectrum(16, 32);
        let floor = lambda_floor(&spec).unwrap().unwrap();
        assert_abs_diff_eq!(floor, -1.0 / 3.0, epsilon = 5e-2);
    }

    #[test]
    fn circle_floor_not_applicable() {
        let c = Curve2D::circle(1.0).unwrap();
        let m = assemble_dlp_2d(&c, 64).unwrap();
        let spec = eigenpairs(&m).unwrap();
        assert!(lambda_floor(&spec).unwrap().is_none());
    }

    #[test]
    fn cluster_sums_reject_short_spectra() {
        let spec = sphere_spectrum(16, 32);
        assert!(ellipsoid_cluster_sums(&spec, 40).is_err());
    }

    #[test]
    fn ellipse_sweep_defect_decreases_toward_circle() {
        // the ellipse rounds out toward a circle as R grows
        let sweep = sweep_ellipses(&[0.25, 0.5, 1.0], 2.0, 128, None).unwrap();
        let defects: Vec<f64> = sweep.rows.iter().map(|r| r.defect.unwrap()).collect();
        assert!(defects[0] > defects[1] && defects[1] > defects[2]);
        assert!(defects.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn ellipsoid_sweep_summary_prefers_sphere() {
        let axes = [(1.0, 1.0), (1.0, 1.3), (1.3, 1.3)];
        let sweep = sweep_ellipsoids(&axes, 2.0, 16, 32, None).unwrap();
        let summary = sweep.summary.unwrap();
        assert!(summary.pass_flags.argmax_at_sphere);
        assert!(summary.pass_flags.min_schatten_at_sphere);
        assert!(summary.pass_flags.nonsphere_below_third);
    }

    #[test]
    fn sweep_resumes_from_ledger() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        let axes = [(1.0, 1.0), (1.0, 1.2)];
        let first = sweep_ellipsoids(&axes, 2.0, 16, 32, Some(&path)).unwrap();
        let more = [(1.0, 1.0), (1.0, 1.2), (1.2, 1.2)];
        let second = sweep_ellipsoids(&more, 2.0, 16, 32, Some(&path)).unwrap();
        assert_eq!(second.rows.len(), 3);
        for (a, b) in first.rows.iter().zip(&second.rows) {
            assert_eq!(a.key, b.key);
            assert_eq!(a.schatten, b.schatten);
        }
        // axis-permuted duplicates collapse onto the same row
        let dup = sweep_ellipsoids(&[(1.2, 1.0)], 2.0, 16, 32, Some(&path)).unwrap();
        assert_eq!(dup.rows[0].key, second.rows[1].key);
    }

    #[test]
    fn sphere_and_prolate_have_no_positive_eigenvalues() {
        let findings = positive_eigenvalue_search(&[1.0, 2.0], 16, 32).unwrap();
        for f in &findings {
            assert!(f.positive_eigenvalues.is_empty(), "aspect {}", f.aspect);
        }
    }

    #[test]
    fn strongly_oblate_spheroid_goes_positive() {
        let findings = positive_eigenvalue_search(&[0.1], 24, 48).unwrap();
        // recorded as a finding; asserted here because it is stable at this grid
        assert!(!findings[0].positive_eigenvalues.is_empty());
    }
}
