//! Parametrized closed curves in the plane and closed surfaces in space.
//!
//! Curves are stored as finite complex Fourier series `q(t) = sum_k a_k e^{ikt}`
//! with period 2*pi, so every derivative is available in closed form and the
//! parametrization continues holomorphically to a strip around the real axis.
//! Surfaces are restricted to spheres and axis-aligned ellipsoids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::LayerpotError;

/// Grid used to validate regularity and simplicity of a curve.
const VALIDATION_GRID: usize = 4096;

/// Tag describing how a curve was constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurveShape {
    /// Circle of radius `radius` centered at the origin.
    Circle { radius: f64 },
    /// Ellipse `x = c/2 cosh(r) cos t`, `y = c/2 sinh(r) sin t`.
    Ellipse { c: f64, r: f64 },
    /// General curve from explicit Fourier coefficients.
    Fourier,
}

/// Closed plane curve with closed-form differential data.
///
/// Immutable after construction; all invariants (regularity, simplicity,
/// counterclockwise orientation) are checked by [`Curve2D::new`].
#[derive(Debug, Clone)]
pub struct Curve2D {
    shape: CurveShape,
    /// Fourier modes as (frequency, coefficient) pairs, frequency may be negative.
    modes: Vec<(i32, Complex64)>,
    label: String,
}

/// Pointwise frame data of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFrame {
    pub point: [f64; 2],
    /// Outward unit normal.
    pub normal: [f64; 2],
    /// Parametrization speed `|q'(t)|`.
    pub speed: f64,
    /// Signed curvature (positive for a counterclockwise circle).
    pub curvature: f64,
}

impl Curve2D {
    /// Builds a circle of radius `radius` traversed counterclockwise.
    pub fn circle(radius: f64) -> Result<Self, LayerpotError> {
        if radius <= 0.0 {
            return Err(LayerpotError::InvalidShape(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        Self::from_modes(
            CurveShape::Circle { radius },
            vec![(1, Complex64::new(radius, 0.0))],
            format!("circle_R{radius}"),
        )
    }

    /// Builds the ellipse `x = c/2 cosh(r) cos t`, `y = c/2 sinh(r) sin t`.
    ///
    /// In complex form `q(t) = (c/4) e^r e^{it} + (c/4) e^{-r} e^{-it}`, so the
    /// semi-axes are `c/2 cosh r` and `c/2 sinh r`.
    pub fn ellipse(c: f64, r: f64) -> Result<Self, LayerpotError> {
        if c <= 0.0 || r <= 0.0 {
            return Err(LayerpotError::InvalidShape(format!(
                "ellipse parameters must be positive, got c={c}, r={r}"
            )));
        }
        let a_plus = Complex64::new(0.25 * c * r.exp(), 0.0);
        let a_minus = Complex64::new(0.25 * c * (-r).exp(), 0.0);
        Self::from_modes(
            CurveShape::Ellipse { c, r },
            vec![(1, a_plus), (-1, a_minus)],
            format!("ellipse_c{c}_R{r}"),
        )
    }

    /// Builds a curve from explicit Fourier modes `(k, a_k)`.
    pub fn fourier(modes: Vec<(i32, Complex64)>) -> Result<Self, LayerpotError> {
        Self::from_modes(CurveShape::Fourier, modes, "fourier".to_string())
    }

    fn from_modes(
        shape: CurveShape,
        modes: Vec<(i32, Complex64)>,
        label: String,
    ) -> Result<Self, LayerpotError> {
        let curve = Curve2D { shape, modes, label };
        curve.validate()?;
        Ok(curve)
    }

    /// Returns a copy scaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self, LayerpotError> {
        let modes = self
            .modes
            .iter()
            .map(|&(k, a)| (k, a * factor))
            .collect();
        Self::from_modes(
            CurveShape::Fourier,
            modes,
            format!("{}_x{factor}", self.label),
        )
    }

    pub fn shape(&self) -> &CurveShape {
        &self.shape
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn modes(&self) -> &[(i32, Complex64)] {
        &self.modes
    }

    /// Curve point as a complex number `q(t)` for complex parameter `t`.
    ///
    /// For real `t` this is the curve itself; for `|Im t|` small it is the
    /// holomorphic continuation used by the annulus machinery.
    pub fn q_complex(&self, t: Complex64) -> Complex64 {
        let i = Complex64::i();
        self.modes
            .iter()
            .map(|&(k, a)| a * (i * (k as f64) * t).exp())
            .sum()
    }

    /// Holomorphic continuation of the conjugate parametrization `conj(q)`.
    pub fn q_star_complex(&self, t: Complex64) -> Complex64 {
        let i = Complex64::i();
        self.modes
            .iter()
            .map(|&(k, a)| a.conj() * (-i * (k as f64) * t).exp())
            .sum()
    }

    /// `q'(t)` for complex parameter.
    pub fn dq_complex(&self, t: Complex64) -> Complex64 {
        let i = Complex64::i();
        self.modes
            .iter()
            .map(|&(k, a)| a * i * (k as f64) * (i * (k as f64) * t).exp())
            .sum()
    }

    fn derivatives(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        let i = Complex64::i();
        let mut q = Complex64::new(0.0, 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        let mut ddq = Complex64::new(0.0, 0.0);
        for &(k, a) in &self.modes {
            let kf = k as f64;
            let e = (i * kf * t).exp();
            q += a * e;
            dq += a * i * kf * e;
            ddq += -a * kf * kf * e;
        }
        (q, dq, ddq)
    }

    /// Point on the curve.
    pub fn point(&self, t: f64) -> [f64; 2] {
        let q = self.q_complex(Complex64::new(t, 0.0));
        [q.re, q.im]
    }

    /// Full frame: point, outward unit normal, speed and curvature.
    pub fn frame(&self, t: f64) -> CurveFrame {
        let (q, dq, ddq) = self.derivatives(t);
        let speed = dq.norm();
        // counterclockwise orientation puts the outward normal at (y', -x')/|q'|
        let normal = [dq.im / speed, -dq.re / speed];
        let curvature = (dq.conj() * ddq).im / (speed * speed * speed);
        CurveFrame {
            point: [q.re, q.im],
            normal,
            speed,
            curvature,
        }
    }

    /// Largest frequency present (controls how far the strip continuation grows).
    pub fn max_frequency(&self) -> i32 {
        self.modes.iter().map(|&(k, _)| k.abs()).max().unwrap_or(0)
    }

    /// Diameter estimated as the max pairwise distance over a 1024-point grid.
    pub fn diameter(&self) -> f64 {
        let n = 1024;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|j| self.point(2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pts[i][0] - pts[j][0];
                let dy = pts[i][1] - pts[j][1];
                best = best.max((dx * dx + dy * dy).sqrt());
            }
        }
        best
    }

    fn validate(&self) -> Result<(), LayerpotError> {
        if self.modes.is_empty() {
            return Err(LayerpotError::InvalidShape(
                "curve needs at least one Fourier mode".into(),
            ));
        }
        let n = VALIDATION_GRID;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut min_speed = f64::INFINITY;
        let mut signed_area = 0.0;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|j| {
                let t = h * j as f64;
                let (q, dq, _) = self.derivatives(t);
                min_speed = min_speed.min(dq.norm());
                signed_area += 0.5 * (q.conj() * dq).im * h;
                [q.re, q.im]
            })
            .collect();
        if min_speed <= 1e-10 {
            return Err(LayerpotError::InvalidShape(format!(
                "curve is not regular: min |q'(t)| = {min_speed:.3e} on the validation grid"
            )));
        }
        if signed_area <= 0.0 {
            return Err(LayerpotError::InvalidShape(format!(
                "curve must be counterclockwise: signed area = {signed_area:.3e}"
            )));
        }
        if let Some((i, j)) = first_self_intersection(&pts) {
            return Err(LayerpotError::InvalidShape(format!(
                "curve self-intersects near parameters t={:.4} and t={:.4}",
                h * i as f64,
                h * j as f64
            )));
        }
        Ok(())
    }
}

/// Segment intersection scan over the polygonal validation grid.
///
/// Neighbouring segments share endpoints and are skipped.
fn first_self_intersection(pts: &[[f64; 2]]) -> Option<(usize, usize)> {
    let n = pts.len();
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let c = pts[j];
            let d = pts[(j + 1) % n];
            if segments_cross(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| -> f64 {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Tag describing how a surface was constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SurfaceShape {
    Sphere { radius: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

/// Closed surface: sphere or axis-aligned ellipsoid, parametrized by
/// `(theta, phi) in [0, pi] x [0, 2 pi)`.
#[derive(Debug, Clone)]
pub struct Surface3D {
    shape: SurfaceShape,
    semi_axes: [f64; 3],
    label: String,
}

/// Pointwise frame data of a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFrame {
    pub point: [f64; 3],
    /// Outward unit normal.
    pub normal: [f64; 3],
    /// Area element `|r_theta x r_phi| / sin(theta)` integrated against
    /// `d(cos theta) d phi`; equals `R^2` on a sphere of radius `R`.
    pub area_element: f64,
}

impl Surface3D {
    pub fn sphere(radius: f64) -> Result<Self, LayerpotError> {
        if radius <= 0.0 {
            return Err(LayerpotError::InvalidShape(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Surface3D {
            shape: SurfaceShape::Sphere { radius },
            semi_axes: [radius; 3],
            label: format!("sphere_R{radius}"),
        })
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self, LayerpotError> {
        if a <= 0.0 || b <= 0.0 || c <= 0.0 {
            return Err(LayerpotError::InvalidShape(format!(
                "ellipsoid semi-axes must be positive, got ({a}, {b}, {c})"
            )));
        }
        Ok(Surface3D {
            shape: SurfaceShape::Ellipsoid { a, b, c },
            semi_axes: [a, b, c],
            label: format!("ellipsoid_{a}_{b}_{c}"),
        })
    }

    pub fn shape(&self) -> &SurfaceShape {
        &self.shape
    }

    pub fn semi_axes(&self) -> [f64; 3] {
        self.semi_axes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Frame at `(theta, phi)`.
    ///
    /// The area element is reported per `d(cos theta) d phi`, matching the
    /// Gauss-Legendre-in-`cos theta` quadrature used for assembly.
    pub fn frame(&self, theta: f64, phi: f64) -> SurfaceFrame {
        let [a, b, c] = self.semi_axes;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let point = [a * st * cp, b * st * sp, c * ct];
        // r_theta x r_phi = sin(theta) * (b c sin(theta) cos(phi),
        //                                 a c sin(theta) sin(phi), a b cos(theta))
        let v = [b * c * st * cp, a * c * st * sp, a * b * ct];
        let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        SurfaceFrame {
            point,
            normal: [v[0] / vn, v[1] / vn, v[2] / vn],
            area_element: vn,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_frame() {
        let c = Curve2D::circle(1.0).unwrap();
        let f = c.frame(0.0);
        assert_abs_diff_eq!(f.point[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.point[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.speed, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.curvature, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn circle_r2_frame_at_zero() {
        let c = Curve2D::circle(2.0).unwrap();
        let f = c.frame(0.0);
        assert_abs_diff_eq!(f.point[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.normal[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.normal[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.speed, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.curvature, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn ellipse_semi_axes_and_vertex_curvature() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        let a = 0.5_f64.cosh();
        let b = 0.5_f64.sinh();
        let f0 = e.frame(0.0);
        assert_abs_diff_eq!(f0.point[0], a, epsilon = 1e-14);
        let ftop = e.frame(PI / 2.0);
        assert_abs_diff_eq!(ftop.point[1], b, epsilon = 1e-14);
        // curvature at the vertex (a, 0) is a / b^2
        assert_abs_diff_eq!(f0.curvature, a / (b * b), epsilon = 1e-12);
    }

    #[test]
    fn fourier_single_mode_matches_circle() {
        let c = Curve2D::circle(1.0).unwrap();
        let f = Curve2D::fourier(vec![(1, Complex64::new(1.0, 0.0))]).unwrap();
        for j in 0..17 {
            let t = 2.0 * PI * j as f64 / 17.0;
            let fc = c.frame(t);
            let ff = f.frame(t);
            assert_abs_diff_eq!(fc.point[0], ff.point[0], epsilon = 1e-15);
            assert_abs_diff_eq!(fc.curvature, ff.curvature, epsilon = 1e-13);
        }
    }

    #[test]
    fn total_curvature_is_two_pi() {
        let shapes = vec![
            Curve2D::circle(1.7).unwrap(),
            Curve2D::ellipse(2.0, 0.5).unwrap(),
            Curve2D::fourier(vec![
                (1, Complex64::new(1.0, 0.0)),
                (3, Complex64::new(0.0, 0.1)),
            ])
            .unwrap(),
        ];
        let n = 512;
        let h = 2.0 * PI / n as f64;
        for s in shapes {
            let total: f64 = (0..n)
                .map(|j| {
                    let f = s.frame(h * j as f64);
                    f.curvature * f.speed * h
                })
                .sum();
            assert_abs_diff_eq!(total, 2.0 * PI, epsilon = 1e-10);
        }
    }

    #[test]
    fn normal_is_orthogonal_to_tangent() {
        let e = Curve2D::ellipse(2.0, 0.5).unwrap();
        for j in 0..101 {
            let t = 2.0 * PI * j as f64 / 101.0;
            let f = e.frame(t);
            let dq = e.dq_complex(Complex64::new(t, 0.0));
            let dot = f.normal[0] * dq.re + f.normal[1] * dq.im;
            assert!(dot.abs() < 1e-12, "normal not orthogonal at t={t}: {dot}");
        }
    }

    #[test]
    fn rejects_irregular_and_clockwise_curves() {
        // clockwise circle (negative frequency only)
        assert!(Curve2D::fourier(vec![(-1, Complex64::new(1.0, 0.0))]).is_err());
        // figure-eight style self intersection
        assert!(Curve2D::fourier(vec![
            (1, Complex64::new(1.0, 0.0)),
            (2, Complex64::new(1.2, 0.0)),
        ])
        .is_err());
        assert!(Curve2D::circle(-1.0).is_err());
    }

    #[test]
    fn sphere_frame_and_pole() {
        let s = Surface3D::sphere(1.0).unwrap();
        let f = s.frame(PI / 2.0, 0.0);
        assert_abs_diff_eq!(f.point[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.normal[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.area_element, 1.0, epsilon = 1e-15);

        let e = Surface3D::ellipsoid(1.0, 1.0, 2.0).unwrap();
        let fp = e.frame(1e-9, 0.3);
        assert_abs_diff_eq!(fp.point[2], 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fp.normal[2], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn outward_normal_points_away_from_centroid() {
        let e = Surface3D::ellipsoid(1.0, 1.2, 1.5).unwrap();
        for i in 1..8 {
            for j in 0..8 {
                let f = e.frame(PI * i as f64 / 8.0, 2.0 * PI * j as f64 / 8.0);
                let dot: f64 = (0..3).map(|k| f.point[k] * f.normal[k]).sum();
                assert!(dot > 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_surface() {
        assert!(Surface3D::ellipsoid(1.0, -1.0, 1.0).is_err());
    }
}
