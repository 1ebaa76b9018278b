//! Trigonometric interpolation of 2 pi-periodic node samples.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Interpolant of real samples on the uniform grid `t_j = 2 pi j / n`.
///
/// Stores the Fourier modes `c_k`, `|k| <= n/2`, with the Nyquist mode split
/// evenly so the interpolant is real for real samples.
#[derive(Debug, Clone)]
pub struct TrigInterp {
    /// Modes indexed `k = -m ..= m` at position `k + m`.
    coeffs: Vec<Complex64>,
    m: i64,
}

impl TrigInterp {
    /// Builds the interpolant by direct DFT; `samples.len()` must be even.
    pub fn new(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n % 2 == 0 && n >= 2, "need an even number of samples");
        let m = (n / 2) as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * m + 1) as usize];
        for k in -m..=m {
            let mut c = Complex64::new(0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                let t = 2.0 * PI * j as f64 / n as f64;
                c += f * Complex64::new(0.0, -(k as f64) * t).exp();
            }
            c /= n as f64;
            if k.unsigned_abs() == m as u64 {
                c /= 2.0;
            }
            coeffs[(k + m) as usize] = c;
        }
        TrigInterp { coeffs, m }
    }

    /// Evaluates the interpolant at an arbitrary parameter.
    pub fn eval(&self, t: f64) -> f64 {
        let mut v = Complex64::new(0.0, 0.0);
        for k in -self.m..=self.m {
            v += self.coeffs[(k + self.m) as usize] * Complex64::new(0.0, k as f64 * t).exp();
        }
        v.re
    }

    /// Evaluates the natural holomorphic continuation `sum c_k e^{ikt}` at a
    /// complex parameter.
    pub fn eval_complex(&self, t: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for k in -self.m..=self.m {
            v += self.coeffs[(k + self.m) as usize] * (Complex64::new(0.0, k as f64) * t).exp();
        }
        v
    }

    /// Samples the interpolant on a refined uniform grid.
    pub fn refine(&self, points: usize) -> Vec<f64> {
        (0..points)
            .map(|j| self.eval(2.0 * PI * j as f64 / points as f64))
            .collect()
    }

    /// Max absolute value on a refined grid.
    pub fn sup_norm(&self, points: usize) -> f64 {
        self.refine(points)
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reproduces_trigonometric_polynomials() {
        let n = 32;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                1.5 + (3.0 * t).cos() - 0.25 * (5.0 * t).sin()
            })
            .collect();
        let interp = TrigInterp::new(&samples);
        for i in 0..97 {
            let t = 2.0 * PI * i as f64 / 97.0;
            let expect = 1.5 + (3.0 * t).cos() - 0.25 * (5.0 * t).sin();
            assert_abs_diff_eq!(interp.eval(t), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolates_the_samples() {
        let samples = vec![0.3, -1.2, 0.8, 2.0, -0.5, 0.1, 0.0, 1.0];
        let interp = TrigInterp::new(&samples);
        for (j, &s) in samples.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / samples.len() as f64;
            assert_abs_diff_eq!(interp.eval(t), s, epsilon = 1e-12);
        }
    }
}
