//! Small quadrature helpers: Gauss-Legendre nodes on [-1, 1] and the
//! Kussmaul-Martensen weights for periodic logarithmic kernels.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial with the Chebyshev initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Quadrature weight `R_{|i-j|}` for the periodic logarithmic kernel:
///
/// `int_0^{2pi} log(4 sin^2((s - t)/2)) f(s) ds ~= sum_j R(t - s_j) f(s_j)`
///
/// on the uniform grid with `n = 2 m` points. The rule is exact for
/// trigonometric polynomials of degree < m.
pub fn log_sin_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0, "log-kernel rule needs an even node count");
    let m = n / 2;
    (0..n)
        .map(|d| {
            let td = 2.0 * PI * d as f64 / n as f64;
            let mut r = -(PI / (m * m) as f64) * (m as f64 * td).cos();
            for k in 1..m {
                r -= (2.0 * PI / m as f64) * (k as f64 * td).cos() / k as f64;
            }
            r
        })
        .collect()
}
