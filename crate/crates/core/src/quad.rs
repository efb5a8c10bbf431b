//! Small deterministic quadrature helpers.

/// Composite Simpson rule on [a, b] with `n` subintervals (rounded up to even).
/// Handles a > b by sign flip.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -simpson(f, b, a, n);
    }
    let n = if n.is_multiple_of(2) { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Trapezoid weights for an ordered grid: w_i integrates piecewise-linear
/// functions exactly. A single-point grid gets weight 1.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![1.0];
    }
    let mut w = vec![0.0; n];
    w[0] = (grid[1] - grid[0]) / 2.0;
    w[n - 1] = (grid[n - 1] - grid[n - 2]) / 2.0;
    for i in 1..n - 1 {
        w[i] = (grid[i + 1] - grid[i - 1]) / 2.0;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        // Simpson is exact through cubics.
        let cubic = |x: f64| 3.0 * x * x * x - x + 2.0;
        let exact = |x: f64| 0.75 * x.powi(4) - 0.5 * x * x + 2.0 * x;
        let got = simpson(cubic, -1.0, 2.5, 100);
        assert!((got - (exact(2.5) - exact(-1.0))).abs() < 1e-12);
    }

    #[test]
    fn simpson_orientation() {
        let f = |x: f64| x * x;
        assert!((simpson(f, 0.0, 1.0, 100) + simpson(f, 1.0, 0.0, 100)).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_weights_sum_to_span() {
        let grid = [0.0, 0.5, 1.25, 2.0];
        let w = trapezoid_weights(&grid);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-15);
    }
}
