//! Least-squares fits used for exponent estimation.

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `ln|f|` against `ln r` on a log-spaced grid over `[lo, hi]`.
pub fn log_log_slope<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> Option<f64> {
    let points = points.max(2);
    let (la, lb) = (lo.ln(), hi.ln());
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let lr = la + (lb - la) * i as f64 / (points - 1) as f64;
        let v = f(lr.exp()).abs();
        if !(v > 0.0 && v.is_finite()) {
            return None;
        }
        xs.push(lr);
        ys.push(v.ln());
    }
    Some(linear_fit(&xs, &ys).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let (m, c) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((m - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn power_slope() {
        let s = log_log_slope(|r| 3.0 * r.powf(-0.5), 1e-6, 1e-4, 9).unwrap();
        assert!((s + 0.5).abs() < 1e-12);
    }
}
