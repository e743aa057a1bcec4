//! Least-squares circle fitting for boundary roundness diagnostics.

use super::{Circle, GeomError, Point};
use num_complex::Complex64;

/// Algebraic least-squares circle through `points`, with a roundness score.
///
/// Minimizes `sum (|p|^2 + D x + E y + F)^2` after centering the data, which
/// reproduces the circumcircle exactly for three points. Roundness is
/// `(max_i d_i - min_i d_i) / radius` over distances `d_i` from the fitted
/// center; 0 means the points lie on a common circle.
pub fn fit_circle(points: &[Point]) -> Result<(Circle, f64), GeomError> {
    if points.len() < 3 {
        return Err(GeomError::DegenerateInput(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean = points.iter().sum::<Complex64>() / n;
    let (mut sxx, mut sxy, mut syy, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sxz, mut syz, mut sz) = (0.0, 0.0, 0.0);
    for p in points {
        let q = p - mean;
        let z = q.norm_sqr();
        sxx += q.re * q.re;
        sxy += q.re * q.im;
        syy += q.im * q.im;
        sx += q.re;
        sy += q.im;
        sxz += q.re * z;
        syz += q.im * z;
        sz += z;
    }
    // Normal equations for (D, E, F) in |q|^2 + D x + E y + F = 0.
    let m = [[sxx, sxy, sx], [sxy, syy, sy], [sx, sy, n]];
    let rhs = [-sxz, -syz, -sz];
    let sol = solve3(m, rhs).ok_or_else(|| {
        GeomError::DegenerateInput("collinear or coincident points".into())
    })?;
    let center_local = Complex64::new(-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = center_local.norm_sqr() - sol[2];
    if !(r2 > 0.0) {
        return Err(GeomError::DegenerateInput("fit collapsed to a point".into()));
    }
    let center = center_local + mean;
    let radius = r2.sqrt();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for p in points {
        let d = (p - center).norm();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    Ok((Circle::new(center, radius), (dmax - dmin) / radius))
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = det3(m);
    let scale: f64 = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if det.abs() < 1e-12 * scale.powi(3).max(1e-300) {
        return None;
    }
    let mut out = [0.0; 3];
    for k in 0..3 {
        let mut mk = m;
        for row in 0..3 {
            mk[row][k] = b[row];
        }
        out[k] = det3(mk) / det;
    }
    Some(out)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_circle_has_zero_roundness() {
        let pts: Vec<Point> = (0..100)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 100.0))
            .collect();
        let (c, roundness) = fit_circle(&pts).unwrap();
        assert!((c.radius - 1.0).abs() < 1e-12);
        assert!(c.center.norm() < 1e-12);
        assert!(roundness < 1e-12);
    }

    #[test]
    fn ellipse_roundness() {
        let pts: Vec<Point> = (0..360)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 360.0;
                Complex64::new(t.cos(), 1.1 * t.sin())
            })
            .collect();
        let (_, roundness) = fit_circle(&pts).unwrap();
        assert!((roundness - 0.1).abs() < 0.02, "roundness {roundness}");
    }

    #[test]
    fn three_points_circumcircle() {
        let pts = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
        ];
        let (c, roundness) = fit_circle(&pts).unwrap();
        assert!(c.center.norm() < 1e-12);
        assert!((c.radius - 1.0).abs() < 1e-12);
        assert!(roundness < 1e-12);
    }

    #[test]
    fn collinear_rejected() {
        let pts = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(2.0, 2.0),
        ];
        assert!(fit_circle(&pts).is_err());
    }

    #[test]
    fn offset_circle() {
        let pts: Vec<Point> = (0..50)
            .map(|k| {
                Complex64::new(5.0, -3.0)
                    + Complex64::from_polar(0.25, 2.0 * PI * k as f64 / 50.0)
            })
            .collect();
        let (c, roundness) = fit_circle(&pts).unwrap();
        assert!((c.center - Complex64::new(5.0, -3.0)).norm() < 1e-12);
        assert!((c.radius - 0.25).abs() < 1e-12);
        assert!(roundness < 1e-11);
    }
}
