//! Apex angles of mutually tangent circle triples.
//!
//! Each function returns the angle at the center of the first circle in the
//! triangle formed by the centers of three mutually tangent circles.

use super::{checked_acos, checked_asin, GeomError, HypRadius};

/// Euclidean apex angle at the circle of radius `r_v` in a tangent triple.
///
/// `alpha = 2 asin( sqrt( r_u r_w / ((r_v + r_u)(r_v + r_w)) ) )`.
pub fn euclidean_angle(r_v: f64, r_u: f64, r_w: f64) -> Result<f64, GeomError> {
    for r in [r_v, r_u, r_w] {
        if !(r > 0.0) || !r.is_finite() {
            return Err(GeomError::NonPositiveRadius(r));
        }
    }
    let q = (r_u * r_w) / ((r_v + r_u) * (r_v + r_w));
    Ok(2.0 * checked_asin(q.sqrt())?)
}

/// Hyperbolic apex angle at the finite circle `r_v`; petals may be horocycles.
///
/// In decay form (`t = exp(-2h)`) the hyperbolic law of cosines for the
/// triangle with sides `h_v + h_u`, `h_v + h_w`, `h_u + h_w` reduces to
/// `sin^2(alpha/2) = t_v (1 - t_u)(1 - t_w) / ((1 - t_v t_u)(1 - t_v t_w))`,
/// which stays finite as petals degenerate to horocycles (`t -> 0`).
pub fn hyperbolic_angle(
    r_v: HypRadius,
    r_u: HypRadius,
    r_w: HypRadius,
) -> Result<f64, GeomError> {
    if r_v.is_horocycle() {
        return Err(GeomError::InfiniteApexRadius);
    }
    let (t_v, t_u, t_w) = (r_v.decay(), r_u.decay(), r_w.decay());
    let q = t_v * (1.0 - t_u) * (1.0 - t_w) / ((1.0 - t_v * t_u) * (1.0 - t_v * t_w));
    Ok(2.0 * checked_asin(q.sqrt())?)
}

/// Spherical apex angle at the circle of angular radius `r_v`.
///
/// Uses the spherical law of cosines on the center triangle with sides
/// `r_v + r_u`, `r_v + r_w` and opposite side `r_u + r_w`. All radii are in
/// (0, pi) and each pair must sum below pi for the triangle to exist.
pub fn spherical_angle(r_v: f64, r_u: f64, r_w: f64) -> Result<f64, GeomError> {
    for r in [r_v, r_u, r_w] {
        if !(r > 0.0 && r < std::f64::consts::PI) {
            return Err(GeomError::NonPositiveRadius(r));
        }
    }
    let (a, b, c) = (r_u + r_w, r_v + r_u, r_v + r_w);
    if a >= std::f64::consts::PI || b >= std::f64::consts::PI || c >= std::f64::consts::PI {
        return Err(GeomError::TriangleTooLarge);
    }
    let num = a.cos() - b.cos() * c.cos();
    let den = b.sin() * c.sin();
    checked_acos(num / den)
}
