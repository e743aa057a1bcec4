//! Möbius transformations acting on points and exactly on circles.
//!
//! Circles are transported through their Hermitian coefficient matrix
//! `[[A, B], [conj(B), C]]` for the equation `A z conj(z) + B conj(z) +
//! conj(B) z + C = 0` (interior where the form is negative), so images are
//! computed algebraically rather than by sampling boundary points.

use num_complex::Complex64;

use super::sphere::{SphereCap, Vec3};
use super::{Circle, GeomError, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Hermitian coefficients of a circle or line.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CircleMat {
    pub a: f64,
    pub b: Complex64,
    pub c: f64,
}

impl CircleMat {
    pub fn from_circle(circle: &Circle) -> Self {
        // |z - c|^2 - r^2 < 0 inside.
        CircleMat {
            a: 1.0,
            b: -circle.center,
            c: circle.center.norm_sqr() - circle.radius * circle.radius,
        }
    }

    /// Spherical cap with unit center `u` and angular radius `rho`, written
    /// in the plane chart: `2 b1 X + 2 b2 Y + (A - C) Z + (A + C) < 0` on the
    /// cap's complement side of the sphere.
    pub fn from_cap(cap: &SphereCap) -> Self {
        let n = cap.center;
        let t = cap.radius.cos();
        CircleMat {
            a: t - n.z,
            b: Complex64::new(-n.x, -n.y),
            c: t + n.z,
        }
    }

    pub fn to_cap(&self) -> Result<SphereCap, GeomError> {
        let nx = 2.0 * self.b.re;
        let ny = 2.0 * self.b.im;
        let nz = self.a - self.c;
        let t = self.a + self.c;
        let norm = (nx * nx + ny * ny + nz * nz).sqrt();
        if !(norm > t.abs()) || norm == 0.0 {
            return Err(GeomError::DegenerateInput(
                "coefficient matrix does not describe a real circle".into(),
            ));
        }
        let center = Vec3::new(-nx / norm, -ny / norm, -nz / norm);
        let radius = (t / norm).acos();
        Ok(SphereCap { center, radius })
    }

    /// Boundary circle in the plane; errors when the locus is a line.
    pub fn to_circle(&self) -> Result<Circle, GeomError> {
        let scale = self.a.abs().max(self.c.abs()).max(self.b.norm());
        if self.a.abs() <= 1e-14 * scale {
            return Err(GeomError::ImageIsLine);
        }
        let center = -self.b / self.a;
        let r2 = center.norm_sqr() - self.c / self.a;
        if !(r2 > 0.0) {
            return Err(GeomError::DegenerateInput(
                "circle has non-positive squared radius".into(),
            ));
        }
        Ok(Circle::new(center, r2.sqrt()))
    }

    /// Congruence transform under `w = M(z)`: `H' = inv(M)^* H inv(M)`.
    pub fn transform(&self, m: &MobiusMap) -> CircleMat {
        let inv = m.inverse();
        // H * inv, with H = [[a, b], [conj(b), c]].
        let h00 = self.a * inv.a + self.b * inv.c;
        let h01 = self.a * inv.b + self.b * inv.d;
        let h10 = self.b.conj() * inv.a + self.c * inv.c;
        let h11 = self.b.conj() * inv.b + self.c * inv.d;
        // inv^dagger * (H * inv).
        let a = inv.a.conj() * h00 + inv.c.conj() * h10;
        let b = inv.a.conj() * h01 + inv.c.conj() * h11;
        let c = inv.b.conj() * h01 + inv.d.conj() * h11;
        CircleMat { a: a.re, b, c: c.re }
    }
}

impl MobiusMap {
    pub fn identity() -> Self {
        MobiusMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// Normalize so that `ad - bc = 1` (up to the overall sign ambiguity).
    pub fn normalized(self) -> Self {
        let det = self.a * self.d - self.b * self.c;
        let s = det.sqrt();
        MobiusMap {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        MobiusMap { a, b, c, d }.normalized()
    }

    /// `z -> lambda z` for `lambda != 0`.
    pub fn scaling(lambda: Complex64) -> Self {
        Self::new(
            lambda,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    /// Disc automorphism sending `p` (|p| < 1) to the origin.
    pub fn disc_to_origin(p: Point) -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            -p,
            -p.conj(),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn inverse(&self) -> Self {
        // For det = 1 the inverse is [[d, -b], [-c, a]]; keep the raw
        // coefficients since composition renormalizes anyway.
        let det = self.a * self.d - self.b * self.c;
        MobiusMap {
            a: self.d / det,
            b: -self.b / det,
            c: -self.c / det,
            d: self.a / det,
        }
    }

    pub fn compose(&self, inner: &MobiusMap) -> Self {
        MobiusMap {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
        .normalized()
    }

    pub fn apply(&self, z: Point) -> Point {
        if z.is_infinite() {
            return if self.c.norm() == 0.0 {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                self.a / self.c
            };
        }
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Exact image of a plane circle; errors when the image is a line.
    pub fn apply_to_circle(&self, circle: &Circle) -> Result<Circle, GeomError> {
        CircleMat::from_circle(circle).transform(self).to_circle()
    }

    /// Exact image of a spherical cap (never degenerates).
    pub fn apply_to_cap(&self, cap: &SphereCap) -> Result<SphereCap, GeomError> {
        CircleMat::from_cap(cap).transform(self).to_cap()
    }

    /// Image of a sphere point via the plane chart.
    pub fn apply_to_sphere_point(&self, p: Vec3) -> Vec3 {
        let (xi, eta) = spinor(p);
        let xi2 = self.a * xi + self.b * eta;
        let eta2 = self.c * xi + self.d * eta;
        spinor_point(xi2, eta2)
    }

    /// The unique Möbius map sending three distinct sphere points to three
    /// distinct targets. Built on homogeneous (spinor) coordinates so points
    /// at or near the projection pole need no special treatment.
    pub fn from_sphere_triples(
        src: [Vec3; 3],
        dst: [Vec3; 3],
    ) -> Result<MobiusMap, GeomError> {
        let m_src = basis_map(src)?;
        let m_dst = basis_map(dst)?;
        Ok(m_dst.compose(&m_src.inverse()))
    }

    /// Möbius map sending three plane points to three plane targets; points
    /// at infinity are allowed.
    pub fn from_plane_triples(
        src: [Point; 3],
        dst: [Point; 3],
    ) -> Result<MobiusMap, GeomError> {
        let to_spinor = |z: Point| {
            if z.is_infinite() {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (z, Complex64::new(1.0, 0.0))
            }
        };
        let m_src = basis_map_spinors([to_spinor(src[0]), to_spinor(src[1]), to_spinor(src[2])])?;
        let m_dst = basis_map_spinors([to_spinor(dst[0]), to_spinor(dst[1]), to_spinor(dst[2])])?;
        Ok(m_dst.compose(&m_src.inverse()))
    }
}

/// Spherical cap of a plane circle under the stereographic chart.
pub fn circle_to_cap(circle: &Circle) -> SphereCap {
    CircleMat::from_circle(circle)
        .to_cap()
        .expect("every plane circle is a cap")
}

/// Plane circle of a spherical cap; errors if the cap passes through the
/// north pole (its chart image is a line).
pub fn cap_to_circle(cap: &SphereCap) -> Result<Circle, GeomError> {
    CircleMat::from_cap(cap).to_circle()
}

/// Homogeneous coordinates of a sphere point: `[X + iY : 1 - Z]`, or the
/// projectively equal `[1 + Z : X - iY]` when the first is ill-conditioned.
fn spinor(p: Vec3) -> (Complex64, Complex64) {
    if p.z <= 0.0 {
        (Complex64::new(p.x, p.y), Complex64::new(1.0 - p.z, 0.0))
    } else {
        (Complex64::new(1.0 + p.z, 0.0), Complex64::new(p.x, -p.y))
    }
}

fn spinor_point(xi: Complex64, eta: Complex64) -> Vec3 {
    let n = xi.norm_sqr() + eta.norm_sqr();
    let w = xi * eta.conj();
    Vec3::new(
        2.0 * w.re / n,
        2.0 * w.im / n,
        (xi.norm_sqr() - eta.norm_sqr()) / n,
    )
}

/// Matrix taking the projective basis `[1:0], [0:1], [1:1]` to three points.
fn basis_map_spinors(
    pts: [(Complex64, Complex64); 3],
) -> Result<MobiusMap, GeomError> {
    let [(x1, y1), (x2, y2), (x3, y3)] = pts;
    // Solve lambda (x1, y1) + mu (x2, y2) = (x3, y3).
    let det = x1 * y2 - x2 * y1;
    if det.norm() < 1e-30 {
        return Err(GeomError::DegenerateTriple);
    }
    let lambda = (x3 * y2 - x2 * y3) / det;
    let mu = (x1 * y3 - x3 * y1) / det;
    if lambda.norm() < 1e-15 || mu.norm() < 1e-15 {
        return Err(GeomError::DegenerateTriple);
    }
    Ok(MobiusMap {
        a: lambda * x1,
        b: mu * x2,
        c: lambda * y1,
        d: mu * y2,
    }
    .normalized())
}

fn basis_map(pts: [Vec3; 3]) -> Result<MobiusMap, GeomError> {
    basis_map_spinors([spinor(pts[0]), spinor(pts[1]), spinor(pts[2])])
}
