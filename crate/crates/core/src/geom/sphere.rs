//! Stereographic chart and rigid-motion Möbius maps of the unit sphere.
//!
//! Convention: the unit circle maps to the equator, 0 to the south pole
//! (0,0,-1) and infinity to the north pole (0,0,1).

use num_complex::Complex64;

use super::mobius::MobiusMap;
use super::Point;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        self.scaled(1.0 / n)
    }

    /// Angular distance between two unit vectors, via atan2 for accuracy
    /// near 0 and pi.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }
}

/// Spherical circle: unit center direction and angular radius in (0, pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereCap {
    pub center: Vec3,
    pub radius: f64,
}

impl SphereCap {
    /// A point on the boundary circle, at parameter `ang` around the axis.
    pub fn boundary_point(&self, ang: f64) -> Vec3 {
        let n = self.center;
        // Any frame orthogonal to n.
        let helper = if n.z.abs() < 0.9 {
            Vec3::new(0.0, 0.0, 1.0)
        } else {
            Vec3::new(1.0, 0.0, 0.0)
        };
        let e1 = n.cross(helper).normalized();
        let e2 = n.cross(e1);
        n.scaled(self.radius.cos())
            .add(e1.scaled(self.radius.sin() * ang.cos()))
            .add(e2.scaled(self.radius.sin() * ang.sin()))
    }
}

/// Plane point to unit sphere.
pub fn stereographic(z: Point) -> Vec3 {
    if z.is_infinite() || z.norm_sqr().is_infinite() {
        return Vec3::new(0.0, 0.0, 1.0);
    }
    let n = z.norm_sqr();
    Vec3::new(2.0 * z.re / (1.0 + n), 2.0 * z.im / (1.0 + n), (n - 1.0) / (1.0 + n))
}

/// Unit sphere to plane; the north pole maps to infinity.
pub fn stereographic_inv(p: Vec3) -> Point {
    if (1.0 - p.z).abs() < 1e-300 {
        return Complex64::new(f64::INFINITY, f64::INFINITY);
    }
    Complex64::new(p.x / (1.0 - p.z), p.y / (1.0 - p.z))
}

/// Rotation of the sphere by `angle` about the unit axis `n` (right-handed),
/// as a Möbius map of the plane chart.
pub fn rotation_about(n: Vec3, angle: f64) -> MobiusMap {
    let (s, c) = (angle / 2.0).sin_cos();
    // SU(2) element cos(t/2) I + i sin(t/2) (m . sigma) with the axis
    // reflected in y; the chart z = (X + iY)/(1 - Z) carries the standard
    // Pauli correspondence with opposite y-orientation.
    let m = Vec3::new(n.x, -n.y, n.z);
    MobiusMap {
        a: Complex64::new(c, s * m.z),
        b: Complex64::new(s * m.y, s * m.x),
        c: Complex64::new(-s * m.y, s * m.x),
        d: Complex64::new(c, -s * m.z),
    }
}

/// Rotation taking unit vector `u` to unit vector `v` along the great circle.
pub fn rotation_taking(u: Vec3, v: Vec3) -> MobiusMap {
    let axis = u.cross(v);
    let s = axis.norm();
    let c = u.dot(v);
    if s < 1e-15 {
        if c > 0.0 {
            return MobiusMap::identity();
        }
        // Antipodal: rotate by pi about any axis orthogonal to u.
        let helper = if u.z.abs() < 0.9 {
            Vec3::new(0.0, 0.0, 1.0)
        } else {
            Vec3::new(1.0, 0.0, 0.0)
        };
        let axis = u.cross(helper).normalized();
        return rotation_about(axis, std::f64::consts::PI);
    }
    rotation_about(axis.scaled(1.0 / s), s.atan2(c))
}

/// Hyperbolic translation of the ball pushing points toward the unit vector
/// `u`; strength `s` is the translation length (s = 0 is the identity).
pub fn boost_toward(u: Vec3, s: f64) -> MobiusMap {
    let north = Vec3::new(0.0, 0.0, 1.0);
    let r = rotation_taking(north, u);
    // z -> e^s z fixes the poles and pushes mass toward the north pole.
    let scale = MobiusMap::scaling(Complex64::new(s.exp(), 0.0));
    r.compose(&scale).compose(&r.inverse())
}
