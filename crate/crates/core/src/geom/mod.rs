//! Geometric primitives shared by the solver and layout stages: apex angles
//! of mutually tangent circle triples in Euclidean, hyperbolic and spherical
//! geometry, Möbius transformations acting exactly on circles, the
//! stereographic chart between the plane and the unit sphere, and
//! least-squares circle fitting.

mod angles;
mod fit;
mod mobius;
mod sphere;

pub use angles::{euclidean_angle, hyperbolic_angle, spherical_angle};
pub use fit::fit_circle;
pub use mobius::{cap_to_circle, circle_to_cap, MobiusMap};
pub use sphere::{
    boost_toward, rotation_about, rotation_taking, stereographic, stereographic_inv, SphereCap,
    Vec3,
};

use num_complex::Complex64;
use thiserror::Error;

/// Complex plane coordinate used throughout.
pub type Point = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("decay must lie in [0,1), got {0}")]
    InvalidDecay(f64),
    #[error("apex radius is infinite (horocycle has no center)")]
    InfiniteApexRadius,
    #[error("spherical circles too large to form a triangle")]
    TriangleTooLarge,
    #[error("inverse trig argument {0} outside [-1,1] beyond tolerance")]
    AngleDomain(f64),
    #[error("image of circle is a line (circle passes through the map's pole)")]
    ImageIsLine,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate point triple")]
    DegenerateTriple,
    #[error("degenerate face")]
    DegenerateFace,
}

/// Hyperbolic radius stored as `decay = exp(-2h)`.
///
/// The encoding keeps horocycles (infinite radius) at the finite value 0 and
/// makes the tangency angle formula stable for deep circles.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HypRadius {
    decay: f64,
}

impl HypRadius {
    /// A circle of infinite hyperbolic radius.
    pub const HOROCYCLE: HypRadius = HypRadius { decay: 0.0 };

    pub fn from_decay(decay: f64) -> Result<Self, GeomError> {
        if !(0.0..1.0).contains(&decay) {
            return Err(GeomError::InvalidDecay(decay));
        }
        Ok(HypRadius { decay })
    }

    /// From a hyperbolic radius `h > 0`; `h = inf` yields the horocycle.
    pub fn from_radius(h: f64) -> Result<Self, GeomError> {
        if h.is_infinite() && h > 0.0 {
            return Ok(Self::HOROCYCLE);
        }
        if !(h > 0.0) {
            return Err(GeomError::NonPositiveRadius(h));
        }
        Ok(HypRadius { decay: (-2.0 * h).exp() })
    }

    pub fn decay(self) -> f64 {
        self.decay
    }

    pub fn is_horocycle(self) -> bool {
        self.decay == 0.0
    }

    /// Hyperbolic radius; infinite for a horocycle.
    pub fn radius(self) -> f64 {
        if self.is_horocycle() {
            f64::INFINITY
        } else {
            -0.5 * self.decay.ln()
        }
    }

    /// Euclidean radius of this circle when its hyperbolic center is at the
    /// origin of the unit disc: `tanh(h/2) = (1 - sqrt(decay)) / (1 + sqrt(decay))`.
    pub fn euclidean_radius_at_origin(self) -> f64 {
        let s = self.decay.sqrt();
        (1.0 - s) / (1.0 + s)
    }
}

/// Geometric model a circle lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Model {
    Plane,
    Disc,
    Sphere,
}

/// A plane circle: Euclidean center and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Circle { center, radius }
    }
}

/// Circle in one of the three models. `Plane` and `Disc` carry Euclidean
/// center/radius data (disc circles lie inside the closed unit disc);
/// `Sphere` carries a unit-sphere center and an angular radius below pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Circle3 {
    Plane(Circle),
    Disc(Circle),
    Sphere(SphereCap),
}

impl Circle3 {
    pub fn model(&self) -> Model {
        match self {
            Circle3::Plane(_) => Model::Plane,
            Circle3::Disc(_) => Model::Disc,
            Circle3::Sphere(_) => Model::Sphere,
        }
    }
}

pub(crate) const TRIG_CLAMP_TOL: f64 = 1e-14;

/// asin with arguments clamped into [-1,1] when within `TRIG_CLAMP_TOL`.
pub(crate) fn checked_asin(x: f64) -> Result<f64, GeomError> {
    if x.abs() <= 1.0 {
        Ok(x.asin())
    } else if x.abs() <= 1.0 + TRIG_CLAMP_TOL {
        Ok(x.clamp(-1.0, 1.0).asin())
    } else {
        Err(GeomError::AngleDomain(x))
    }
}

pub(crate) fn checked_acos(x: f64) -> Result<f64, GeomError> {
    if x.abs() <= 1.0 {
        Ok(x.acos())
    } else if x.abs() <= 1.0 + TRIG_CLAMP_TOL {
        Ok(x.clamp(-1.0, 1.0).acos())
    } else {
        Err(GeomError::AngleDomain(x))
    }
}
