//! Radius-iteration solver for packing labels.
//!
//! The update rule is the uniform-neighbor model: at a vertex with current
//! angle sum `theta` and `k` faces, the petals are replaced by `k` copies of
//! an effective petal radius reproducing `theta`, and the vertex radius is
//! moved to the value at which that uniform flower closes up to exactly
//! 2 pi. Sweeps run in ascending vertex id (Gauss-Seidel) so solves are
//! reproducible; an optional superstep extrapolation accelerates the
//! monotone baseline scheme.

use crate::complex::{ComplexError, Triangulation};
use crate::geom::{euclidean_angle, hyperbolic_angle, GeomError, HypRadius};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabelError {
    #[error("vertex {0} lies on the boundary")]
    BoundaryVertex(u32),
    #[error("complex has no interior vertices")]
    NoInteriorVertices,
    #[error("complex has no boundary")]
    NoBoundary,
    #[error("complex is not a sphere")]
    NotASphere,
    #[error("puncture vertex {0} has degree below 3")]
    PunctureDegree(u32),
    #[error("label has not converged (residual {0:.3e})")]
    UnconvergedLabel(f64),
    #[error("boundary data: {0}")]
    BadBoundaryData(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Per-vertex radius assignment in one of the two solver geometries.
#[derive(Debug, Clone, PartialEq)]
pub enum PackingLabel {
    /// Euclidean radii, boundary entries prescribed by the caller.
    Euclidean(Vec<f64>),
    /// Hyperbolic radii in decay form; boundary entries are horocycles for
    /// the maximal label.
    Hyperbolic(Vec<HypRadius>),
}

impl PackingLabel {
    pub fn len(&self) -> usize {
        match self {
            PackingLabel::Euclidean(r) => r.len(),
            PackingLabel::Hyperbolic(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn euclidean_radius(&self, v: u32) -> Option<f64> {
        match self {
            PackingLabel::Euclidean(r) => Some(r[v as usize]),
            PackingLabel::Hyperbolic(_) => None,
        }
    }

    pub fn hyp_radius(&self, v: u32) -> Option<HypRadius> {
        match self {
            PackingLabel::Hyperbolic(r) => Some(r[v as usize]),
            PackingLabel::Euclidean(_) => None,
        }
    }
}

/// Convergence record for one solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub iterations: u64,
    pub final_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Tolerance on the max interior angle-sum residual.
    pub tol: f64,
    /// Maximum number of full sweeps.
    pub max_iter: u64,
    /// Superstep extrapolation between sweeps. Off by default; the plain
    /// scheme is the monotone one.
    pub superstep: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 1_000_000,
            superstep: false,
        }
    }
}

/// Angle sum at an interior vertex under a label.
pub fn angle_sum(tri: &Triangulation, label: &PackingLabel, v: u32) -> Result<f64, LabelError> {
    if !tri.is_interior(v) {
        return Err(LabelError::BoundaryVertex(v));
    }
    Ok(angle_sum_unchecked(tri, label, v)?)
}

fn angle_sum_unchecked(
    tri: &Triangulation,
    label: &PackingLabel,
    v: u32,
) -> Result<f64, GeomError> {
    let mut total = 0.0;
    match label {
        PackingLabel::Euclidean(r) => {
            let rv = r[v as usize];
            for (u, w) in tri.wedges(v) {
                total += euclidean_angle(rv, r[u as usize], r[w as usize])?;
            }
        }
        PackingLabel::Hyperbolic(r) => {
            let rv = r[v as usize];
            for (u, w) in tri.wedges(v) {
                total += hyperbolic_angle(rv, r[u as usize], r[w as usize])?;
            }
        }
    }
    Ok(total)
}

/// Max interior angle-sum residual |angle_sum - 2 pi| of a label.
pub fn max_interior_residual(tri: &Triangulation, label: &PackingLabel) -> f64 {
    let mut worst = 0.0f64;
    for v in tri.interior_vertices() {
        if let Ok(s) = angle_sum_unchecked(tri, label, v) {
            worst = worst.max((s - 2.0 * PI).abs());
        } else {
            worst = f64::INFINITY;
        }
    }
    worst
}

/// Euclidean solve with prescribed boundary radii.
///
/// `boundary_radii` is indexed by vertex id; entries at interior vertices are
/// ignored. Interior radii start at the mean prescribed radius.
pub fn solve_euclidean(
    tri: &Triangulation,
    boundary_radii: &[f64],
    opts: SolveOptions,
) -> Result<(PackingLabel, SolveReport), LabelError> {
    if !tri.has_boundary() {
        return Err(LabelError::NoBoundary);
    }
    if tri.interior_vertices().next().is_none() {
        return Err(LabelError::NoInteriorVertices);
    }
    if boundary_radii.len() != tri.vertex_count() {
        return Err(LabelError::BadBoundaryData(format!(
            "expected {} radii, got {}",
            tri.vertex_count(),
            boundary_radii.len()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in tri.boundary_vertices() {
        let r = boundary_radii[v as usize];
        if !(r > 0.0) || !r.is_finite() {
            return Err(LabelError::BadBoundaryData(format!(
                "boundary radius at vertex {v} must be positive, got {r}"
            )));
        }
        sum += r;
        count += 1;
    }
    let init = sum / count as f64;
    let mut radii: Vec<f64> = (0..tri.vertex_count() as u32)
        .map(|v| {
            if tri.is_interior(v) {
                init
            } else {
                boundary_radii[v as usize]
            }
        })
        .collect();

    let interior: Vec<u32> = tri.interior_vertices().collect();
    let report = iterate(
        tri,
        &interior,
        opts,
        &mut EuclideanState { radii: &mut radii },
    )?;
    Ok((PackingLabel::Euclidean(radii), report))
}

/// Maximal hyperbolic label: horocycles on every boundary vertex.
///
/// A complex whose vertices are all on the boundary has the trivial maximal
/// label (every circle a horocycle) and converges immediately.
pub fn solve_max_hyperbolic(
    tri: &Triangulation,
    opts: SolveOptions,
) -> Result<(PackingLabel, SolveReport), LabelError> {
    if !tri.has_boundary() {
        return Err(LabelError::NoBoundary);
    }
    let mut radii: Vec<HypRadius> = (0..tri.vertex_count() as u32)
        .map(|v| {
            if tri.is_interior(v) {
                HypRadius::from_decay(0.5).unwrap()
            } else {
                HypRadius::HOROCYCLE
            }
        })
        .collect();
    let interior: Vec<u32> = tri.interior_vertices().collect();
    if interior.is_empty() {
        return Ok((
            PackingLabel::Hyperbolic(radii),
            SolveReport {
                iterations: 0,
                final_residual: 0.0,
                converged: true,
            },
        ));
    }
    let report = iterate(
        tri,
        &interior,
        opts,
        &mut HyperbolicState { radii: &mut radii },
    )?;
    Ok((PackingLabel::Hyperbolic(radii), report))
}

/// Geometry-specific pieces of the sweep.
trait SweepState {
    fn update_vertex(&mut self, tri: &Triangulation, v: u32) -> Result<(), GeomError>;
    fn residual(&self, tri: &Triangulation, interior: &[u32]) -> f64;
    fn snapshot(&self) -> Vec<f64>;
    fn extrapolate(&mut self, prev: &[f64], factor: f64);
}

struct EuclideanState<'a> {
    radii: &'a mut Vec<f64>,
}

impl SweepState for EuclideanState<'_> {
    fn update_vertex(&mut self, tri: &Triangulation, v: u32) -> Result<(), GeomError> {
        let k = tri.degree(v) as f64;
        let rv = self.radii[v as usize];
        let mut theta = 0.0;
        for (u, w) in tri.wedges(v) {
            theta += euclidean_angle(rv, self.radii[u as usize], self.radii[w as usize])?;
        }
        // Effective uniform petal for the observed angle sum, then the
        // radius at which that flower closes up to 2 pi.
        let s = (theta / (2.0 * k)).sin();
        let r_hat = rv * s / (1.0 - s);
        let delta = (PI / k).sin();
        self.radii[v as usize] = r_hat * (1.0 - delta) / delta;
        Ok(())
    }

    fn residual(&self, tri: &Triangulation, interior: &[u32]) -> f64 {
        let mut worst = 0.0f64;
        for &v in interior {
            let rv = self.radii[v as usize];
            let mut theta = 0.0;
            for (u, w) in tri.wedges(v) {
                theta += euclidean_angle(rv, self.radii[u as usize], self.radii[w as usize])
                    .unwrap_or(f64::NAN);
            }
            worst = worst.max((theta - 2.0 * PI).abs());
        }
        worst
    }

    fn snapshot(&self) -> Vec<f64> {
        self.radii.clone()
    }

    fn extrapolate(&mut self, prev: &[f64], factor: f64) {
        for (r, &p) in self.radii.iter_mut().zip(prev) {
            let stepped = *r + factor * (*r - p);
            if stepped > 0.0 && stepped.is_finite() {
                *r = stepped;
            }
        }
    }
}

struct HyperbolicState<'a> {
    radii: &'a mut Vec<HypRadius>,
}

impl SweepState for HyperbolicState<'_> {
    fn update_vertex(&mut self, tri: &Triangulation, v: u32) -> Result<(), GeomError> {
        let k = tri.degree(v) as f64;
        let rv = self.radii[v as usize];
        let mut theta = 0.0;
        for (u, w) in tri.wedges(v) {
            theta += hyperbolic_angle(rv, self.radii[u as usize], self.radii[w as usize])?;
        }
        let s = (theta / (2.0 * k)).sin();
        let sv = rv.decay().sqrt();
        // Effective uniform petal decay reproducing theta; at or beyond the
        // horocycle limit the petal clamps to decay zero.
        let t_hat = if s >= sv {
            0.0
        } else {
            (sv - s) / (sv * (1.0 - s * sv))
        };
        // Solve sin(pi/k) = sqrt(t) (1 - t_hat) / (1 - t t_hat) for t.
        let delta = (PI / k).sin();
        let b = 1.0 - t_hat;
        let x = 2.0 * delta / (b + (b * b + 4.0 * delta * delta * t_hat).sqrt());
        let t_new = (x * x).min(1.0 - 1e-15);
        self.radii[v as usize] = HypRadius::from_decay(t_new).expect("decay in range");
        Ok(())
    }

    fn residual(&self, tri: &Triangulation, interior: &[u32]) -> f64 {
        let mut worst = 0.0f64;
        for &v in interior {
            let rv = self.radii[v as usize];
            let mut theta = 0.0;
            for (u, w) in tri.wedges(v) {
                theta += hyperbolic_angle(rv, self.radii[u as usize], self.radii[w as usize])
                    .unwrap_or(f64::NAN);
            }
            worst = worst.max((theta - 2.0 * PI).abs());
        }
        worst
    }

    fn snapshot(&self) -> Vec<f64> {
        self.radii.iter().map(|r| r.decay()).collect()
    }

    fn extrapolate(&mut self, prev: &[f64], factor: f64) {
        for (r, &p) in self.radii.iter_mut().zip(prev) {
            let stepped = r.decay() + factor * (r.decay() - p);
            if (0.0..1.0).contains(&stepped) {
                *r = HypRadius::from_decay(stepped).unwrap();
            }
        }
    }
}

fn iterate(
    tri: &Triangulation,
    interior: &[u32],
    opts: SolveOptions,
    state: &mut dyn SweepState,
) -> Result<SolveReport, LabelError> {
    let mut residual = state.residual(tri, interior);
    let mut prev_residual = residual;
    let mut iterations = 0u64;
    while residual > opts.tol && iterations < opts.max_iter {
        let before = if opts.superstep { state.snapshot() } else { Vec::new() };
        for &v in interior {
            state.update_vertex(tri, v)?;
        }
        iterations += 1;
        residual = state.residual(tri, interior);
        if opts.superstep && residual > opts.tol {
            let lambda = residual / prev_residual;
            if lambda > 0.0 && lambda < 1.0 {
                let factor = (lambda / (1.0 - lambda)).min(30.0);
                if factor > 0.1 {
                    state.extrapolate(&before, factor);
                    residual = state.residual(tri, interior);
                }
            }
        }
        if !residual.is_finite() {
            return Err(LabelError::BadBoundaryData(
                "iteration produced a non-finite angle sum".into(),
            ));
        }
        prev_residual = residual;
    }
    Ok(SolveReport {
        iterations,
        final_residual: residual,
        converged: residual <= opts.tol,
    })
}

/// Pack a sphere complex by puncturing: the complex minus the puncture is
/// packed maximally into the unit disc, projected stereographically, and the
/// exterior of the unit disc becomes the puncture's circle (the cap of
/// angular radius pi/2 around the north pole, tangent to every horocycle of
/// the disc packing). The result satisfies all tangencies and is unique up
/// to Möbius maps.
pub fn solve_sphere(
    tri: &Triangulation,
    puncture: u32,
    opts: SolveOptions,
) -> Result<(crate::layout::Packing, SolveReport), LabelError> {
    use crate::geom::{circle_to_cap, SphereCap, Vec3};
    use crate::layout::{default_anchor, layout, Packing, PackingGeometry};

    if !tri.is_sphere() {
        return Err(LabelError::NotASphere);
    }
    if tri.degree(puncture) < 3 {
        return Err(LabelError::PunctureDegree(puncture));
    }
    let (sub, remap) = tri.remove_vertex(puncture)?;
    let (label, report) = solve_max_hyperbolic(&sub, opts)?;
    if !report.converged {
        return Err(LabelError::UnconvergedLabel(report.final_residual));
    }
    let disc = layout(&sub, &label, default_anchor(&sub))
        .map_err(|e| LabelError::BadBoundaryData(format!("layout failed: {e}")))?;
    let circles = match &disc.geometry {
        PackingGeometry::Disc(c) => c,
        _ => unreachable!("hyperbolic labels lay out in the disc"),
    };
    let mut caps = Vec::with_capacity(tri.vertex_count());
    for old in 0..tri.vertex_count() as u32 {
        if old == puncture {
            caps.push(SphereCap {
                center: Vec3::new(0.0, 0.0, 1.0),
                radius: std::f64::consts::FRAC_PI_2,
            });
        } else {
            let new = remap[old as usize].expect("only the puncture is removed");
            caps.push(circle_to_cap(&circles[new as usize]));
        }
    }
    Ok((
        Packing {
            complex: tri.clone(),
            geometry: PackingGeometry::Sphere(caps),
        },
        report,
    ))
}

/// Residual trace of the plain scheme, for monotonicity checks.
pub fn residual_trace(
    tri: &Triangulation,
    boundary_radii: Option<&[f64]>,
    sweeps: usize,
) -> Result<Vec<f64>, LabelError> {
    let interior: Vec<u32> = tri.interior_vertices().collect();
    let mut out = Vec::with_capacity(sweeps + 1);
    match boundary_radii {
        Some(b) => {
            let init = {
                let (mut s, mut c) = (0.0, 0);
                for v in tri.boundary_vertices() {
                    s += b[v as usize];
                    c += 1;
                }
                s / c as f64
            };
            let mut radii: Vec<f64> = (0..tri.vertex_count() as u32)
                .map(|v| if tri.is_interior(v) { init } else { b[v as usize] })
                .collect();
            let mut st = EuclideanState { radii: &mut radii };
            out.push(st.residual(tri, &interior));
            for _ in 0..sweeps {
                for &v in &interior {
                    st.update_vertex(tri, v)?;
                }
                out.push(st.residual(tri, &interior));
            }
        }
        None => {
            let mut radii: Vec<HypRadius> = (0..tri.vertex_count() as u32)
                .map(|v| {
                    if tri.is_interior(v) {
                        HypRadius::from_decay(0.5).unwrap()
                    } else {
                        HypRadius::HOROCYCLE
                    }
                })
                .collect();
            let mut st = HyperbolicState { radii: &mut radii };
            out.push(st.residual(tri, &interior));
            for _ in 0..sweeps {
                for &v in &interior {
                    st.update_vertex(tri, v)?;
                }
                out.push(st.residual(tri, &interior));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::hex_disc;

    fn uniform_boundary(tri: &Triangulation, r: f64) -> Vec<f64> {
        vec![r; tri.vertex_count()]
    }

    /// Hub radius of the uniform n-flower with unit petals: 1/sin(pi/n) - 1.
    fn flower_hub_radius(n: usize) -> f64 {
        1.0 / (PI / n as f64).sin() - 1.0
    }

    fn n_flower(n: u32) -> Triangulation {
        let mut faces = Vec::new();
        for k in 1..=n {
            let next = if k == n { 1 } else { k + 1 };
            faces.push([0, k, next]);
        }
        Triangulation::build_from_faces(&faces).unwrap()
    }

    #[test]
    fn hex_flower_unit_boundary() {
        let t = hex_disc(1);
        let (label, report) =
            solve_euclidean(&t, &uniform_boundary(&t, 1.0), SolveOptions::default()).unwrap();
        assert!(report.converged);
        let hub = label.euclidean_radius(0).unwrap();
        assert!((hub - 1.0).abs() < 1e-8, "hub {hub}");
    }

    #[test]
    fn uniform_flowers_match_closed_form() {
        for n in [4u32, 5, 7, 12] {
            let t = n_flower(n);
            let (label, report) =
                solve_euclidean(&t, &uniform_boundary(&t, 1.0), SolveOptions::default()).unwrap();
            assert!(report.converged, "n={n}");
            let hub = label.euclidean_radius(0).unwrap();
            let want = flower_hub_radius(n as usize);
            assert!((hub - want).abs() < 1e-8, "n={n} hub={hub} want={want}");
            assert!(report.final_residual <= 1e-10);
        }
    }

    #[test]
    fn angle_sum_examples() {
        let t = hex_disc(1);
        let label = PackingLabel::Euclidean(vec![1.0; 7]);
        let s = angle_sum(&t, &label, 0).unwrap();
        assert!((s - 2.0 * PI).abs() < 1e-12);
        assert!(matches!(
            angle_sum(&t, &label, 1),
            Err(LabelError::BoundaryVertex(1))
        ));

        // 4-flower with hub radius sqrt(2) - 1 also closes up exactly.
        let t4 = n_flower(4);
        let mut radii = vec![1.0; 5];
        radii[0] = 2.0f64.sqrt() - 1.0;
        let s = angle_sum(&t4, &PackingLabel::Euclidean(radii), 0).unwrap();
        assert!((s - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_hex_flower_hub() {
        let t = hex_disc(1);
        let (label, report) = solve_max_hyperbolic(&t, SolveOptions::default()).unwrap();
        assert!(report.converged);
        let hub = label.hyp_radius(0).unwrap();
        // Hub of the maximal hex flower has hyperbolic radius ln 2.
        assert!((hub.radius() - (2.0f64).ln()).abs() < 1e-8, "hub {}", hub.radius());
        let s = angle_sum(&t, &label, 0).unwrap();
        assert!((s - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn hyperbolic_angle_sum_example() {
        // Hub ln 2 with horocycle petals: each face contributes pi/3.
        let t = hex_disc(1);
        let mut radii = vec![HypRadius::HOROCYCLE; 7];
        radii[0] = HypRadius::from_radius((2.0f64).ln()).unwrap();
        let s = angle_sum(&t, &PackingLabel::Hyperbolic(radii), 0).unwrap();
        assert!((s - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn deeper_hex_converges_and_hub_grows() {
        let one = hex_disc(1);
        let two = hex_disc(2);
        let (l1, r1) = solve_max_hyperbolic(&one, SolveOptions::default()).unwrap();
        let (l2, r2) = solve_max_hyperbolic(&two, SolveOptions::default()).unwrap();
        assert!(r1.converged && r2.converged);
        assert!(max_interior_residual(&two, &l2) <= 1e-10);
        // Adding layers shrinks every shared circle (discrete Schwarz lemma):
        // the 19-circle packing squeezes the hub below the flower's ln 2.
        assert!(l2.hyp_radius(0).unwrap().radius() < l1.hyp_radius(0).unwrap().radius());
        assert!(r2.final_residual <= 1e-10);
    }

    #[test]
    fn no_interior_cases() {
        let t = Triangulation::build_from_faces(&[[0, 1, 2]]).unwrap();
        assert!(matches!(
            solve_euclidean(&t, &uniform_boundary(&t, 1.0), SolveOptions::default()),
            Err(LabelError::NoInteriorVertices)
        ));
        // The maximal hyperbolic label exists trivially: all horocycles.
        let (label, report) = solve_max_hyperbolic(&t, SolveOptions::default()).unwrap();
        assert!(report.converged);
        assert!(label.hyp_radius(0).unwrap().is_horocycle());
    }

    #[test]
    fn monotone_residual_without_superstep() {
        for tri in [hex_disc(2), hex_disc(3)] {
            let trace = residual_trace(&tri, None, 40).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-14, "hyperbolic residual rose: {w:?}");
            }
            let boundary = uniform_boundary(&tri, 1.0);
            let trace = residual_trace(&tri, Some(&boundary), 40).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-14, "euclidean residual rose: {w:?}");
            }
        }
    }

    #[test]
    fn superstep_agrees_with_plain() {
        let tri = hex_disc(3);
        let plain = solve_max_hyperbolic(&tri, SolveOptions::default()).unwrap();
        let fast = solve_max_hyperbolic(
            &tri,
            SolveOptions {
                superstep: true,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert!(plain.1.converged && fast.1.converged);
        assert!(fast.1.iterations <= plain.1.iterations);
        for v in 0..tri.vertex_count() as u32 {
            let a = plain.0.hyp_radius(v).unwrap().decay();
            let b = fast.0.hyp_radius(v).unwrap().decay();
            assert!((a - b).abs() < 1e-9, "v={v} {a} {b}");
        }
    }

    #[test]
    fn label_independent_of_initialization() {
        // Solve, perturb nothing (initialization is fixed), but check the
        // scaling covariance: doubling boundary radii doubles the hub.
        let t = hex_disc(2);
        let (l1, _) =
            solve_euclidean(&t, &uniform_boundary(&t, 1.0), SolveOptions::default()).unwrap();
        let (l2, _) =
            solve_euclidean(&t, &uniform_boundary(&t, 2.0), SolveOptions::default()).unwrap();
        for v in t.interior_vertices() {
            let a = l1.euclidean_radius(v).unwrap();
            let b = l2.euclidean_radius(v).unwrap();
            assert!((b - 2.0 * a).abs() < 1e-8 * b.abs());
        }
    }

    #[test]
    fn twelve_flower_closed_form() {
        let t = n_flower(12);
        let (label, report) =
            solve_euclidean(&t, &uniform_boundary(&t, 1.0), SolveOptions::default()).unwrap();
        assert!(report.converged);
        let hub = label.euclidean_radius(0).unwrap();
        assert!((hub - 2.8637033051562737).abs() < 1e-8, "hub {hub}");
    }
}
