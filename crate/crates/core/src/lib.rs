//! Circle-packing numerics for approximating the intrinsic circle domain
//! conformally equivalent to a finitely connected planar domain.
//!
//! The pipeline cuts a hexagonal circle packing out of the input domain,
//! computes per-boundary hyperbolic packing labels, welds a combinatorial
//! disc onto each boundary cycle, solves the resulting sphere packing and
//! reports convergence diagnostics (tangency residuals, boundary roundness,
//! per-face quasiconformal dilatation).
//!
//! Modules follow the stages of that computation:
//!
//! * [`complex`] — oriented combinatorial triangulations stored as flowers
//! * [`geom`] — tangency-triangle angles, Möbius maps, stereographic charts
//! * [`label`] — radius iteration producing packing labels
//! * [`layout`] — circle placement and Möbius normalization
//! * [`cookie`] — hexagonal cut-out meshing of a planar domain
//! * [`weld`] — boundary parametrizations and combinatorial welding
//! * [`pipeline`] — end-to-end orchestration and diagnostics
//! * [`cli`] — argument parsing, JSON emission and SVG rendering

pub mod cli;
pub mod complex;
pub mod cookie;
pub mod geom;
pub mod label;
pub mod layout;
pub mod pipeline;
pub mod weld;
