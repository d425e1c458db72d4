//! Safe-landing pipeline for a nadir-camera UAV.
//!
//! The crate is organized along the processing chain:
//!
//! - [`imaging`]: grayscale conversion, Gaussian smoothing, Canny edge maps,
//!   PGM/PPM serialization.
//! - [`plz`]: potential landing zone (PLZ) detection on an edge map via an
//!   exact distance transform, contour clustering, and pixel-to-meter scaling.
//! - [`tracking`]: frame differencing, blob segmentation, greedy track
//!   association, velocity and time-to-reach estimation.
//! - [`decision`]: clearance verdicts from reach-time margins, zone selection,
//!   and the landing phase state machine.
//! - [`descent`]: quadrant-based depth screening and the vertical descent
//!   controller with time-of-flight cross-checks.
//! - [`sim`]: deterministic scenario world, frame/depth rendering, and ground
//!   truth extraction.
//! - [`mission`]: the closed-loop runner tying all stages together.

pub mod decision;
pub mod descent;
pub mod geometry;
pub mod imaging;
pub mod mission;
pub mod plz;
pub mod sim;
pub mod tracking;
