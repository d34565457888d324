//! Geometry and spectra of cusped hyperbolic orbifolds attached to the
//! normalizers of `Gamma_0(n)` for square-free levels `n`.
//!
//! The crate has two halves that share a common exact-arithmetic core:
//!
//! * a geometric half ([`qfield`], [`hypgeom`], [`groups`], [`cheeger`])
//!   that builds Ford fundamental domains for the normalizer
//!   `N(Gamma_0(n))` and its index-two rotation subgroup, enumerates
//!   short closed geodesics and cone-point arcs, and computes Cheeger
//!   isoperimetric constants by the split-and-offset method;
//! * a spectral half ([`specbessel`], [`hejhal`], [`cmforms`]) that
//!   evaluates K-Bessel functions of imaginary order, runs Hejhal's
//!   algorithm for Maass cusp forms in the four symmetry classes, and
//!   constructs the explicit level-17 CM forms.
//!
//! Ten levels are supported out of the box via [`groups::catalog`]:
//! `11, 15, 17, 19, 22, 26, 33, 42, 55, 66`.

pub mod cheeger;
pub mod cmforms;
pub mod groups;
pub mod hejhal;
pub mod hypgeom;
pub mod parallel;
pub mod qfield;
pub mod specbessel;
