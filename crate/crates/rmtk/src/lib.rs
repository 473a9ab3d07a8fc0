//! Random-matrix spectral toolkit.
//!
//! The crate has four numerical layers and a harness that ties them together:
//!
//! * [`union_metric`] — a coupling metric on the disjoint union of a family
//!   of finite-dimensional spaces, with diagnostics for the convergence
//!   dichotomy it induces (which space a converging sequence must settle in).
//! * [`ensembles`] — seeded generators for Wigner, sample-covariance,
//!   deformed-Wigner and fixed-dimension spiked-covariance matrices.
//! * [`spectra`] — symmetric/Hermitian eigenvalue extraction, empirical
//!   spectral CDFs, exact Kolmogorov–Smirnov distances and the empirical
//!   Stieltjes transform.
//! * [`laws`] — closed forms and fixed-point solvers for the limiting
//!   spectral laws (semicircle, Silverstein equation, deformed-Wigner
//!   system), Stieltjes inversion, numerical transform derivatives and the
//!   mean/covariance functions of the CLT for derivative linear statistics.
//! * [`harness`] — config-driven Monte Carlo experiments with deterministic
//!   CSV reporting, plus the CLI entry point.
//!
//! Everything is deterministic in its seed: rerunning an experiment with the
//! same configuration reproduces the report byte for byte, serial or
//! parallel.

pub mod ensembles;
pub mod harness;
pub mod laws;
pub mod spectra;
pub mod union_metric;
