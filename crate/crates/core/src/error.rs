//! Error type shared by every module.

use thiserror::Error;

/// Failures surfaced by the numerical routines.
///
/// The variant name is what the CLI prints on a numerical failure, so
/// names are kept stable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("StripExceeded: |Im z| = {im} is not below the strip half-width {halfwidth}")]
    StripExceeded { im: f64, halfwidth: f64 },

    #[error("NotADiffeomorphism: min F' = {min_derivative} at x = {at}")]
    NotADiffeomorphism { min_derivative: f64, at: f64 },

    #[error("NoConvergence: rotation number bracketed in [{lo}, {hi}] after {iterations} iterations")]
    NoConvergence { lo: f64, hi: f64, iterations: u64 },

    #[error("WrongRotationNumber: map does not have rotation number {p}/{q}")]
    WrongRotationNumber { p: i64, q: u32 },

    #[error("RootFindingIncomplete: cannot separate roots in {} suspect interval(s)", suspects.len())]
    RootFindingIncomplete { suspects: Vec<(f64, f64)> },

    #[error("EmptyPlateau: plateau {p}/{q} pinches at omega = {pinch}")]
    EmptyPlateau { p: i64, q: u32, pinch: f64 },

    #[error("ImagesOverlap: forward images {first} and {second} of the interval intersect")]
    ImagesOverlap { first: usize, second: usize },

    #[error("IllConditioned: least-squares condition estimate {condition:e} exceeds {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("HeightBelowMinimum: Im omega = {height} is below the solvable minimum {minimum}")]
    HeightBelowMinimum { height: f64, minimum: f64 },

    #[error("ExtrapolationDiverged: extrapolant gaps {gaps:?}")]
    ExtrapolationDiverged { gaps: Vec<f64> },

    #[error("NotInUpperHalfPlane: {re} + {im}i")]
    NotInUpperHalfPlane { re: f64, im: f64 },

    #[error("NotConverged: linearizing chart did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("OutsideBasin: x = {x} is outside ({lo}, {hi})")]
    OutsideBasin { x: f64, lo: f64, hi: f64 },

    #[error("NotHyperbolic: {reason}")]
    NotHyperbolic { reason: String },

    #[error("ParabolicPresent: a cycle has multiplier {multiplier}")]
    ParabolicPresent { multiplier: f64 },

    #[error("NonCoprimeHomology: ({a}, {b})")]
    NonCoprimeHomology { a: i64, b: i64 },

    #[error("WrongProfile: {reason}")]
    WrongProfile { reason: String },

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// The bare variant name, e.g. `"EmptyPlateau"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::StripExceeded { .. } => "StripExceeded",
            Error::NotADiffeomorphism { .. } => "NotADiffeomorphism",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::WrongRotationNumber { .. } => "WrongRotationNumber",
            Error::RootFindingIncomplete { .. } => "RootFindingIncomplete",
            Error::EmptyPlateau { .. } => "EmptyPlateau",
            Error::ImagesOverlap { .. } => "ImagesOverlap",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::HeightBelowMinimum { .. } => "HeightBelowMinimum",
            Error::ExtrapolationDiverged { .. } => "ExtrapolationDiverged",
            Error::NotInUpperHalfPlane { .. } => "NotInUpperHalfPlane",
            Error::NotConverged { .. } => "NotConverged",
            Error::OutsideBasin { .. } => "OutsideBasin",
            Error::NotHyperbolic { .. } => "NotHyperbolic",
            Error::ParabolicPresent { .. } => "ParabolicPresent",
            Error::NonCoprimeHomology { .. } => "NonCoprimeHomology",
            Error::WrongProfile { .. } => "WrongProfile",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
