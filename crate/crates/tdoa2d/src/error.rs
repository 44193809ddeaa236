//! Library error type.

use std::fmt;

/// Errors surfaced by geometry construction, exact evaluation, and parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The three receivers lie on one line; the oriented area is exactly zero.
    CollinearReceivers,
    /// A quantity normalized by a receiver distance was requested at that receiver.
    AtReceiver(usize),
    /// Newton projection onto the curve hit a vanishing gradient.
    GradientVanishes,
    /// A rational literal could not be parsed.
    InvalidRational(String),
    /// Structurally invalid input (wrong arity, bad field, out-of-range value).
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CollinearReceivers => write!(f, "receivers are collinear"),
            Error::AtReceiver(i) => write!(f, "evaluation point coincides with receiver {i}"),
            Error::GradientVanishes => write!(f, "curve gradient vanishes at the projection point"),
            Error::InvalidRational(s) => write!(f, "invalid rational literal: {s:?}"),
            Error::InvalidInput(s) => write!(f, "invalid input: {s}"),
        }
    }
}

impl std::error::Error for Error {}
