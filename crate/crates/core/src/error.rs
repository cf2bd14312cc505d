use std::fmt;

use thiserror::Error;

/// Module that raised an error; rendered as the diagnostic prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Module {
    Spectra,
    Counting,
    Constants,
    Zeta,
    Weyl,
    Analysis,
    Descriptor,
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Module::Spectra => "spectra",
            Module::Counting => "counting",
            Module::Constants => "constants",
            Module::Zeta => "zeta",
            Module::Weyl => "weyl",
            Module::Analysis => "analysis",
            Module::Descriptor => "descriptor",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{module}: domain error: {msg}")]
    Domain { module: Module, msg: String },

    #[error("spectra: empty spectrum: cutoff {cutoff} is below the smallest eigenvalue {smallest}")]
    EmptySpectrum { cutoff: f64, smallest: f64 },

    #[error("{module}: spectrum materialized to {have}, required cutoff is {required}")]
    InsufficientCutoff {
        module: Module,
        have: f64,
        required: f64,
    },

    #[error("counting: sieve of {requested} entries exceeds the memory budget of {budget} entries")]
    Budget { requested: u64, budget: u64 },

    #[error("{module}: integer overflow while computing {what}")]
    Overflow { module: Module, what: String },

    #[error("{module}: s = {s} lies within {distance} of the pole at {pole}")]
    NearPole {
        module: Module,
        s: f64,
        pole: f64,
        distance: f64,
    },

    #[error("{module}: tolerance {tol} is below the precision floor {floor}")]
    PrecisionFloor { module: Module, tol: f64, floor: f64 },

    #[error("{module}: s = {s} is outside the valid region ({region})")]
    OutsideRegion {
        module: Module,
        s: f64,
        region: String,
    },

    #[error("zeta: extrapolation did not converge; level differences: {table}")]
    NonConvergent { table: String },

    #[error("{module}: unsupported: {msg}")]
    Unsupported { module: Module, msg: String },

    #[error("descriptor: {0}")]
    Descriptor(String),

    #[error("{module}: {msg}")]
    Io { module: Module, msg: String },
}

impl Error {
    pub(crate) fn domain(module: Module, msg: impl Into<String>) -> Self {
        Error::Domain {
            module,
            msg: msg.into(),
        }
    }

    pub(crate) fn unsupported(module: Module, msg: impl Into<String>) -> Self {
        Error::Unsupported {
            module,
            msg: msg.into(),
        }
    }

    pub(crate) fn overflow(module: Module, what: impl Into<String>) -> Self {
        Error::Overflow {
            module,
            what: what.into(),
        }
    }

    /// Usage-level problems (bad descriptors) as opposed to numerical domain errors.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Descriptor(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
