//! Error type shared by all modules.

use thiserror::Error;

/// Errors reported by library operations.
///
/// The variants map onto the CLI exit-code contract: [`Error::Format`],
/// [`Error::Structure`] and [`Error::Domain`] are input problems (exit 2),
/// [`Error::Resource`] is a guard refusing work beyond desk scale (exit 3),
/// and [`Error::Extraction`] is a failed well-definedness check that carries
/// a witness (exit 1).
#[derive(Debug, Error)]
pub enum Error {
    /// A multiplication table or element list violates a structural
    /// invariant (e.g. an entry outside the index range).
    #[error("structural error: {0}")]
    Structure(String),

    /// Inputs are individually well-formed but incompatible with the
    /// requested operation (dimension mismatch, unknown event, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A text file does not parse under the documented format.
    #[error("format error: {0}")]
    Format(String),

    /// A size guard refused the computation; the result is *unknown*,
    /// not negative.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A piggyback extraction is not single-valued under the given masks.
    #[error("extraction is not single-valued: {0}")]
    Extraction(String),

    /// Underlying I/O failure while reading or writing a file.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
