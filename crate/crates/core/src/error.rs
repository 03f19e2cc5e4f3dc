use std::io;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported security level: {0} bits")]
    UnsupportedSecurityLevel(u32),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("length mismatch for {what}: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// The envelope did not authenticate: the row does not match the token,
    /// or the record was tampered with.
    #[error("decryption failed")]
    DecryptionFailed,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("incompatible constraint set: {0}")]
    IncompatibleConstraints(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                what,
                expected,
                found,
            })
        }
    }
}
