use alloc::string::String;

/// Errors raised by the core routines.
///
/// The split mirrors how callers react: bad input is the caller's fault,
/// numerical failures are diagnostics worth reporting, and construction
/// errors mean a self-verifying constructor produced something that failed
/// its own check.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("construction error: {0}")]
    Construction(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => {
        $crate::Error::Input(alloc::format!($($arg)*))
    };
}
pub(crate) use input_err;
