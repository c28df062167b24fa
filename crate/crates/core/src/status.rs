//! Integer status convention shared by every component boundary.

use std::fmt;

/// Status code returned across a component boundary. `0` is success,
/// negative values are library-defined error classes, and any other value
/// is passed through from an implementation untouched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Status(pub i32);

impl Status {
    pub const SUCCESS: Status = Status(0);
    pub const INVALID_ARGUMENT: Status = Status(-1);
    pub const ALLOCATION_FAILURE: Status = Status(-2);
    pub const TYPE_MISMATCH: Status = Status(-3);
    pub const NOT_FOUND: Status = Status(-4);
    pub const PLUGIN_FAILURE: Status = Status(-5);
    pub const SOLVER_FAILURE: Status = Status(-6);

    pub fn code(self) -> i32 {
        self.0
    }

    pub fn is_success(self) -> bool {
        self.0 == 0
    }

    /// Short name of the error class, or `"status"` for codes the library
    /// does not define.
    pub fn name(self) -> &'static str {
        match self.0 {
            0 => "success",
            -1 => "invalid argument",
            -2 => "allocation failure",
            -3 => "type mismatch",
            -4 => "not found",
            -5 => "plugin failure",
            -6 => "solver failure",
            _ => "status",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name(), self.0)
    }
}

impl From<i32> for Status {
    fn from(code: i32) -> Self {
        Status(code)
    }
}

/// A nonzero [`Status`] together with a human-readable message.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message} [{status}]")]
pub struct OifError {
    status: Status,
    message: String,
}

impl OifError {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        debug_assert!(!status.is_success(), "an error must carry a nonzero status");
        OifError {
            status,
            message: message.into(),
        }
    }

    pub fn invalid_argument(message: impl Into<String>) -> Self {
        Self::new(Status::INVALID_ARGUMENT, message)
    }

    pub fn allocation_failure(message: impl Into<String>) -> Self {
        Self::new(Status::ALLOCATION_FAILURE, message)
    }

    pub fn type_mismatch(message: impl Into<String>) -> Self {
        Self::new(Status::TYPE_MISMATCH, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(Status::NOT_FOUND, message)
    }

    pub fn plugin_failure(message: impl Into<String>) -> Self {
        Self::new(Status::PLUGIN_FAILURE, message)
    }

    pub fn solver_failure(message: impl Into<String>) -> Self {
        Self::new(Status::SOLVER_FAILURE, message)
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn code(&self) -> i32 {
        self.status.0
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

pub type Result<T, E = OifError> = std::result::Result<T, E>;

/// Collapses a result into the boundary status code.
pub fn status_of<T>(result: &Result<T>) -> Status {
    match result {
        Ok(_) => Status::SUCCESS,
        Err(e) => e.status(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_fixed() {
        assert_eq!(Status::SUCCESS.code(), 0);
        assert_eq!(Status::INVALID_ARGUMENT.code(), -1);
        assert_eq!(Status::ALLOCATION_FAILURE.code(), -2);
        assert_eq!(Status::TYPE_MISMATCH.code(), -3);
        assert_eq!(Status::NOT_FOUND.code(), -4);
        assert_eq!(Status::PLUGIN_FAILURE.code(), -5);
        assert_eq!(Status::SOLVER_FAILURE.code(), -6);
    }

    #[test]
    fn error_display_carries_code() {
        let e = OifError::not_found("no manifest for ivp/foo");
        assert_eq!(e.to_string(), "no manifest for ivp/foo [not found (-4)]");
        assert_eq!(status_of::<()>(&Err(e)), Status::NOT_FOUND);
        assert_eq!(status_of(&Ok(1)), Status::SUCCESS);
    }
}
