use std::fmt;
use std::process::ExitCode;

use ventplan_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Config,
    Infeasible,
    Simulation,
    Io,
}

impl FailureKind {
    pub fn exit_code(self) -> u8 {
        match self {
            FailureKind::Config => 2,
            FailureKind::Infeasible => 3,
            FailureKind::Simulation => 4,
            FailureKind::Io => 5,
        }
    }

    pub fn of(error: &Error) -> Self {
        match error {
            Error::Io { .. } => FailureKind::Io,
            Error::Infeasible(_) | Error::GenerationExhausted { .. } => FailureKind::Infeasible,
            Error::SeriesMismatch(_) | Error::MissingSchedule { .. } => FailureKind::Simulation,
            Error::Geometry(_)
            | Error::Program(_)
            | Error::Epw { .. }
            | Error::Construction(_)
            | Error::InvalidPlan(_)
            | Error::Config(_)
            | Error::Json(_) => FailureKind::Config,
        }
    }
}

/// A command error together with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub kind: FailureKind,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(kind: FailureKind, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            kind,
            error: error.into(),
        }
    }

    pub fn config(message: impl fmt::Display) -> Self {
        Failure::new(FailureKind::Config, anyhow::anyhow!("{message}"))
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Failure::new(FailureKind::Io, Error::io(path, source))
    }

    pub fn context(self, message: impl fmt::Display + Send + Sync + 'static) -> Self {
        Failure {
            kind: self.kind,
            error: self.error.context(message),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind.exit_code())
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure::new(FailureKind::of(&error), error)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct() {
        let kinds = [
            FailureKind::Config,
            FailureKind::Infeasible,
            FailureKind::Simulation,
            FailureKind::Io,
        ];
        let mut codes: Vec<u8> = kinds.iter().map(|k| k.exit_code()).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes, vec![2, 3, 4, 5]);
    }

    #[test]
    fn core_errors_map_to_their_stage() {
        assert_eq!(FailureKind::of(&Error::Infeasible("x".into())), FailureKind::Infeasible);
        assert_eq!(FailureKind::of(&Error::SeriesMismatch("x".into())), FailureKind::Simulation);
        assert_eq!(FailureKind::of(&Error::Epw { line: 3, message: "x".into() }), FailureKind::Config);
        let io = Error::io("a", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(FailureKind::of(&io), FailureKind::Io);
    }
}
