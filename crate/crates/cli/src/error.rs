use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cgmysv_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        use cgmysv_core::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                E::Io { .. } => 3,
                E::Numerical(_) | E::Domain(_) | E::GridMismatch(_) => 2,
                _ => 1,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cgmysv_core::Error as E;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(E::InvalidParameter { name: "kappa".into(), reason: "negative".into() }).exit_code(), 1);
        assert_eq!(CliError::Core(E::Numerical("nan".into())).exit_code(), 2);
        assert_eq!(CliError::Core(E::Domain("strip".into())).exit_code(), 2);
        let io = || std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::Core(E::Io { path: "p".into(), source: io() }).exit_code(), 3);
        assert_eq!(CliError::Io { path: "p".into(), source: io() }.exit_code(), 3);
        let parse = E::Parse { path: "c.csv".into(), line: 3, reason: "bad".into() };
        assert_eq!(CliError::Core(parse).exit_code(), 1);
    }
}
