use std::io;

use thiserror::Error;

/// Errors raised anywhere in the modeling / imaging chain.
#[derive(Debug, Error)]
pub enum RtmError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("numerical instability detected at step {step}")]
    Instability { step: usize },

    #[error(
        "source multipathing covers {fraction:.3} of the image zone (limit {limit:.3}); \
         the imaging conditions cannot be certified"
    )]
    SmeViolation { fraction: f64, limit: f64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<RtmError>,
    },
}

impl RtmError {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            RtmError::Instability { .. } => 3,
            RtmError::SmeViolation { .. } => 4,
            RtmError::Io(_) => 1,
            RtmError::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, RtmError>;

/// Tag an error with the pipeline stage it came from.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            RtmError::Stage { .. } => e,
            other => RtmError::Stage { stage, source: Box::new(other) },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_keeps_exit_code() {
        let e: Result<()> = Err(RtmError::Instability { step: 12 });
        let e = e.stage("forward").unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(e.to_string(), "forward stage failed: numerical instability detected at step 12");
        let c: Result<()> = Err(RtmError::Config("x".into()));
        assert_eq!(c.stage("image").unwrap_err().exit_code(), 2);
    }
}
