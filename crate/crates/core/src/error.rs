use std::fmt;

/// Pipeline stage tag attached to errors raised inside [`crate::inverse::reconstruct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Forward,
    Noise,
    Alpha,
    Newton,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Forward => "forward",
            Stage::Noise => "noise",
            Stage::Alpha => "alpha",
            Stage::Newton => "newton",
        })
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("domain error: {function}({arg}) requires {requirement}")]
    Domain {
        function: &'static str,
        arg: f64,
        requirement: &'static str,
    },

    #[error("range error: {function}({arg}) exceeds the argument limit {limit}")]
    Range {
        function: &'static str,
        arg: f64,
        limit: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate configuration: |rho*K0(1) - I0(1)| = {denominator:e} is below {threshold:e}")]
    Degenerate { denominator: f64, threshold: f64 },

    #[error("grid alignment: r1 = {r1} does not fall on a node of the N = {n} grid (r1*N = {product})")]
    GridAlignment { r1: f64, n: usize, product: f64 },

    #[error("singular linear system: zero pivot at row {row}")]
    Singular { row: usize },

    #[error("Newton iteration did not converge in {iterations} iterations (last sigma = {last_sigma:e}, gradient = {gradient:e})")]
    NoConvergence {
        iterations: usize,
        last_sigma: f64,
        gradient: f64,
    },

    #[error("Newton iterate kept leaving the admissible interval (0, {sigma_max:e}] at sigma = {sigma:e}")]
    ProjectionCycle { sigma: f64, sigma_max: f64 },

    #[error("discrepancy principle failed: achieved residuals span [{min_residual:e}, {max_residual:e}], target band is [{lower:e}, {upper:e}]")]
    Discrepancy {
        min_residual: f64,
        max_residual: f64,
        lower: f64,
        upper: f64,
    },

    #[error("no sign change of the camouflage determinant for sigma2 in ({lo:e}, {hi:e})")]
    NoRoot {
        lo: f64,
        hi: f64,
        /// `(sigma2, scaled determinant)` samples of the failed scan.
        scan: Vec<(f64, f64)>,
    },

    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Strips stage wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root_cause(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
