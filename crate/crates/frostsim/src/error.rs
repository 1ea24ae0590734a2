//! Crate-wide error type.

/// Anything that can go wrong while building or running a simulation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{quantity} = {value} outside valid range [{min}, {max}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error(
        "property query (p = {p:.1} Pa, h = {h:.1} J/kg) outside table hull \
         (p: [{p_min:.1}, {p_max:.1}] Pa, h: [{h_min:.1}, {h_max:.1}] J/kg)"
    )]
    OutsideTableHull {
        p: f64,
        h: f64,
        p_min: f64,
        p_max: f64,
        h_min: f64,
        h_max: f64,
    },

    #[error("refrigerant table: {0}")]
    BadTable(String),

    #[error(
        "film surface temperature solve did not converge: residual {residual:.3e} W \
         after {iters} iterations (T_wall = {t_wall:.2} K, T_air = {t_air:.2} K)"
    )]
    SurfaceSolve {
        residual: f64,
        iters: usize,
        t_wall: f64,
        t_air: f64,
    },

    #[error("film volume holds no mass; temperature is undefined")]
    EmptyFilm,

    #[error("singular state transformation in {0}")]
    SingularTransform(String),

    #[error("{context}: {source}")]
    InModel {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("integration aborted at t = {t:.6} s: {reason}")]
    SolverAbort { t: f64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wrap an error with the identity of the component or CV it came from.
    pub fn in_model(self, context: impl Into<String>) -> Self {
        Error::InModel {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Shorthand for a config-tree error tied to a key path.
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
