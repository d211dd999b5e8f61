use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a Grassmannian point: {rows}x{cols} matrix has rank below {rows}")]
    NotGrassmannianPoint { rows: usize, cols: usize },

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is singular")]
    Singular,

    #[error("outside chart: subspace meets the span of the trailing eigenvectors")]
    OutsideChart,

    #[error("point is not totally nonnegative")]
    NotTotallyNonnegative,

    #[error("the zero point has no trajectory crossing")]
    ZeroPoint,

    #[error("no time found where the trajectory norm crosses radius {radius}")]
    NoRadiusCrossing { radius: f64 },

    #[error("point lies outside the region closure")]
    OutsideRegion,

    #[error("no exit found: trajectory stays in the region closure down to t = {limit}")]
    NoExitFound { limit: f64 },

    #[error("root finding residual {residual:e} exceeds tolerance {tol:e}")]
    ToleranceNotMet { residual: f64, tol: f64 },

    #[error("degenerate hull: {0}")]
    DegenerateHull(String),

    #[error("floating interior component: interior Laplacian block is singular")]
    FloatingInterior,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
