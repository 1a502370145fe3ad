use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("degenerate chart at theta = {theta} (fallback psi := 0 applied)")]
    DegenerateChart { theta: f64, fallback: [f64; 3] },
    #[error("singular chart: theta = {theta} is within {tol} of a pole")]
    SingularChart { theta: f64, tol: f64 },
    #[error("Möbius pole: the transformed point is at infinity")]
    MobiusPole,
    #[error("invalid axis {0}, expected 1, 2 or 3")]
    InvalidAxis(usize),
    #[error("index out of range: j = {j}, m = {m}, n = {n}")]
    IndexOutOfRange { j: u32, m: i32, n: i32 },
    #[error("invalid Jacobi degree/parameters: n = {n}, alpha = {alpha}, beta = {beta}")]
    InvalidDegree { n: i32, alpha: i32, beta: i32 },
    #[error("invalid orbit label j = {0}, expected j >= 1")]
    InvalidOrbit(i64),
    #[error("kernel factorization degenerate: every probe hit a zero of delta_j")]
    FactorizationDegenerate,
    #[error("scale pole: 1 - zeta^2 vanishes")]
    ScalePole,
    #[error("probe failure: {0}")]
    ProbeFailure(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
