use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty impurity lattice: L = {l} with layer {layer} leaves no admissible column")]
    EmptyLattice { l: f64, layer: f64 },

    #[error("basis dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("impurity bump (radius 1/4) unresolved: grid spacing {hx} exceeds 1/8")]
    UnresolvedBump { hx: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("eigensolver failed to converge at index {index}")]
    NoConvergence { index: usize },

    #[error("factorization of (H - {shift}) is singular after {attempts} perturbations")]
    SingularShift { shift: f64, attempts: usize },

    #[error("missed eigenvalues in [{a}, {b}]: inertia certifies {certified}, solver found {found}")]
    MissedEigenvalues {
        a: f64,
        b: f64,
        certified: usize,
        found: usize,
    },

    #[error("pole of the Gamma function at {0}")]
    GammaPole(Complex64),

    #[error("Kummer U requires rho > 0, got {0}")]
    NonPositiveRho(f64),

    #[error("resolvent kernel evaluated at coincident points")]
    CoincidentPoints,

    #[error("z = {0} lies on a Landau level")]
    LandauPole(Complex64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("branch k-list does not cover the window [{a}, {b}]")]
    WindowNotCovered { a: f64, b: f64 },

    #[error("input vectors are not orthonormal (max Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("partition plateaus overlap: {0}")]
    PartitionOverlap(String),

    #[error("resolvent of {operator} is singular at z = {z}: distance {distance:e} below floor {floor:e}")]
    ResolventSingular {
        operator: &'static str,
        z: Complex64,
        distance: f64,
        floor: f64,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("ordering precondition violated: {0}")]
    Ordering(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
