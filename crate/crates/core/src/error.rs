use core::fmt;

/// Errors raised by the qubit control toolkit.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The Hamiltonian has (numerically) coincident eigenvalues.
    DegenerateHamiltonian { splitting: f64 },
    /// A state vector is not normalized within tolerance.
    NotNormalized { norm: f64 },
    /// Landau-Zener coupling `ω` is zero, so the sweep crosses a degeneracy.
    ZeroCoupling,
    /// Durations and grid sizes must be strictly positive.
    InvalidDuration(f64),
    /// A protocol was evaluated outside `[0, t_f]`.
    OutOfRange { t: f64, t_f: f64 },
    /// The operation needs a Landau-Zener protocol.
    WrongProtocolKind,
    /// Rotating-frame target is antipodal to the initial state; the geodesic is not unique.
    AntipodalTarget { zf: f64, t_f: f64 },
    /// A nonzero energy was requested from an identically zero waveform.
    ZeroWaveform,
    /// Ill-formed robustness ensemble request.
    InvalidEnsemble(&'static str),
    /// Ill-formed tabulated protocol; `row` is the zero-based sample index.
    InvalidTable { row: usize, reason: &'static str },
    /// Waveform and propagation grid disagree.
    GridMismatch { expected: usize, found: usize },
    /// Ill-formed input to a sweep or fit.
    InvalidInput(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateHamiltonian { splitting } => {
                write!(f, "degenerate Hamiltonian (|c| = {splitting:e})")
            }
            Error::NotNormalized { norm } => write!(f, "state is not normalized (norm = {norm})"),
            Error::ZeroCoupling => write!(f, "Landau-Zener coupling must be nonzero"),
            Error::InvalidDuration(t) => write!(f, "duration must be positive and finite, got {t}"),
            Error::OutOfRange { t, t_f } => write!(f, "time {t} outside [0, {t_f}]"),
            Error::WrongProtocolKind => write!(f, "operation requires a Landau-Zener protocol"),
            Error::AntipodalTarget { zf, t_f } => write!(
                f,
                "rotating-frame target is antipodal to the initial state (zf = {zf}, t_f = {t_f})"
            ),
            Error::ZeroWaveform => write!(f, "cannot rescale a zero waveform to a positive energy"),
            Error::InvalidEnsemble(why) => write!(f, "invalid ensemble: {why}"),
            Error::InvalidTable { row, reason } => write!(f, "invalid protocol table at sample {row}: {reason}"),
            Error::GridMismatch { expected, found } => {
                write!(f, "waveform has {found} steps but the grid has {expected}")
            }
            Error::InvalidInput(why) => write!(f, "invalid input: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
