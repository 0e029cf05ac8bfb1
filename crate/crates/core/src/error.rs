use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the pipelines can surface.
///
/// Each variant has a stable name ([`Error::kind`]) and a distinct process
/// exit code ([`Error::exit_code`]) used by the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("window mean is zero or negligible (dark or invalid ROI)")]
    ZeroMean,
    #[error("signal too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("band {low_hz}-{high_hz} Hz is not inside (0, {nyquist_hz}) Hz")]
    BandOutOfRange {
        low_hz: f64,
        high_hz: f64,
        nyquist_hz: f64,
    },
    #[error("unstable filter: pole magnitude {0}")]
    UnstableFilter(f64),
    #[error("zero variance input")]
    ZeroVariance,
    #[error("window of length {len} at {start} exceeds output length {total}")]
    OutOfBounds {
        start: usize,
        len: usize,
        total: usize,
    },
    #[error("covariance matrix is singular (constant or duplicated channel)")]
    SingularCovariance,
    #[error("joint diagonalization did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("no spectral bin falls inside {low_hz}-{high_hz} Hz")]
    EmptyBand { low_hz: f64, high_hz: f64 },
    #[error("chrominance ratio undefined: std(B) is zero")]
    AlphaUndefined,
    #[error("projection ratio undefined: std(Y_s) is zero while std(X_s) is not")]
    SigmaUndefined,
    #[error("no feature passes the quality threshold")]
    NoFeatures,
    #[error("all tracked points were lost")]
    AllPointsLost,
    #[error("too few trajectories: {got} remain, need at least {needed}")]
    TooFewTrajectories { needed: usize, got: usize },
    #[error("total spectral power is zero")]
    ZeroPower,
    #[error("empty heart-rate series")]
    EmptySeries,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-uniform sampling at row {row}")]
    NonUniformSampling { row: usize },
    #[error("truncated frame: {trailing} trailing bytes")]
    TruncatedFrame { trailing: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("empty ROI in frame {frame}")]
    EmptyRoi { frame: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::ZeroMean => "ZeroMean",
            Error::TooShort { .. } => "TooShort",
            Error::BandOutOfRange { .. } => "BandOutOfRange",
            Error::UnstableFilter(_) => "UnstableFilter",
            Error::ZeroVariance => "ZeroVariance",
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::SingularCovariance => "SingularCovariance",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::EmptyBand { .. } => "EmptyBand",
            Error::AlphaUndefined => "AlphaUndefined",
            Error::SigmaUndefined => "SigmaUndefined",
            Error::NoFeatures => "NoFeatures",
            Error::AllPointsLost => "AllPointsLost",
            Error::TooFewTrajectories { .. } => "TooFewTrajectories",
            Error::ZeroPower => "ZeroPower",
            Error::EmptySeries => "EmptySeries",
            Error::Parse(_) => "ParseError",
            Error::NonUniformSampling { .. } => "NonUniformSampling",
            Error::TruncatedFrame { .. } => "TruncatedFrame",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptyRoi { .. } => "EmptyRoi",
            Error::Config(_) => "ConfigError",
            Error::Io { .. } => "IoError",
        }
    }

    /// Process exit code for the command-line tool. Zero is never returned.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::InvalidInput(_) => 3,
            Error::Io { .. } => 4,
            Error::Parse(_) => 10,
            Error::NonUniformSampling { .. } => 11,
            Error::TruncatedFrame { .. } => 12,
            Error::DimensionMismatch { .. } => 13,
            Error::EmptyRoi { .. } => 14,
            Error::ZeroMean => 20,
            Error::TooShort { .. } => 21,
            Error::BandOutOfRange { .. } => 22,
            Error::UnstableFilter(_) => 23,
            Error::ZeroVariance => 24,
            Error::OutOfBounds { .. } => 25,
            Error::SingularCovariance => 30,
            Error::NoConvergence { .. } => 31,
            Error::EmptyBand { .. } => 32,
            Error::AlphaUndefined => 40,
            Error::SigmaUndefined => 41,
            Error::NoFeatures => 50,
            Error::AllPointsLost => 51,
            Error::TooFewTrajectories { .. } => 52,
            Error::ZeroPower => 60,
            Error::EmptySeries => 61,
        }
    }
}

/// Exit-code table printed by `pulseframe --help`.
pub const EXIT_CODE_TABLE: &str = "\
Exit codes:
   0  success
   2  ConfigError          incompatible or malformed options
   3  InvalidInput         precondition violated
   4  IoError              file could not be read or written
  10  ParseError           malformed CSV / PPM / trajectory file
  11  NonUniformSampling   trace CSV time column is not uniform
  12  TruncatedFrame       raw stream length is not a whole number of frames
  13  DimensionMismatch    frames or channels disagree in size
  14  EmptyRoi             ROI selects no pixel in some frame
  20  ZeroMean             window mean is zero (dark ROI)
  21  TooShort             signal shorter than a window or filter padding
  22  BandOutOfRange       pass band not inside (0, fs/2)
  23  UnstableFilter       designed filter has a pole on/outside the unit circle
  24  ZeroVariance         constant signal cannot be standardized
  25  OutOfBounds          overlap-add window past the end of the output
  30  SingularCovariance   channels are constant or linearly dependent
  31  NoConvergence        joint diagonalization hit its sweep cap
  32  EmptyBand            no spectral bin inside the search band
  40  AlphaUndefined       CHROM: std(B) is zero
  41  SigmaUndefined       POS: std(Y_s) is zero while std(X_s) is not
  50  NoFeatures           no trackable corner in the first frame
  51  AllPointsLost        every tracked point was dropped
  52  TooFewTrajectories   fewer than three usable trajectories
  60  ZeroPower            spectrum has no power in 0-240 BPM
  61  EmptySeries          heart-rate series is empty";
