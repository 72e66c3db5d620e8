use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The enclosure straddles an integer boundary; recompute with more bits.
    #[error("floor not determined at {bits} bits of precision")]
    NeedsMorePrecision { bits: u32 },
    #[error("precision escalation exceeded the cap of {cap} bits")]
    PrecisionCapExceeded { cap: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not congruent to 1 mod 4")]
    NotOneModFour(u64),
    #[error("{0} is outside the supported range")]
    OutOfRange(u64),
    #[error("construction range is empty for n = {n}")]
    RangeEmpty { n: u64 },
    #[error("block {index} does not fit in {width} bits")]
    BlockOverflow { index: usize, width: u32 },
    #[error("grid resolution 2^-{resolution} is coarser than the required 2^-{required}")]
    ResolutionTooCoarse { resolution: u32, required: u32 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
