pub mod cli;
pub mod closed;
pub mod error;
pub mod filtered;
pub mod karp_miller;
pub mod model;
pub mod omega;
pub mod omega_check;
pub mod oracles;
pub mod vasz;

pub use closed::{DownBasis, Inclusion, UpBasis};
pub use error::AnalysisError;
pub use omega::{Natural, OmegaError, OmegaNat, OmegaVec, PositionSet};

/// Arbitrary-precision counters, for systems whose values outgrow `u64`.
pub type BigNat = num_bigint::BigUint;

pub type OmegaVec64 = OmegaVec<u64>;
pub type OmegaVecBig = OmegaVec<BigNat>;
pub type DownBasis64 = DownBasis<u64>;
pub type DownBasisBig = DownBasis<BigNat>;
pub type UpBasis64 = UpBasis<u64>;
pub type Vas64 = model::Vas<u64>;
pub type Vasz64 = model::Vasz<u64>;
pub type Vassz64 = model::Vassz<u64>;
