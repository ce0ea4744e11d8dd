//! Multiresolution analysis: Daubechies transforms, scale blocks, packets,
//! the Fock-like norm and the refinement cutoff.

mod dwt;
mod fock;
mod packet;
mod refine;
mod wavelet;

pub use dwt::{dwt_forward, dwt_forward_to, dwt_inverse, scale_truncate, MraDecomposition};
pub use fock::{fock_distance, fock_norm};
pub use packet::{best_basis, best_basis_from_table, PacketBasis, PacketNode, PacketTable};
pub use refine::{l2_distance, refine_until, Refinement};
pub use wavelet::{Extension, WaveletFamily, WaveletSpec, DEFAULT_MOMENTS, MAX_MOMENTS, MIN_MOMENTS};

/// Default coarsest level: an 8-point approximation block per axis.
pub const DEFAULT_COARSEST_LEVEL: usize = 3;
