//! Transfer functions: pairwise share exchanges between agents as a function of their two
//! reports, the flow decomposition of arbitrary assignments into such exchanges, and the
//! rank-based representations of the linear family.

mod axioms;
mod decompose;
mod function;
mod rank;
mod reconstruct;

pub use axioms::{check_ef_transfer_lemmas, check_f_axioms, check_sp_monotone, AxiomReport, EfLemmaReport};
pub use decompose::{decompose_to_transfers, FlowCycle, Node, TransferMap};
pub use function::{
    f_from_v, pairwise_cells, pairwise_exchange, validate_transfer_function, Check, TransferFunction, TransferReport,
    DENSE_CAP,
};
pub use rank::{g_from_f, v_from_g, RankDerivation, RankTransfer, VectorDerivation, RANK_PERMUTATION_CAP};
pub use reconstruct::{reconstruct_f, roundtrip_check, RoundTrip};
