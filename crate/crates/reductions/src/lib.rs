//! Instance generators for the lower-bound reduction chain, each paired
//! with a translator that carries source-level runs to target-level
//! firing sequences.

use fracreach::machines::Config;
use thiserror::Error;

pub mod amplifier;
pub mod checks;
pub mod counter;
pub mod ctrl;
pub mod gadgets;
pub mod pcp;
pub mod product;
pub mod tcm;

pub use amplifier::{assemble_unary_instance, ivass_amplifier, qvass_amplifier, structured_to_superstructured};
pub use counter::pda_counter;
pub use ctrl::ivass_to_cvassrl;
pub use gadgets::{gadget_add, gadget_double, gadget_halve, gadget_idle};
pub use pcp::{pcp_to_tcm, BoundedPcp};
pub use product::cvassrl_to_cpvass;
pub use tcm::tcm_to_ivass;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("value {0} is not a power-of-two fraction")]
    NotStructured(String),
    #[error("value {value} exceeds 2^{k}")]
    TooLarge { value: String, k: u32 },
    #[error("run does not fit the source machine: {0}")]
    BadRun(String),
}

/// A reachability or coverability question constrained to runs of
/// exactly `steps` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunLengthInstance<M> {
    pub machine: M,
    pub c_init: Config,
    pub c_fin: Config,
    pub steps: usize,
}
