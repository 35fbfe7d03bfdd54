//! Exact maximin-share (MMS) fair allocation of indivisible goods under
//! public item costs. Each agent approves a subset of the goods and values a
//! bundle at the total cost of its approved part.
//!
//! The crate provides:
//!
//! - a domain model with a canonical JSON wire format ([`instance`],
//!   [`json`]);
//! - an exact branch-and-bound maximin oracle used as ground truth
//!   ([`oracle`]);
//! - a constructive solver for three agents whose output always clears every
//!   share and is Pareto efficient ([`three_agent`]);
//! - a solver for any number of agents when approval sets are laminar,
//!   plus an efficiency repair pass ([`laminar`]);
//! - Sequential Allocation picking-sequence mechanisms ([`mechanisms`]);
//! - a strategyproofness auditor and a finite impossibility certificate for
//!   combining strategyproofness with shares and efficiency ([`strategy`]);
//! - seeded generators and the experiment suites behind the CLI ([`gen`],
//!   [`experiment`]).

pub mod error;
pub mod experiment;
pub mod gen;
pub mod goodset;
pub mod instance;
pub mod json;
pub mod laminar;
pub mod mechanisms;
pub mod oracle;
pub mod strategy;
pub mod three_agent;

pub use error::{Error, Result};
pub use goodset::GoodSet;
pub use instance::{
    is_pareto_efficient, validate_instance, Agent, AgentSpec, Allocation, Good, Instance,
    PoReport, PoWitness, RawGood, RawInstance, Value,
};
pub use oracle::{
    maximin_partition, mms_profile, mms_value, verify_mms, MaximinPartition, MmsProfile,
    MmsReport, MmsShortfall, SearchBudget,
};
