//! Nonlinear turbo codes with a controlled ones density.
//!
//! The crate covers the whole pipeline: table-driven constituent trellises
//! ([`trellis`]), distance audits ([`metrics`]), the permutation-based table
//! designer ([`designer`]), parallel concatenation with puncturing and spread
//! interleaving ([`turbo`]), symbol-wise log-MAP decoding ([`decode`]),
//! Z/BSC/broadcast-BSC channels and their capacity formulas ([`channel`]),
//! two-user superposition coding ([`superposition`]) and Monte Carlo
//! simulation harnesses with serializable reports ([`sim`]).

pub mod channel;
pub mod codefile;
pub mod decode;
pub mod designer;
mod error;
pub mod metrics;
pub mod sim;
pub mod superposition;
pub mod trellis;
pub mod turbo;

pub use channel::{ChannelModel, RatePoint};
pub use codefile::{CodeFile, DeclaredValues};
pub use decode::{Algorithm, DecoderConfig};
pub use designer::{DesignParams, DesignResult};
pub use error::{Error, Result};
pub use metrics::{DistanceMetric, DistanceReport, FreeDistance};
pub use sim::SimReport;
pub use superposition::SuperpositionSpec;
pub use trellis::{OctalLabel, StateSubTable, TableTrellis, TrellisTopology};
pub use turbo::{CodeSpec, Interleaver, PuncturePattern};
