//! Dances on knot diagrams given by extended Gauss codes: schedules of
//! dancers that trace the diagram under over-first, under-first and
//! virtual-crossing rules, bridge counts and slides, braid closures, and
//! exhaustive minimal searches over small codes.

pub mod braid;
pub mod bridge;
pub mod codec;
pub mod dance;
pub mod search;

pub use braid::{braid_closure, braid_schedule, parse_braid, BraidError, BraidWord};
pub use bridge::{bridge_count, bridge_slide, reduce_to_bridge_minimal, BridgeError, BridgeReport, Reduction};
pub use codec::{parse_code, serialize_code, CodecError, DiagramCode, Passage, PassageKind};
pub use dance::{try_dance, Configuration, DanceError, Rule, Trace};
pub use search::{dance_numbers, min_dancers, DanceNumbers, MinDance, SearchError};
