//! AODV modelled in AWN: the routing-table data structure, the process
//! library, bounded exploration of scenarios and the correctness checks.

pub mod checks;
pub mod data;
pub mod error;
pub mod explorer;
pub mod model;
pub mod report;
pub mod scenario;
pub mod search;

pub use data::{DataConfig, InvMode, RouteEntry, RoutingTable, Store};
pub use error::Error;
pub use explorer::{Exploration, Explorer, State};
pub use model::{initial_node, load_program, Library, ModelError};
pub use report::{run_checks, Check, Report, Verdict};
pub use scenario::Scenario;
pub use search::{packet_delivery, SearchBounds, SearchOutcome};
