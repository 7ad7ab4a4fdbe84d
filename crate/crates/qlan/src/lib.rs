//! Simulation of entanglement topology engineering in a quantum LAN.
//!
//! A QLAN shares one multipartite graph state between a central orchestrator
//! and `k` single-qubit clients. By measuring its own qubits in chosen Pauli
//! bases and sending the outcomes over classical channels, the orchestrator
//! reshapes the entanglement between clients into an on-demand *artificial
//! topology* — without any further quantum communication.
//!
//! The crate is organized along that pipeline:
//!
//! - [`graph`]: the associated graph, its orchestrator/client partition and
//!   the per-axis measurement transforms (vertex deletion and local
//!   complementation).
//! - [`engine`]: a dense state-vector register with CZ, single-qubit gates
//!   and projective Pauli measurements.
//! - [`resources`]: graph-state preparation, the correction-gate dictionary
//!   and the classical prediction of destinations and final topology.
//! - [`netsim`]: the discrete-event network simulation (measurement protocol
//!   at the orchestrator, correction protocol at the clients, FIFO star
//!   channels) plus end-of-run verification.
//!
//! ```
//! use qlan::graph::Graph;
//! use qlan::engine::PauliAxis;
//! use qlan::resources::BasisChoice;
//! use qlan::netsim::{run_scenario, Scenario, Verdict};
//!
//! // Turn a 3-client chain into a triangle-free client path by measuring
//! // both orchestrator qubits in the Y basis.
//! let graph = Graph::linear_chain(3).unwrap();
//! let bases = vec![BasisChoice::new(PauliAxis::Y); 2];
//! let report = run_scenario(&Scenario::new(graph, bases)).unwrap();
//! assert_eq!(report.verdict, Verdict::Pass);
//! assert_eq!(report.predicted_graph.edge_count(), 2);
//! ```

pub mod engine;
pub mod graph;
pub mod netsim;
pub mod resources;

pub use engine::{Outcome, PauliAxis, PureState};
pub use graph::{Graph, VertexId};
pub use netsim::{run_scenario, sweep, Scenario, SimReport, Verdict};
pub use resources::{build_graph_state, predicted_graph, BasesArray, BasisChoice, MsgType};
