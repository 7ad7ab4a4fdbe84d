//! Bridge between the graph calculus and the state-vector engine.
//!
//! Three pieces live here: preparing the shared state of an associated graph
//! ([`build_graph_state`]), the dictionary mapping outcome messages to the
//! correction gates clients apply ([`correction_gate`]), and the classical
//! prediction of where corrections must go and what graph remains
//! ([`correction_targets`], [`predicted_graph`]).
//!
//! Correction gates are the adjoints of the byproduct operators that a Pauli
//! measurement leaves on the unmeasured qubits; applying them restores the
//! plain graph state of the transformed graph. All neighborhoods feeding the
//! correction rules are read from the *pre-measurement* graph.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, Outcome, PauliAxis, PureState, SingleQubitGate};
use crate::graph::{Graph, GraphError, VertexId};

/// Classical message tag exchanged between orchestrator and clients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MsgType {
    B0Designation,
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    ZPlus,
    ZMinus,
    Ack,
}

impl MsgType {
    /// The message announcing a measurement result.
    pub fn outcome_message(axis: PauliAxis, outcome: Outcome) -> Self {
        match (axis, outcome) {
            (PauliAxis::X, Outcome::Plus) => MsgType::XPlus,
            (PauliAxis::X, Outcome::Minus) => MsgType::XMinus,
            (PauliAxis::Y, Outcome::Plus) => MsgType::YPlus,
            (PauliAxis::Y, Outcome::Minus) => MsgType::YMinus,
            (PauliAxis::Z, Outcome::Plus) => MsgType::ZPlus,
            (PauliAxis::Z, Outcome::Minus) => MsgType::ZMinus,
        }
    }

    /// True for the six outcome-carrying messages (the ones a client answers
    /// with a correction and an ACK).
    pub fn is_correction(self) -> bool {
        !matches!(self, MsgType::B0Designation | MsgType::Ack)
    }

    pub fn axis_outcome(self) -> Option<(PauliAxis, Outcome)> {
        match self {
            MsgType::XPlus => Some((PauliAxis::X, Outcome::Plus)),
            MsgType::XMinus => Some((PauliAxis::X, Outcome::Minus)),
            MsgType::YPlus => Some((PauliAxis::Y, Outcome::Plus)),
            MsgType::YMinus => Some((PauliAxis::Y, Outcome::Minus)),
            MsgType::ZPlus => Some((PauliAxis::Z, Outcome::Plus)),
            MsgType::ZMinus => Some((PauliAxis::Z, Outcome::Minus)),
            _ => None,
        }
    }
}

impl fmt::Display for MsgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MsgType::B0Designation => "B0_DESIGNATION",
            MsgType::XPlus => "X_PLUS",
            MsgType::XMinus => "X_MINUS",
            MsgType::YPlus => "Y_PLUS",
            MsgType::YMinus => "Y_MINUS",
            MsgType::ZPlus => "Z_PLUS",
            MsgType::ZMinus => "Z_MINUS",
            MsgType::Ack => "ACK",
        };
        f.write_str(s)
    }
}

/// One entry of the measurement plan: the basis for the j-th orchestrator
/// qubit, with an optional override of the support-vertex choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisChoice {
    pub axis: PauliAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0_override: Option<VertexId>,
}

impl BasisChoice {
    pub fn new(axis: PauliAxis) -> Self {
        Self { axis, b0_override: None }
    }

    pub fn with_b0(axis: PauliAxis, b0: VertexId) -> Self {
        Self { axis, b0_override: Some(b0) }
    }
}

/// Measurement plan: one [`BasisChoice`] per orchestrator vertex, in
/// measurement order (ascending vertex id).
pub type BasesArray = Vec<BasisChoice>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResourceError {
    #[error("cannot build a state for an empty graph")]
    EmptyGraph,
    #[error("{0} does not carry a correction")]
    NotACorrection(MsgType),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("measurement {index}: {source}")]
    AtMeasurement { index: usize, source: GraphError },
    #[error("expected {expected} entries (one per orchestrator vertex), got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Builds `|G>` by applying CZ along every edge of `g` to `|+>^{⊗n}`.
///
/// Labels follow ascending vertex id; amplitude of basis state `x` is
/// `2^{-n/2} (-1)^{e(x)}` where `e(x)` counts edges with both endpoints set.
pub fn build_graph_state(g: &Graph) -> Result<PureState, ResourceError> {
    if g.is_empty() {
        return Err(ResourceError::EmptyGraph);
    }
    let labels: Vec<VertexId> = g.vertices().collect();
    let mut state = PureState::plus_state(&labels)?;
    for (a, b) in g.edges() {
        state = state.apply_cz(a, b)?;
    }
    Ok(state)
}

/// The gate a node applies when it receives an outcome message.
///
/// `is_b0` selects the support-vertex branch of the X rules; it is ignored
/// for Y and Z messages.
pub fn correction_gate(m: MsgType, is_b0: bool) -> Result<SingleQubitGate, ResourceError> {
    match m {
        MsgType::ZPlus => Ok(SingleQubitGate::identity()),
        MsgType::ZMinus => Ok(SingleQubitGate::pauli_z()),
        MsgType::YPlus => Ok(SingleQubitGate::sqrt_minus_i_z().adjoint()),
        MsgType::YMinus => Ok(SingleQubitGate::sqrt_plus_i_z().adjoint()),
        MsgType::XPlus if is_b0 => Ok(SingleQubitGate::sqrt_plus_i_y().adjoint()),
        MsgType::XMinus if is_b0 => Ok(SingleQubitGate::sqrt_minus_i_y().adjoint()),
        MsgType::XPlus | MsgType::XMinus => Ok(SingleQubitGate::pauli_z()),
        MsgType::B0Designation | MsgType::Ack => Err(ResourceError::NotACorrection(m)),
    }
}

/// Which vertices must receive a correction for one measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTargets {
    /// Vertices that get an outcome message (the measured vertex never
    /// appears here).
    pub dest_sample: BTreeSet<VertexId>,
    /// The support vertex, for X measurements.
    pub b0_designee: Option<VertexId>,
}

/// Destination set for the corrections of measuring `a` along `axis` with
/// result `outcome`. Every neighborhood is read from `g_before`, the graph
/// as it stood before this measurement.
pub fn correction_targets(
    g_before: &Graph,
    a: VertexId,
    axis: PauliAxis,
    outcome: Outcome,
    b0: Option<VertexId>,
) -> Result<CorrectionTargets, ResourceError> {
    let na = g_before.neighborhood(a)?;
    match axis {
        PauliAxis::Z | PauliAxis::Y => Ok(CorrectionTargets {
            dest_sample: na.clone(),
            b0_designee: None,
        }),
        PauliAxis::X => {
            if na.is_empty() {
                return Err(GraphError::EmptyNeighborhood(a).into());
            }
            let b0 = b0.expect("X measurement requires a support vertex");
            if !na.contains(&b0) {
                return Err(GraphError::NotANeighbor { a, b0 }.into());
            }
            let nb0 = g_before.neighborhood(b0)?;
            let mut dest = BTreeSet::from([b0]);
            match outcome {
                // +: sigma_z onto N_a \ (N_b0 ∪ {b0})
                Outcome::Plus => {
                    dest.extend(na.difference(nb0).filter(|&&v| v != b0));
                }
                // -: sigma_z onto N_b0 \ (N_a ∪ {a})
                Outcome::Minus => {
                    dest.extend(nb0.difference(na).filter(|&&v| v != a));
                }
            }
            Ok(CorrectionTargets { dest_sample: dest, b0_designee: Some(b0) })
        }
    }
}

/// Default support-vertex policy: the lowest-id neighbor, unless overridden.
/// An override must be a current neighbor of `a`.
pub fn resolve_b0(g: &Graph, a: VertexId, over: Option<VertexId>) -> Result<VertexId, GraphError> {
    let na = g.neighborhood(a)?;
    match over {
        Some(b0) if na.contains(&b0) => Ok(b0),
        Some(b0) => Err(GraphError::NotANeighbor { a, b0 }),
        None => na.first().copied().ok_or(GraphError::EmptyNeighborhood(a)),
    }
}

/// Folds the per-axis graph transforms over the orchestrator vertices of
/// `g0` (ascending id order), resolving each X support vertex against the
/// evolving graph. The measurement outcomes do not influence the resulting
/// graph; the argument is kept so callers state the run they are predicting,
/// and its length is validated.
pub fn predicted_graph(
    g0: &Graph,
    bases: &BasesArray,
    outcomes: &[Outcome],
) -> Result<Graph, ResourceError> {
    let order: Vec<VertexId> = g0.orchestrator_vertices().iter().copied().collect();
    if bases.len() != order.len() {
        return Err(ResourceError::LengthMismatch { expected: order.len(), got: bases.len() });
    }
    if outcomes.len() != order.len() {
        return Err(ResourceError::LengthMismatch { expected: order.len(), got: outcomes.len() });
    }
    let mut g = g0.clone();
    for (index, (&a, choice)) in order.iter().zip(bases).enumerate() {
        g = apply_transform(&g, a, choice)
            .map_err(|source| ResourceError::AtMeasurement { index, source })?;
    }
    Ok(g)
}

/// One step of the fold: the graph transform matching a basis choice.
pub fn apply_transform(g: &Graph, a: VertexId, choice: &BasisChoice) -> Result<Graph, GraphError> {
    match choice.axis {
        PauliAxis::Z => g.transform_z(a),
        PauliAxis::Y => g.transform_y(a),
        PauliAxis::X => {
            let b0 = resolve_b0(g, a, choice.b0_override)?;
            g.transform_x(a, b0)
        }
    }
}
