//! Discrete-event simulation of the QLAN.
//!
//! One orchestrator node owns the measurement plan and walks it
//! sequentially; each client node holds a single qubit and answers
//! correction messages. Classical channels form a star around the
//! orchestrator with a constant delay per link, so per-link delivery is
//! FIFO. The event loop is logically concurrent but executes
//! single-threaded and deterministically: events are ordered by
//! `(time, insertion sequence)`.
//!
//! The orchestrator never waits for client ACKs: corrections on client
//! qubits commute with measurements on orchestrator qubits, so in-flight
//! messages cannot disturb the next step. Corrections aimed at
//! orchestrator-held qubits (possible once measurements make orchestrator
//! vertices adjacent) are applied locally, before the next measurement,
//! with no message.
//!
//! A run ends by verifying the surviving register against the graph state
//! of the predicted graph, up to global phase.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{EngineError, Outcome, OutcomeSource, PauliAxis, PureState};
use crate::graph::{Graph, GraphError, VertexId};
use crate::resources::{
    build_graph_state, correction_gate, correction_targets, predicted_graph, resolve_b0,
    BasesArray, MsgType, ResourceError,
};

/// Network address of a node. The orchestrator is node 0; clients are
/// numbered from 1 in ascending order of the qubit they hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

pub const ORCHESTRATOR: NodeId = NodeId(0);

/// Time the orchestrator spends on one measurement step before scheduling
/// the next one. Purely a timeline artifact; correctness does not depend
/// on it.
const STEP_WORK_NS: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("measurement {index}: {reason}")]
    Protocol { index: usize, reason: String },
    #[error("measurement {index}: forced outcome {outcome} has probability {probability:.3e}")]
    ImpossibleOutcome { index: usize, outcome: Outcome, probability: f64 },
    #[error("sweep would need {required} runs, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
}

/// A timestamped classical message on an orchestrator-client link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalMessage {
    pub src: NodeId,
    pub dst: NodeId,
    pub msg_type: MsgType,
    pub measurement_index: usize,
    pub send_time_ns: u64,
    pub deliver_time_ns: u64,
}

/// What a run executes: initial topology, measurement plan, outcome policy,
/// timing and verification tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    pub graph: Graph,
    pub bases: BasesArray,
    /// Scripted outcomes, one per measurement; sampled from the Born rule
    /// when absent.
    pub forced_outcomes: Option<Vec<Outcome>>,
    pub seed: u64,
    pub channel_delay_ns: u64,
    pub tolerance: f64,
}

pub const DEFAULT_CHANNEL_DELAY_NS: u64 = 1_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl Scenario {
    pub fn new(graph: Graph, bases: BasesArray) -> Self {
        Self {
            graph,
            bases,
            forced_outcomes: None,
            seed: 0,
            channel_delay_ns: DEFAULT_CHANNEL_DELAY_NS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn n_o(&self) -> usize {
        self.graph.orchestrator_vertices().len()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let n_o = self.n_o();
        if self.graph.is_empty() {
            return Err(SimError::InvalidScenario("graph has no vertices".into()));
        }
        if self.graph.client_vertices().is_empty() {
            return Err(SimError::InvalidScenario(
                "graph must include at least one client vertex".into(),
            ));
        }
        if self.graph.vertex_count() > crate::engine::MAX_QUBITS {
            return Err(SimError::InvalidScenario(format!(
                "graph has {} vertices, the register supports at most {}",
                self.graph.vertex_count(),
                crate::engine::MAX_QUBITS
            )));
        }
        if self.bases.len() != n_o {
            return Err(SimError::InvalidScenario(format!(
                "bases length must equal n_o={n_o}"
            )));
        }
        if let Some(forced) = &self.forced_outcomes {
            if forced.len() != n_o {
                return Err(SimError::InvalidScenario(format!(
                    "forced_outcomes length must equal n_o={n_o}"
                )));
            }
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(SimError::InvalidScenario("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form; identifies the run in reports.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Knobs that are not part of the scenario itself.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Test hook: clients acknowledge but skip their correction gates, so
    /// verification must fail on any branch that needs a correction.
    pub tamper_corrections: bool,
    /// Per-client channel delay, overriding `channel_delay_ns` on that link.
    pub link_delay_overrides: BTreeMap<NodeId, u64>,
}

// ---------------------------------------------------------------------------
// Event queue
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// Run measurement step `j` at the orchestrator.
    Step(usize),
    /// Deliver a classical message to its destination.
    Deliver(ClassicalMessage),
}

#[derive(Clone, Debug)]
pub struct Event {
    pub time_ns: u64,
    pub seq: u64,
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct HeapKey {
    time_ns: u64,
    seq: u64,
}

/// Time-ordered pending events; ties broken by insertion sequence, so
/// same-time events run in the order they were scheduled.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<(HeapKey, usize)>>,
    slots: Vec<Option<Event>>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time_ns: u64, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        let slot = self.slots.len();
        self.slots.push(Some(Event { time_ns, seq, kind }));
        self.heap.push(Reverse((HeapKey { time_ns, seq }, slot)));
    }

    pub fn pop(&mut self) -> Option<Event> {
        let Reverse((_, slot)) = self.heap.pop()?;
        self.slots[slot].take()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

/// A correction gate a node applied to its qubit, for the trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppliedCorrection {
    pub measurement_index: usize,
    pub msg_type: MsgType,
    pub vertex: VertexId,
    pub gate: String,
}

/// Client node: one qubit, a support-vertex flag and a correction log.
///
/// The flag is set by a `B0_DESIGNATION` message and consumed by the next
/// `X_PLUS`/`X_MINUS`; every other message leaves it alone.
#[derive(Clone, Debug)]
pub struct ClientNode {
    pub id: NodeId,
    pub qubit: VertexId,
    b0_flag: bool,
    pub log: Vec<AppliedCorrection>,
}

/// Result of a client handling one message.
pub struct HandleOutput {
    pub register: PureState,
    /// Whether the node answers with an ACK (correction-bearing messages
    /// only; designations are not acknowledged).
    pub sends_ack: bool,
    /// Whether the node took the support-vertex branch of an X message.
    pub used_b0: bool,
}

impl ClientNode {
    pub fn new(id: NodeId, qubit: VertexId) -> Self {
        Self { id, qubit, b0_flag: false, log: Vec::new() }
    }

    pub fn b0_flag(&self) -> bool {
        self.b0_flag
    }

    /// Runs the correction protocol on one incoming message and applies the
    /// prescribed gate to this node's qubit of the shared register.
    pub fn handle(
        &mut self,
        register: PureState,
        msg: &ClassicalMessage,
        skip_gates: bool,
    ) -> Result<HandleOutput, SimError> {
        if msg.dst != self.id {
            return Err(SimError::Protocol {
                index: msg.measurement_index,
                reason: format!("message for node {:?} delivered to node {:?}", msg.dst, self.id),
            });
        }
        match msg.msg_type {
            MsgType::Ack => Err(SimError::Protocol {
                index: msg.measurement_index,
                reason: "client received an ACK".into(),
            }),
            MsgType::B0Designation => {
                self.b0_flag = true;
                Ok(HandleOutput { register, sends_ack: false, used_b0: false })
            }
            m => {
                let is_x = matches!(m, MsgType::XPlus | MsgType::XMinus);
                let used_b0 = is_x && self.b0_flag;
                if is_x {
                    self.b0_flag = false;
                }
                let gate = correction_gate(m, used_b0)?;
                let register = if skip_gates {
                    register
                } else {
                    register.apply_gate(self.qubit, &gate)?
                };
                self.log.push(AppliedCorrection {
                    measurement_index: msg.measurement_index,
                    msg_type: m,
                    vertex: self.qubit,
                    gate: gate.label(),
                });
                Ok(HandleOutput { register, sends_ack: true, used_b0 })
            }
        }
    }
}

/// What one orchestrator step produced.
pub struct StepOutput {
    pub register: PureState,
    pub vertex: VertexId,
    pub axis: PauliAxis,
    pub outcome: Outcome,
    pub b0: Option<VertexId>,
    pub dest_sample: BTreeSet<VertexId>,
    /// Messages to put on the wire, in send order.
    pub outbound: Vec<(NodeId, MsgType)>,
}

/// Orchestrator node: holds the measurement plan, a classical mirror of the
/// evolving graph, and the outcome log.
///
/// The mirror always equals the fold of the per-axis transforms over the
/// completed measurements; measured vertices are removed from it, which is
/// how their neighborhood ends up empty.
#[derive(Clone, Debug)]
pub struct OrchestratorNode {
    pub id: NodeId,
    mirror: Graph,
    bases: BasesArray,
    order: Vec<VertexId>,
    routes: BTreeMap<VertexId, NodeId>,
    outcomes: Vec<Outcome>,
    cursor: usize,
    pub local_log: Vec<AppliedCorrection>,
}

impl OrchestratorNode {
    /// `routes` maps each client-held vertex to its node address.
    pub fn new(graph: &Graph, bases: BasesArray, routes: BTreeMap<VertexId, NodeId>) -> Self {
        let order = graph.orchestrator_vertices().iter().copied().collect();
        Self {
            id: ORCHESTRATOR,
            mirror: graph.clone(),
            bases,
            order,
            routes,
            outcomes: Vec::new(),
            cursor: 0,
        local_log: Vec::new(),
        }
    }

    pub fn mirror(&self) -> &Graph {
        &self.mirror
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn measurement_order(&self) -> &[VertexId] {
        &self.order
    }

    /// Runs measurement step `j`: measures qubit `o_j`, derives the
    /// correction destinations from the pre-measurement mirror, applies
    /// orchestrator-local corrections to the register, and rolls the mirror
    /// forward. Outgoing client messages are returned in send order, the
    /// support-vertex designation ahead of the outcome message.
    pub fn step(
        &mut self,
        register: PureState,
        j: usize,
        source: OutcomeSource<'_>,
    ) -> Result<StepOutput, SimError> {
        if j != self.cursor {
            return Err(SimError::Protocol {
                index: j,
                reason: format!("step out of order, expected {}", self.cursor),
            });
        }
        let a = self.order[j];
        let choice = self.bases[j];
        let axis = choice.axis;
        let b0 = match axis {
            PauliAxis::X => Some(resolve_b0(&self.mirror, a, choice.b0_override).map_err(
                |source| SimError::Protocol { index: j, reason: source.to_string() },
            )?),
            _ => None,
        };
        let (outcome, mut register) = register.pauli_measure(a, axis, source).map_err(|e| match e {
            EngineError::ImpossibleOutcome { outcome, probability, .. } => {
                SimError::ImpossibleOutcome { index: j, outcome, probability }
            }
            other => SimError::Engine(other),
        })?;
        self.outcomes.push(outcome);

        let targets = correction_targets(&self.mirror, a, axis, outcome, b0)?;
        let msg_type = MsgType::outcome_message(axis, outcome);
        let mut outbound = Vec::new();
        if let Some(designee) = targets.b0_designee {
            if let Some(&node) = self.routes.get(&designee) {
                outbound.push((node, MsgType::B0Designation));
            }
        }
        for &dest in &targets.dest_sample {
            match self.routes.get(&dest) {
                Some(&node) => outbound.push((node, msg_type)),
                // Orchestrator-held destination: apply the correction now,
                // before the next measurement touches the register.
                None => {
                    let gate = correction_gate(msg_type, targets.b0_designee == Some(dest))?;
                    register = register.apply_gate(dest, &gate)?;
                    self.local_log.push(AppliedCorrection {
                        measurement_index: j,
                        msg_type,
                        vertex: dest,
                        gate: gate.label(),
                    });
                }
            }
        }

        self.mirror = match axis {
            PauliAxis::Z => self.mirror.transform_z(a)?,
            PauliAxis::Y => self.mirror.transform_y(a)?,
            PauliAxis::X => self.mirror.transform_x(a, b0.expect("resolved above"))?,
        };
        self.cursor += 1;

        Ok(StepOutput {
            register,
            vertex: a,
            axis,
            outcome,
            b0,
            dest_sample: targets.dest_sample,
            outbound,
        })
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurementRecord {
    pub index: usize,
    pub vertex: VertexId,
    pub axis: PauliAxis,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<VertexId>,
    pub dest_sample: Vec<VertexId>,
}

/// Everything a run leaves behind.
#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub scenario_hash: String,
    pub seed: u64,
    pub measurements: Vec<MeasurementRecord>,
    pub messages: Vec<ClassicalMessage>,
    pub predicted_graph: Graph,
    pub fidelity: f64,
    pub verdict: Verdict,
    /// Wall-clock duration; the only field allowed to differ between
    /// identical runs.
    pub duration_ns: u64,
}

impl SimReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Internal state exposed for inspection after a run.
#[derive(Clone, Debug, Default)]
pub struct RunDiagnostics {
    /// Mirror graph after each completed step.
    pub mirror_trace: Vec<Graph>,
    pub client_logs: BTreeMap<NodeId, Vec<AppliedCorrection>>,
    pub orchestrator_local_log: Vec<AppliedCorrection>,
    pub ack_count: usize,
}

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

struct Simulation<'a> {
    sc: &'a Scenario,
    opts: &'a RunOptions,
    register: Option<PureState>,
    orchestrator: OrchestratorNode,
    clients: BTreeMap<NodeId, ClientNode>,
    queue: EventQueue,
    trace: Vec<ClassicalMessage>,
    measurements: Vec<MeasurementRecord>,
    mirror_trace: Vec<Graph>,
    /// Support vertex per X measurement, for the delivery-order check.
    designees: BTreeMap<usize, VertexId>,
    acks: usize,
}

impl<'a> Simulation<'a> {
    fn new(sc: &'a Scenario, opts: &'a RunOptions) -> Result<Self, SimError> {
        sc.validate()?;
        let register = build_graph_state(&sc.graph)?;
        let mut clients = BTreeMap::new();
        let mut routes = BTreeMap::new();
        for (i, &qubit) in sc.graph.client_vertices().iter().enumerate() {
            let id = NodeId(i as u32 + 1);
            clients.insert(id, ClientNode::new(id, qubit));
            routes.insert(qubit, id);
        }
        let orchestrator = OrchestratorNode::new(&sc.graph, sc.bases.clone(), routes);
        let mut queue = EventQueue::new();
        if !sc.bases.is_empty() {
            queue.push(0, EventKind::Step(0));
        }
        Ok(Self {
            sc,
            opts,
            register: Some(register),
            orchestrator,
            clients,
            queue,
            trace: Vec::new(),
            measurements: Vec::new(),
            mirror_trace: Vec::new(),
            designees: BTreeMap::new(),
            acks: 0,
        })
    }

    fn link_delay(&self, client: NodeId) -> u64 {
        self.opts
            .link_delay_overrides
            .get(&client)
            .copied()
            .unwrap_or(self.sc.channel_delay_ns)
    }

    fn send(&mut self, src: NodeId, dst: NodeId, msg_type: MsgType, index: usize, now: u64) {
        let client = if src == ORCHESTRATOR { dst } else { src };
        let msg = ClassicalMessage {
            src,
            dst,
            msg_type,
            measurement_index: index,
            send_time_ns: now,
            deliver_time_ns: now + self.link_delay(client),
        };
        self.trace.push(msg.clone());
        self.queue.push(msg.deliver_time_ns, EventKind::Deliver(msg));
    }

    fn run_step(&mut self, j: usize, now: u64) -> Result<(), SimError> {
        let register = self.register.take().expect("register present");
        let forced = self.sc.forced_outcomes.as_ref().map(|v| v[j]);
        let mut rng = ChaCha12Rng::seed_from_u64(self.sc.seed);
        rng.set_stream(j as u64);
        let source = match forced {
            Some(o) => OutcomeSource::Forced(o),
            None => OutcomeSource::Sample(&mut rng),
        };
        let out = self.orchestrator.step(register, j, source)?;
        self.register = Some(out.register);
        self.measurements.push(MeasurementRecord {
            index: j,
            vertex: out.vertex,
            axis: out.axis,
            outcome: out.outcome,
            b0: out.b0,
            dest_sample: out.dest_sample.iter().copied().collect(),
        });
        if let Some(b0) = out.b0 {
            self.designees.insert(j, b0);
        }
        self.mirror_trace.push(self.orchestrator.mirror().clone());
        for (dst, msg_type) in out.outbound {
            self.send(ORCHESTRATOR, dst, msg_type, j, now);
        }
        if j + 1 < self.sc.bases.len() {
            self.queue.push(now + STEP_WORK_NS, EventKind::Step(j + 1));
        }
        Ok(())
    }

    fn deliver(&mut self, msg: ClassicalMessage) -> Result<(), SimError> {
        if msg.dst == ORCHESTRATOR {
            if msg.msg_type != MsgType::Ack {
                return Err(SimError::Protocol {
                    index: msg.measurement_index,
                    reason: format!("orchestrator received {}", msg.msg_type),
                });
            }
            self.acks += 1;
            return Ok(());
        }
        let client = self.clients.get_mut(&msg.dst).ok_or_else(|| SimError::Protocol {
            index: msg.measurement_index,
            reason: format!("no client at node {:?}", msg.dst),
        })?;
        // The designated support vertex must have its flag raised before the
        // X outcome message lands; FIFO links make that automatic, so a miss
        // is a protocol-order violation.
        let expects_b0 = matches!(msg.msg_type, MsgType::XPlus | MsgType::XMinus)
            && self.designees.get(&msg.measurement_index) == Some(&client.qubit);
        if expects_b0 && !client.b0_flag() {
            return Err(SimError::Protocol {
                index: msg.measurement_index,
                reason: format!(
                    "{} reached vertex {} before its B0_DESIGNATION",
                    msg.msg_type, client.qubit
                ),
            });
        }
        let register = self.register.take().expect("register present");
        let out = client.handle(register, &msg, self.opts.tamper_corrections)?;
        self.register = Some(out.register);
        if out.sends_ack {
            let (src, deliver_time) = (msg.dst, msg.deliver_time_ns);
            self.send(src, ORCHESTRATOR, MsgType::Ack, msg.measurement_index, deliver_time);
        }
        Ok(())
    }

    fn drain(&mut self) -> Result<(), SimError> {
        while let Some(event) = self.queue.pop() {
            match event.kind {
                EventKind::Step(j) => self.run_step(j, event.time_ns)?,
                EventKind::Deliver(msg) => self.deliver(msg)?,
            }
        }
        Ok(())
    }

    fn finish(mut self, started: Instant) -> Result<(SimReport, RunDiagnostics), SimError> {
        let outcomes = self.orchestrator.outcomes().to_vec();
        let predicted = predicted_graph(&self.sc.graph, &self.sc.bases, &outcomes)?;
        let expected = build_graph_state(&predicted)?;
        let register = self.register.take().expect("register present");
        let fidelity = register.fidelity(&expected)?;
        let verdict = if 1.0 - fidelity <= self.sc.tolerance { Verdict::Pass } else { Verdict::Fail };
        let report = SimReport {
            scenario_hash: self.sc.hash(),
            seed: self.sc.seed,
            measurements: self.measurements,
            messages: self.trace,
            predicted_graph: predicted,
            fidelity,
            verdict,
            duration_ns: started.elapsed().as_nanos() as u64,
        };
        let diagnostics = RunDiagnostics {
            mirror_trace: self.mirror_trace,
            client_logs: self.clients.iter().map(|(&id, c)| (id, c.log.clone())).collect(),
            orchestrator_local_log: self.orchestrator.local_log.clone(),
            ack_count: self.acks,
        };
        Ok((report, diagnostics))
    }
}

/// Runs a scenario end to end and verifies the final state.
///
/// A verification miss is a `FAIL` verdict in the report, not an error;
/// errors are reserved for impossible forced outcomes, protocol violations
/// and invalid scenarios.
pub fn run_scenario(sc: &Scenario) -> Result<SimReport, SimError> {
    run_scenario_with(sc, &RunOptions::default()).map(|(report, _)| report)
}

/// [`run_scenario`] with options and full diagnostics.
pub fn run_scenario_with(
    sc: &Scenario,
    opts: &RunOptions,
) -> Result<(SimReport, RunDiagnostics), SimError> {
    let started = Instant::now();
    let mut sim = Simulation::new(sc, opts)?;
    sim.drain()?;
    sim.finish(started)
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Upper bound on the number of runs a sweep may expand to.
    pub budget: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { budget: 100_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub runs: Vec<SimReport>,
    pub passed: usize,
}

impl SweepReport {
    pub fn total(&self) -> usize {
        self.runs.len()
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.runs.len()
    }

    /// One-line outcome, e.g. `PASS 8/8`.
    pub fn summary_line(&self) -> String {
        let tag = if self.all_passed() { "PASS" } else { "FAIL" };
        format!("{tag} {}/{}", self.passed, self.total())
    }
}

/// Runs the Cartesian product of requested bases arrays and forced-outcome
/// vectors: all `3^n_o` bases when `all_bases`, all `2^n_o` outcome vectors
/// when `all_outcomes`, the scenario's own plan otherwise.
pub fn sweep(sc: &Scenario, all_outcomes: bool, all_bases: bool) -> Result<SweepReport, SimError> {
    sweep_with(sc, all_outcomes, all_bases, &SweepOptions::default())
}

pub fn sweep_with(
    sc: &Scenario,
    all_outcomes: bool,
    all_bases: bool,
    opts: &SweepOptions,
) -> Result<SweepReport, SimError> {
    sc.validate()?;
    let n_o = sc.n_o() as u32;
    let bases_combos: u64 = if all_bases { 3u64.saturating_pow(n_o) } else { 1 };
    let outcome_combos: u64 = if all_outcomes { 2u64.saturating_pow(n_o) } else { 1 };
    let required = bases_combos.saturating_mul(outcome_combos);
    if required > opts.budget {
        return Err(SimError::BudgetExceeded { required, budget: opts.budget });
    }

    let mut runs = Vec::with_capacity(required as usize);
    let mut passed = 0usize;
    for bases_idx in 0..bases_combos {
        let mut variant = sc.clone();
        if all_bases {
            let mut idx = bases_idx;
            for entry in variant.bases.iter_mut() {
                entry.axis = PauliAxis::ALL[(idx % 3) as usize];
                idx /= 3;
            }
        }
        for outcome_idx in 0..outcome_combos {
            let mut run_sc = variant.clone();
            if all_outcomes {
                run_sc.forced_outcomes = Some(
                    (0..n_o)
                        .map(|j| {
                            if (outcome_idx >> j) & 1 == 1 {
                                Outcome::Minus
                            } else {
                                Outcome::Plus
                            }
                        })
                        .collect(),
                );
            }
            let report = run_scenario(&run_sc)?;
            if report.passed() {
                passed += 1;
            }
            runs.push(report);
        }
    }
    Ok(SweepReport { runs, passed })
}
