//! Dense pure-state simulation of the shared qubit register.
//!
//! The register is one normalized complex amplitude vector over labeled
//! qubits. The bit-order convention is fixed once and for all: **`labels[0]`
//! is the least significant bit** of the amplitude index, `labels[1]` the
//! next one, and so on. Measured qubits are contracted out of the register
//! (the measured qubit factors into its eigenstate), so the surviving state
//! always lines up with the vertex set of the predicted graph.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::graph::VertexId;

/// A qubit slot is identified by the graph vertex it belongs to.
pub type QubitLabel = VertexId;

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 20;

/// Tolerance used for the internal unitarity and normalization checks.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("state needs at least one qubit label")]
    EmptyLabels,
    #[error("duplicate qubit label {0}")]
    DuplicateLabel(QubitLabel),
    #[error("register of {0} qubits exceeds the supported {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("qubit {0} is not in the register")]
    UnknownLabel(QubitLabel),
    #[error("gate {0} is not unitary")]
    NonUnitary(String),
    #[error("cannot apply a two-qubit gate to qubit {0} twice")]
    IdenticalQubits(QubitLabel),
    #[error("states are over different label sets")]
    LabelSetMismatch,
    #[error("forced outcome {outcome} on qubit {label} has probability {probability:.3e}")]
    ImpossibleOutcome {
        label: QubitLabel,
        outcome: Outcome,
        probability: f64,
    },
}

/// Measurement basis σ_x, σ_y or σ_z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Normalized eigenvector of the axis operator for the given outcome,
    /// in the computational basis.
    pub fn eigenvector(self, outcome: Outcome) -> [Complex64; 2] {
        let inv_sq2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match (self, outcome) {
            (PauliAxis::Z, Outcome::Plus) => [one, Complex64::ZERO],
            (PauliAxis::Z, Outcome::Minus) => [Complex64::ZERO, one],
            (PauliAxis::X, Outcome::Plus) => [inv_sq2, inv_sq2],
            (PauliAxis::X, Outcome::Minus) => [inv_sq2, -inv_sq2],
            (PauliAxis::Y, Outcome::Plus) => [inv_sq2, i * inv_sq2],
            (PauliAxis::Y, Outcome::Minus) => [inv_sq2, -i * inv_sq2],
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        };
        write!(f, "{c}")
    }
}

/// Sign of a projective measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> i32 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Outcome::Plus { "+" } else { "-" })
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if *self == Outcome::Plus { "+" } else { "-" })
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Outcome;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"+\" or \"-\"")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Outcome, E> {
                match s {
                    "+" => Ok(Outcome::Plus),
                    "-" => Ok(Outcome::Minus),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_str(V)
    }
}

/// Name tag of a single-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateName {
    Identity,
    PauliX,
    PauliZ,
    Hadamard,
    SqrtPlusIZ,
    SqrtMinusIZ,
    SqrtPlusIY,
    SqrtMinusIY,
    Custom,
}

/// A named 2x2 complex matrix. The square-root gates use the principal
/// branch; the opposite branch differs by an overall sign, which is a global
/// phase on any state, so phase-insensitive comparisons never see it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitGate {
    name: GateName,
    adjoint: bool,
    matrix: [[Complex64; 2]; 2],
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl SingleQubitGate {
    fn base(name: GateName, matrix: [[Complex64; 2]; 2]) -> Self {
        Self { name, adjoint: false, matrix }
    }

    pub fn identity() -> Self {
        Self::base(GateName::Identity, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    pub fn pauli_x() -> Self {
        Self::base(GateName::PauliX, [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn pauli_z() -> Self {
        Self::base(GateName::PauliZ, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::base(GateName::Hadamard, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
    }

    /// √(+iσ_z) = diag(e^{+iπ/4}, e^{-iπ/4}).
    pub fn sqrt_plus_i_z() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::base(GateName::SqrtPlusIZ, [[c(h, h), c(0.0, 0.0)], [c(0.0, 0.0), c(h, -h)]])
    }

    /// √(-iσ_z) = diag(e^{-iπ/4}, e^{+iπ/4}).
    pub fn sqrt_minus_i_z() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::base(GateName::SqrtMinusIZ, [[c(h, -h), c(0.0, 0.0)], [c(0.0, 0.0), c(h, h)]])
    }

    /// √(+iσ_y) = (1/√2) [[1, 1], [-1, 1]].
    pub fn sqrt_plus_i_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::base(GateName::SqrtPlusIY, [[c(h, 0.0), c(h, 0.0)], [c(-h, 0.0), c(h, 0.0)]])
    }

    /// √(-iσ_y) = (1/√2) [[1, -1], [1, 1]].
    pub fn sqrt_minus_i_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::base(GateName::SqrtMinusIY, [[c(h, 0.0), c(-h, 0.0)], [c(h, 0.0), c(h, 0.0)]])
    }

    /// Arbitrary matrix; unitarity is only checked when the gate is applied.
    pub fn custom(matrix: [[Complex64; 2]; 2]) -> Self {
        Self::base(GateName::Custom, matrix)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            name: self.name,
            adjoint: !self.adjoint,
            matrix: [
                [self.matrix[0][0].conj(), self.matrix[1][0].conj()],
                [self.matrix[0][1].conj(), self.matrix[1][1].conj()],
            ],
        }
    }

    pub fn name(&self) -> GateName {
        self.name
    }

    pub fn is_adjoint(&self) -> bool {
        self.adjoint
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.matrix
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let m = &self.matrix;
        // rows of U times conjugated rows of U must give the identity
        let mut prod = [[Complex64::ZERO; 2]; 2];
        for (i, row) in prod.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
            }
        }
        (prod[0][0] - 1.0).norm() <= tol
            && (prod[1][1] - 1.0).norm() <= tol
            && prod[0][1].norm() <= tol
            && prod[1][0].norm() <= tol
    }

    /// Short ASCII label used in traces, e.g. `sqrt_plus_i_y_dag`.
    pub fn label(&self) -> String {
        let base = match self.name {
            GateName::Identity => "identity",
            GateName::PauliX => "pauli_x",
            GateName::PauliZ => "pauli_z",
            GateName::Hadamard => "hadamard",
            GateName::SqrtPlusIZ => "sqrt_plus_i_z",
            GateName::SqrtMinusIZ => "sqrt_minus_i_z",
            GateName::SqrtPlusIY => "sqrt_plus_i_y",
            GateName::SqrtMinusIY => "sqrt_minus_i_y",
            GateName::Custom => "custom",
        };
        if self.adjoint {
            format!("{base}_dag")
        } else {
            base.to_string()
        }
    }
}

/// Where a measurement outcome comes from: a scripted value or a sampler
/// driving the Born rule.
pub enum OutcomeSource<'a> {
    Forced(Outcome),
    Sample(&'a mut dyn rand::RngCore),
}

/// Normalized pure state over labeled qubits.
#[derive(Clone, Debug)]
pub struct PureState {
    labels: Vec<QubitLabel>,
    amps: Vec<Complex64>,
}

impl PureState {
    /// `|+>^{⊗n}` over the given labels.
    pub fn plus_state(labels: &[QubitLabel]) -> Result<Self, EngineError> {
        if labels.is_empty() {
            return Err(EngineError::EmptyLabels);
        }
        if labels.len() > MAX_QUBITS {
            return Err(EngineError::TooManyQubits(labels.len()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &l in labels {
            if !seen.insert(l) {
                return Err(EngineError::DuplicateLabel(l));
            }
        }
        let n = labels.len();
        let amp = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Ok(Self { labels: labels.to_vec(), amps: vec![amp; 1 << n] })
    }

    /// Builds a state from explicit amplitudes; test and tooling constructor.
    pub fn from_amplitudes(labels: &[QubitLabel], amps: Vec<Complex64>) -> Result<Self, EngineError> {
        let base = Self::plus_state(labels)?;
        assert_eq!(amps.len(), base.amps.len(), "amplitude vector length must be 2^n");
        Ok(Self { labels: base.labels, amps })
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit position of a label under the `labels[0] = LSB` convention.
    fn slot(&self, q: QubitLabel) -> Result<usize, EngineError> {
        self.labels.iter().position(|&l| l == q).ok_or(EngineError::UnknownLabel(q))
    }

    /// Controlled-Z between two qubits: flips the sign of every amplitude
    /// whose `a` and `b` bits are both set.
    pub fn apply_cz(&self, a: QubitLabel, b: QubitLabel) -> Result<Self, EngineError> {
        if a == b {
            return Err(EngineError::IdenticalQubits(a));
        }
        let pa = self.slot(a)?;
        let pb = self.slot(b)?;
        let mask = (1usize << pa) | (1 << pb);
        let mut out = self.clone();
        for (x, amp) in out.amps.iter_mut().enumerate() {
            if x & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(out)
    }

    /// Applies a single-qubit unitary to slot `q`.
    pub fn apply_gate(&self, q: QubitLabel, gate: &SingleQubitGate) -> Result<Self, EngineError> {
        if !gate.is_unitary(NORM_TOL) {
            return Err(EngineError::NonUnitary(gate.label()));
        }
        let pos = self.slot(q)?;
        let stride = 1usize << pos;
        let m = gate.matrix();
        let mut out = self.clone();
        for x in 0..self.amps.len() {
            if x & stride == 0 {
                let a0 = self.amps[x];
                let a1 = self.amps[x | stride];
                out.amps[x] = m[0][0] * a0 + m[0][1] * a1;
                out.amps[x | stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(out)
    }

    /// Born-rule probabilities `(p_plus, p_minus)` of measuring `q` along
    /// `axis`, without disturbing the state.
    pub fn outcome_probabilities(&self, q: QubitLabel, axis: PauliAxis) -> Result<(f64, f64), EngineError> {
        let pos = self.slot(q)?;
        let p_plus: f64 = self.project_out(pos, axis, Outcome::Plus).iter().map(|a| a.norm_sqr()).sum();
        let p_minus: f64 = self.project_out(pos, axis, Outcome::Minus).iter().map(|a| a.norm_sqr()).sum();
        Ok((p_plus, p_minus))
    }

    /// Partial inner product `<axis,outcome|_pos psi`, unnormalized, with the
    /// measured slot removed from the index space.
    fn project_out(&self, pos: usize, axis: PauliAxis, outcome: Outcome) -> Vec<Complex64> {
        let chi = axis.eigenvector(outcome);
        let n = self.labels.len();
        let low_mask = (1usize << pos) - 1;
        let mut rest = vec![Complex64::ZERO; 1 << (n - 1)];
        for (y, r) in rest.iter_mut().enumerate() {
            let lo = y & low_mask;
            let hi = (y >> pos) << (pos + 1);
            let x0 = lo | hi;
            let x1 = x0 | (1 << pos);
            *r = chi[0].conj() * self.amps[x0] + chi[1].conj() * self.amps[x1];
        }
        rest
    }

    /// Projective Pauli measurement of qubit `q`. The outcome is drawn from
    /// the Born distribution (or forced); the returned state is the
    /// renormalized projection with the measured slot contracted away.
    ///
    /// Forcing an outcome whose probability is below `1e-12` fails with
    /// [`EngineError::ImpossibleOutcome`].
    pub fn pauli_measure(
        &self,
        q: QubitLabel,
        axis: PauliAxis,
        source: OutcomeSource<'_>,
    ) -> Result<(Outcome, Self), EngineError> {
        let pos = self.slot(q)?;
        let rest_plus = self.project_out(pos, axis, Outcome::Plus);
        let p_plus: f64 = rest_plus.iter().map(|a| a.norm_sqr()).sum();
        let outcome = match source {
            OutcomeSource::Forced(o) => o,
            OutcomeSource::Sample(rng) => {
                let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                if u < p_plus {
                    Outcome::Plus
                } else {
                    Outcome::Minus
                }
            }
        };
        let (mut rest, p) = match outcome {
            Outcome::Plus => (rest_plus, p_plus),
            Outcome::Minus => {
                let rest = self.project_out(pos, axis, Outcome::Minus);
                let p: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
                (rest, p)
            }
        };
        if p < 1e-12 {
            return Err(EngineError::ImpossibleOutcome { label: q, outcome, probability: p });
        }
        let scale = 1.0 / p.sqrt();
        for a in &mut rest {
            *a *= scale;
        }
        let mut labels = self.labels.clone();
        labels.remove(pos);
        Ok((outcome, Self { labels, amps: rest }))
    }

    /// `<self|other>` with `other`'s amplitudes re-indexed to this state's
    /// label order. Errors if the label sets differ.
    fn aligned_inner_product(&self, other: &Self) -> Result<Complex64, EngineError> {
        if self.labels.len() != other.labels.len() {
            return Err(EngineError::LabelSetMismatch);
        }
        let mut positions = Vec::with_capacity(other.labels.len());
        for &l in &other.labels {
            positions.push(self.slot(l).map_err(|_| EngineError::LabelSetMismatch)?);
        }
        let mut acc = Complex64::ZERO;
        for (y, amp) in other.amps.iter().enumerate() {
            let mut x = 0usize;
            for (i, &p) in positions.iter().enumerate() {
                if (y >> i) & 1 == 1 {
                    x |= 1 << p;
                }
            }
            acc += self.amps[x].conj() * amp;
        }
        Ok(acc)
    }

    /// Squared inner product `|<self|other>|^2`; label order may differ.
    pub fn fidelity(&self, other: &Self) -> Result<f64, EngineError> {
        Ok(self.aligned_inner_product(other)?.norm_sqr())
    }

    /// True iff `1 - fidelity <= tol`, i.e. the states coincide up to a
    /// global phase within tolerance.
    pub fn equal_up_to_global_phase(&self, other: &Self, tol: f64) -> Result<bool, EngineError> {
        Ok(1.0 - self.fidelity(other)? <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn v(i: u32) -> QubitLabel {
        VertexId(i)
    }

    fn approx(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn plus_state_amplitudes() {
        let s1 = PureState::plus_state(&[v(0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(s1.amplitudes().iter().all(|a| approx(*a, Complex64::new(h, 0.0))));

        let s2 = PureState::plus_state(&[v(0), v(1)]).unwrap();
        assert!(s2.amplitudes().iter().all(|a| approx(*a, Complex64::new(0.5, 0.0))));

        let s3 = PureState::plus_state(&[v(0), v(1), v(2)]).unwrap();
        let q = 1.0 / (2.0 * 2f64.sqrt());
        assert_eq!(s3.amplitudes().len(), 8);
        assert!(s3.amplitudes().iter().all(|a| approx(*a, Complex64::new(q, 0.0))));
    }

    #[test]
    fn plus_state_rejects_duplicates() {
        assert_eq!(
            PureState::plus_state(&[v(0), v(0)]).unwrap_err(),
            EngineError::DuplicateLabel(v(0))
        );
    }

    #[test]
    fn cz_on_plus_plus_gives_edge_state() {
        let s = PureState::plus_state(&[v(0), v(1)]).unwrap();
        let s = s.apply_cz(v(0), v(1)).unwrap();
        let a = s.amplitudes();
        assert!(approx(a[0], Complex64::new(0.5, 0.0)));
        assert!(approx(a[1], Complex64::new(0.5, 0.0)));
        assert!(approx(a[2], Complex64::new(0.5, 0.0)));
        assert!(approx(a[3], Complex64::new(-0.5, 0.0)));
    }

    #[test]
    fn cz_is_self_inverse() {
        let s = PureState::plus_state(&[v(0), v(1), v(2)]).unwrap();
        let t = s.apply_cz(v(0), v(2)).unwrap().apply_cz(v(0), v(2)).unwrap();
        for (x, y) in s.amplitudes().iter().zip(t.amplitudes()) {
            assert!(approx(*x, *y));
        }
    }

    #[test]
    fn cz_rejects_missing_label() {
        let s = PureState::plus_state(&[v(0), v(1)]).unwrap();
        assert_eq!(s.apply_cz(v(0), v(7)).unwrap_err(), EngineError::UnknownLabel(v(7)));
    }

    #[test]
    fn identity_gate_is_a_no_op() {
        let s = PureState::plus_state(&[v(0), v(1)]).unwrap();
        let t = s.apply_gate(v(1), &SingleQubitGate::identity()).unwrap();
        for (x, y) in s.amplitudes().iter().zip(t.amplitudes()) {
            assert!(approx(*x, *y));
        }
    }

    #[test]
    fn pauli_z_flips_plus_to_minus() {
        let s = PureState::plus_state(&[v(0)]).unwrap();
        let t = s.apply_gate(v(0), &SingleQubitGate::pauli_z()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(approx(t.amplitudes()[0], Complex64::new(h, 0.0)));
        assert!(approx(t.amplitudes()[1], Complex64::new(-h, 0.0)));
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let g = SingleQubitGate::custom([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        ]);
        let s = PureState::plus_state(&[v(0)]).unwrap();
        assert!(matches!(s.apply_gate(v(0), &g), Err(EngineError::NonUnitary(_))));
    }

    #[test]
    fn square_root_gates_square_to_their_targets() {
        // (sqrt(+i s_z))^2 = i s_z, and similarly for the other branches.
        let cases = [
            (SingleQubitGate::sqrt_plus_i_z(), [[c64(0.0, 1.0), c64(0.0, 0.0)], [c64(0.0, 0.0), c64(0.0, -1.0)]]),
            (SingleQubitGate::sqrt_minus_i_z(), [[c64(0.0, -1.0), c64(0.0, 0.0)], [c64(0.0, 0.0), c64(0.0, 1.0)]]),
            (SingleQubitGate::sqrt_plus_i_y(), [[c64(0.0, 0.0), c64(1.0, 0.0)], [c64(-1.0, 0.0), c64(0.0, 0.0)]]),
            (SingleQubitGate::sqrt_minus_i_y(), [[c64(0.0, 0.0), c64(-1.0, 0.0)], [c64(1.0, 0.0), c64(0.0, 0.0)]]),
        ];
        for (g, want) in cases {
            let m = g.matrix();
            for i in 0..2 {
                for j in 0..2 {
                    let got = m[i][0] * m[0][j] + m[i][1] * m[1][j];
                    assert!(approx(got, want[i][j]), "{} squared mismatch", g.label());
                }
            }
        }
    }

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn z_measurement_of_edge_state() {
        // CZ|++> measured on qubit 0 in Z: both outcomes have p = 1/2 and
        // leave (|0> +/- |1>)/sqrt(2) on the partner qubit.
        let s = PureState::plus_state(&[v(0), v(1)]).unwrap().apply_cz(v(0), v(1)).unwrap();
        let (p_plus, p_minus) = s.outcome_probabilities(v(0), PauliAxis::Z).unwrap();
        assert!((p_plus - 0.5).abs() < 1e-12);
        assert!((p_minus - 0.5).abs() < 1e-12);

        let (o, rest) = s.pauli_measure(v(0), PauliAxis::Z, OutcomeSource::Forced(Outcome::Plus)).unwrap();
        assert_eq!(o, Outcome::Plus);
        assert_eq!(rest.labels(), &[v(1)]);
        let plus = PureState::plus_state(&[v(1)]).unwrap();
        assert!(rest.equal_up_to_global_phase(&plus, 1e-12).unwrap());

        let (_, rest) = s.pauli_measure(v(0), PauliAxis::Z, OutcomeSource::Forced(Outcome::Minus)).unwrap();
        let minus = plus.apply_gate(v(1), &SingleQubitGate::pauli_z()).unwrap();
        assert!(rest.equal_up_to_global_phase(&minus, 1e-12).unwrap());
    }

    #[test]
    fn forcing_an_impossible_outcome_fails() {
        // |+> is the +1 eigenstate of s_x, so forcing "-" must fail.
        let s = PureState::plus_state(&[v(0)]).unwrap();
        let err = s.pauli_measure(v(0), PauliAxis::X, OutcomeSource::Forced(Outcome::Minus)).unwrap_err();
        assert!(matches!(err, EngineError::ImpossibleOutcome { .. }));
        // ... while "+" succeeds and leaves an empty register behind.
        let (o, rest) = s.pauli_measure(v(0), PauliAxis::X, OutcomeSource::Forced(Outcome::Plus)).unwrap();
        assert_eq!(o, Outcome::Plus);
        assert_eq!(rest.num_qubits(), 0);
    }

    #[test]
    fn fidelity_of_identical_and_orthogonal_states() {
        let s = PureState::plus_state(&[v(0), v(1)]).unwrap().apply_cz(v(0), v(1)).unwrap();
        assert!((s.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);

        let zero = PureState::from_amplitudes(&[v(0)], vec![c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let one = PureState::from_amplitudes(&[v(0)], vec![c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap();
        assert!(zero.fidelity(&one).unwrap() < 1e-12);
        assert!(!zero.equal_up_to_global_phase(&one, 1e-9).unwrap());
    }

    #[test]
    fn fidelity_ignores_global_phase_and_label_order() {
        let s = PureState::plus_state(&[v(0), v(1)]).unwrap().apply_cz(v(0), v(1)).unwrap();
        let phase = c64(0.0, 1.0); // i
        let rotated = PureState::from_amplitudes(
            &[v(1), v(0)], // swapped label order
            // amplitudes reindexed for the swapped order: bit0 = v(1), bit1 = v(0)
            vec![s.amplitudes()[0] * phase, s.amplitudes()[2] * phase, s.amplitudes()[1] * phase, s.amplitudes()[3] * phase],
        )
        .unwrap();
        assert!((s.fidelity(&rotated).unwrap() - 1.0).abs() < 1e-12);
        assert!(s.equal_up_to_global_phase(&rotated, 1e-12).unwrap());
    }

    #[test]
    fn fidelity_rejects_mismatched_label_sets() {
        let a = PureState::plus_state(&[v(0), v(1)]).unwrap();
        let b = PureState::plus_state(&[v(0), v(2)]).unwrap();
        assert_eq!(a.fidelity(&b).unwrap_err(), EngineError::LabelSetMismatch);
    }

    #[test]
    fn perturbation_beyond_tolerance_is_not_equal() {
        // An orthogonal perturbation with fidelity deficit ~1e-6 must fail a
        // 1e-9 equality test and pass a 1e-3 one.
        let s = PureState::plus_state(&[v(0)]).unwrap();
        let eps: f64 = 1e-3;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let norm = (1.0 + eps * eps).sqrt();
        let perturbed = PureState::from_amplitudes(
            &[v(0)],
            vec![c64((h + eps * h) / norm, 0.0), c64((h - eps * h) / norm, 0.0)],
        )
        .unwrap();
        let deficit = 1.0 - s.fidelity(&perturbed).unwrap();
        assert!(deficit > 1e-7 && deficit < 1e-5, "deficit {deficit}");
        assert!(!s.equal_up_to_global_phase(&perturbed, 1e-9).unwrap());
        assert!(s.equal_up_to_global_phase(&perturbed, 1e-3).unwrap());
    }

    fn named_gates() -> Vec<SingleQubitGate> {
        vec![
            SingleQubitGate::identity(),
            SingleQubitGate::pauli_x(),
            SingleQubitGate::pauli_z(),
            SingleQubitGate::hadamard(),
            SingleQubitGate::sqrt_plus_i_z(),
            SingleQubitGate::sqrt_minus_i_z(),
            SingleQubitGate::sqrt_plus_i_y(),
            SingleQubitGate::sqrt_minus_i_y(),
        ]
    }

    #[test]
    fn named_gates_are_unitary() {
        for g in named_gates() {
            assert!(g.is_unitary(NORM_TOL), "{}", g.label());
            assert!(g.adjoint().is_unitary(NORM_TOL), "{} adjoint", g.label());
        }
    }

    /// Random normalized 3-qubit state from a seed.
    fn random_state(seed: u64) -> PureState {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> =
            (0..8).map(|_| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        PureState::from_amplitudes(&[v(0), v(1), v(2)], amps).unwrap()
    }

    proptest! {
        #[test]
        fn gates_preserve_the_norm(seed in any::<u64>(), which in 0..8usize, q in 0..3u32) {
            let s = random_state(seed);
            let g = named_gates()[which];
            let t = s.apply_gate(v(q), &g).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn gate_then_adjoint_restores_the_state(seed in any::<u64>(), which in 0..8usize, q in 0..3u32) {
            let s = random_state(seed);
            let g = named_gates()[which];
            let t = s.apply_gate(v(q), &g).unwrap().apply_gate(v(q), &g.adjoint()).unwrap();
            for (a, b) in s.amplitudes().iter().zip(t.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn born_probabilities_are_complete(seed in any::<u64>(), q in 0..3u32, axis in 0..3usize) {
            let s = random_state(seed);
            let (p_plus, p_minus) = s.outcome_probabilities(v(q), PauliAxis::ALL[axis]).unwrap();
            prop_assert!((p_plus + p_minus - 1.0).abs() < 1e-12);
        }

        #[test]
        fn projectors_are_idempotent_and_complete(seed in any::<u64>(), axis in 0..3usize) {
            // P_{i,+} + P_{i,-} = I and P^2 = P, checked on the 2x2 matrices
            // built from the eigenvectors and on a random state's qubit.
            let axis = PauliAxis::ALL[axis];
            let mut sum = [[Complex64::ZERO; 2]; 2];
            for outcome in Outcome::ALL {
                let chi = axis.eigenvector(outcome);
                let mut p = [[Complex64::ZERO; 2]; 2];
                for (i, row) in p.iter_mut().enumerate() {
                    for (j, cell) in row.iter_mut().enumerate() {
                        *cell = chi[i] * chi[j].conj();
                    }
                }
                for (srow, prow) in sum.iter_mut().zip(&p) {
                    for (s, val) in srow.iter_mut().zip(prow) {
                        *s += *val;
                    }
                }
                for i in 0..2 {
                    for j in 0..2 {
                        let sq = p[i][0] * p[0][j] + p[i][1] * p[1][j];
                        prop_assert!((sq - p[i][j]).norm() < 1e-12);
                    }
                }
            }
            for (i, row) in sum.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    let want = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::ZERO };
                    prop_assert!((cell - want).norm() < 1e-12);
                }
            }
            // Acting on a state, the two projections recompose the norm.
            let s = random_state(seed);
            let (p_plus, p_minus) = s.outcome_probabilities(v(0), axis).unwrap();
            prop_assert!((p_plus + p_minus - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sampled_measurement_matches_a_forced_one(seed in any::<u64>(), q in 0..3u32, axis in 0..3usize) {
            let s = random_state(seed);
            let axis = PauliAxis::ALL[axis];
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed ^ 0x5eed);
            let (o, sampled) = s.pauli_measure(v(q), axis, OutcomeSource::Sample(&mut rng)).unwrap();
            let (_, forced) = s.pauli_measure(v(q), axis, OutcomeSource::Forced(o)).unwrap();
            for (a, b) in sampled.amplitudes().iter().zip(forced.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
            prop_assert!((sampled.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}
