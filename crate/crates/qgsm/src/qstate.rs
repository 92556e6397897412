//! Few-qubit state-vector engine.
//!
//! States carry between one and five qubits as a dense vector of complex
//! amplitudes. Qubit 0 is the leftmost position in ket notation, i.e. the
//! most significant bit of the amplitude index, so `|010⟩` sits at index 2.
//! Three-party states follow the (SIM1, SIM2, AUC) label order throughout.
//!
//! Measurement is projective along X, Y or Z. A `Plus` outcome registers
//! classical bit 0, `Minus` registers 1 (Z: `|0⟩`↦0, `|1⟩`↦1; X: `|+⟩`↦0,
//! `|−⟩`↦1). Post-measurement states are always renormalized to unit norm.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::party::Role;
use crate::runtime::RngStream;

/// Hard cap on register width; everything this crate simulates fits in five.
pub const MAX_QUBITS: usize = 5;

const NORM_TOL: f64 = 1e-12;

/// Measurement axis of the single-qubit projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisAxis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for BasisAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisAxis::X => "X",
            BasisAxis::Y => "Y",
            BasisAxis::Z => "Z",
        })
    }
}

/// Sign of a projective outcome. `Plus` registers classical bit 0,
/// `Minus` registers 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeSign {
    Plus,
    Minus,
}

impl OutcomeSign {
    pub fn bit(self) -> u8 {
        match self {
            OutcomeSign::Plus => 0,
            OutcomeSign::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            OutcomeSign::Plus
        } else {
            OutcomeSign::Minus
        }
    }
}

/// Tag attached to each qubit of a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitLabel {
    Party(Role),
    Ancilla(u8),
}

impl std::fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QubitLabel::Party(r) => write!(f, "{r}"),
            QubitLabel::Ancilla(i) => write!(f, "anc{i}"),
        }
    }
}

/// The named entangled states the protocols draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// (|000⟩ + |111⟩)/√2 over (SIM1, SIM2, AUC).
    Ghz3,
    /// (|010⟩ + |101⟩)/√2: SIM1 and AUC agree in Z, SIM2 is flipped.
    /// Conventionally labelled the "W" source in this protocol family.
    WFlipped,
    /// (|00⟩ + |11⟩)/√2.
    BellPhiPlus,
}

impl StateKind {
    pub fn arity(self) -> usize {
        match self {
            StateKind::Ghz3 | StateKind::WFlipped => 3,
            StateKind::BellPhiPlus => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StateKind::Ghz3 => "ghz3",
            StateKind::WFlipped => "w-flipped",
            StateKind::BellPhiPlus => "bell-phi-plus",
        }
    }
}

/// One projective measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubit_index: usize,
    pub axis: BasisAxis,
    pub outcome_sign: OutcomeSign,
    pub classical_bit: u8,
    /// Global ordering stamp; assigned by whoever owns the transcript.
    pub sequence_number: u64,
}

/// Basis kets for building product states in tests and fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ket1 {
    Zero,
    One,
    Plus,
    Minus,
}

impl Ket1 {
    fn amplitudes(self) -> [Complex64; 2] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Ket1::Zero => [Complex64::ONE, Complex64::ZERO],
            Ket1::One => [Complex64::ZERO, Complex64::ONE],
            Ket1::Plus => [h, h],
            Ket1::Minus => [h, -h],
        }
    }
}

/// Returns the single-qubit projector |S_{p;±}⟩⟨S_{p;±}| as a 2×2 matrix.
pub fn projector(axis: BasisAxis, sign: OutcomeSign) -> [[Complex64; 2]; 2] {
    let half = Complex64::new(0.5, 0.0);
    let s = match sign {
        OutcomeSign::Plus => 1.0,
        OutcomeSign::Minus => -1.0,
    };
    match axis {
        BasisAxis::Z => {
            if sign == OutcomeSign::Plus {
                [[Complex64::ONE, Complex64::ZERO], [Complex64::ZERO, Complex64::ZERO]]
            } else {
                [[Complex64::ZERO, Complex64::ZERO], [Complex64::ZERO, Complex64::ONE]]
            }
        }
        BasisAxis::X => [
            [half, half * s],
            [half * s, half],
        ],
        BasisAxis::Y => [
            [half, Complex64::new(0.0, -0.5 * s)],
            [Complex64::new(0.0, 0.5 * s), half],
        ],
    }
}

/// A normalized pure state over 1..=5 labelled qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<QubitLabel>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing to unit norm.
    pub fn from_amplitudes(labels: Vec<QubitLabel>, amps: Vec<Complex64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: n,
                max: MAX_QUBITS,
            });
        }
        if amps.len() != 1 << n {
            return Err(Error::LegMismatch {
                legs: labels.len(),
                qubits: amps.len().trailing_zeros() as usize,
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::DuplicateLabel);
            }
        }
        let mut state = StateVector { labels, amps };
        state.renormalize()?;
        Ok(state)
    }

    /// Builds one of the named entangled states. Qubit order follows the
    /// label order; three-party states conventionally use (SIM1, SIM2, AUC).
    pub fn named(kind: StateKind, labels: &[QubitLabel]) -> Result<Self> {
        if labels.len() != kind.arity() {
            return Err(Error::ArityMismatch {
                kind: kind.name(),
                expected: kind.arity(),
                got: labels.len(),
            });
        }
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amps = vec![Complex64::ZERO; 1 << kind.arity()];
        match kind {
            StateKind::Ghz3 => {
                amps[0b000] = h;
                amps[0b111] = h;
            }
            StateKind::WFlipped => {
                amps[0b010] = h;
                amps[0b101] = h;
            }
            StateKind::BellPhiPlus => {
                amps[0b00] = h;
                amps[0b11] = h;
            }
        }
        Self::from_amplitudes(labels.to_vec(), amps)
    }

    /// Tensor product of single-qubit kets, mostly used to state expected
    /// post-measurement states in fixtures.
    pub fn product(labels: &[QubitLabel], kets: &[Ket1]) -> Result<Self> {
        assert_eq!(labels.len(), kets.len());
        let n = labels.len();
        let mut amps = vec![Complex64::ONE; 1];
        for ket in kets {
            let factors = ket.amplitudes();
            let mut next = vec![Complex64::ZERO; amps.len() * 2];
            for (i, a) in amps.iter().enumerate() {
                next[2 * i] = a * factors[0];
                next[2 * i + 1] = a * factors[1];
            }
            amps = next;
        }
        let _ = n;
        Self::from_amplitudes(labels.to_vec(), amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn qubit_index(&self, label: QubitLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn renormalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if n2 < NORM_TOL {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n2.sqrt();
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits() {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits(),
            });
        }
        Ok(())
    }

    /// Applies a 2×2 operator to one qubit, without renormalizing.
    fn apply_one_qubit(&self, qubit: usize, m: &[[Complex64; 2]; 2]) -> Vec<Complex64> {
        let n = self.num_qubits();
        let bit = 1usize << (n - 1 - qubit);
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let a0 = self.amps[idx];
                let a1 = self.amps[idx | bit];
                out[idx] = m[0][0] * a0 + m[0][1] * a1;
                out[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        out
    }

    /// Probability that measuring `qubit` along `axis` yields `sign`.
    pub fn outcome_probability(&self, qubit: usize, axis: BasisAxis, sign: OutcomeSign) -> Result<f64> {
        self.check_qubit(qubit)?;
        let projected = self.apply_one_qubit(qubit, &projector(axis, sign));
        Ok(projected.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Samples a projective measurement by the Born rule and returns the
    /// outcome together with the collapsed, renormalized state.
    ///
    /// `seq` is the transcript ordering stamp recorded on the outcome.
    pub fn measure(
        &self,
        qubit: usize,
        axis: BasisAxis,
        rng: &mut RngStream,
        seq: u64,
    ) -> Result<(MeasurementRecord, StateVector)> {
        self.check_qubit(qubit)?;
        let p_plus = self.outcome_probability(qubit, axis, OutcomeSign::Plus)?;
        let u: f64 = rng.random();
        let sign = if u < p_plus {
            OutcomeSign::Plus
        } else {
            OutcomeSign::Minus
        };
        let post = self.project(qubit, axis, sign)?;
        let record = MeasurementRecord {
            qubit_index: qubit,
            axis,
            outcome_sign: sign,
            classical_bit: sign.bit(),
            sequence_number: seq,
        };
        Ok((record, post))
    }

    /// Forces a specific outcome, for replaying fixed measurement sequences.
    /// Errors if the requested projection has (near-)zero probability.
    pub fn measure_forced(&self, qubit: usize, axis: BasisAxis, sign: OutcomeSign) -> Result<StateVector> {
        self.check_qubit(qubit)?;
        let p = self.outcome_probability(qubit, axis, sign)?;
        if p <= NORM_TOL {
            return Err(Error::ZeroProbability { qubit, axis, sign });
        }
        self.project(qubit, axis, sign)
    }

    fn project(&self, qubit: usize, axis: BasisAxis, sign: OutcomeSign) -> Result<StateVector> {
        let amps = self.apply_one_qubit(qubit, &projector(axis, sign));
        let mut post = StateVector {
            labels: self.labels.clone(),
            amps,
        };
        post.renormalize()?;
        Ok(post)
    }

    /// Exact joint outcome distribution for measuring the given qubits along
    /// the given axes. Probabilities are closed-form from the amplitudes and
    /// independent of evaluation order.
    pub fn outcome_distribution(&self, assignments: &[(usize, BasisAxis)]) -> Result<OutcomeDistribution> {
        for (i, (q, _)) in assignments.iter().enumerate() {
            self.check_qubit(*q)?;
            if assignments[i + 1..].iter().any(|(q2, _)| q2 == q) {
                return Err(Error::DuplicateQubit { index: *q });
            }
        }
        let k = assignments.len();
        let mut probs = vec![0.0f64; 1 << k];
        for (outcome, slot) in probs.iter_mut().enumerate() {
            let mut amps = self.amps.clone();
            for (j, (qubit, axis)) in assignments.iter().enumerate() {
                let bit = (outcome >> (k - 1 - j)) & 1;
                let proj = projector(*axis, OutcomeSign::from_bit(bit as u8));
                let tmp = StateVector {
                    labels: self.labels.clone(),
                    amps,
                };
                amps = tmp.apply_one_qubit(*qubit, &proj);
            }
            *slot = amps.iter().map(|a| a.norm_sqr()).sum();
        }
        Ok(OutcomeDistribution {
            assignments: assignments.to_vec(),
            probs,
        })
    }

    /// Tensor-extends the register with a fresh ancilla prepared in `|init⟩`.
    /// The new qubit is appended after the existing ones.
    pub fn attach_ancilla(&self, init: u8) -> Result<StateVector> {
        let n = self.num_qubits();
        if n + 1 > MAX_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: n + 1,
                max: MAX_QUBITS,
            });
        }
        let next_anc = self
            .labels
            .iter()
            .filter(|l| matches!(l, QubitLabel::Ancilla(_)))
            .count() as u8;
        let mut labels = self.labels.clone();
        labels.push(QubitLabel::Ancilla(next_anc));
        let mut amps = vec![Complex64::ZERO; self.amps.len() * 2];
        for (i, a) in self.amps.iter().enumerate() {
            amps[2 * i + (init & 1) as usize] = *a;
        }
        Ok(StateVector { labels, amps })
    }

    /// Applies a CNOT gate; amplitudes at indices with the control bit set
    /// have their target bit flipped.
    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<StateVector> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::CnotSameQubit { index: control });
        }
        let n = self.num_qubits();
        let cbit = 1usize << (n - 1 - control);
        let tbit = 1usize << (n - 1 - target);
        let mut amps = vec![Complex64::ZERO; self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let dst = if idx & cbit != 0 { idx ^ tbit } else { idx };
            amps[dst] = *a;
        }
        Ok(StateVector {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// State equality up to normalization and a global phase.
    pub fn approx_equiv(&self, other: &StateVector, tol: f64) -> bool {
        if self.amps.len() != other.amps.len() {
            return false;
        }
        let na = self.norm_sqr().sqrt();
        let nb = other.norm_sqr().sqrt();
        if na < NORM_TOL || nb < NORM_TOL {
            return false;
        }
        // Align the global phase on the largest amplitude of self.
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .expect("non-empty amplitude vector");
        let a_piv = self.amps[pivot] / na;
        let b_piv = other.amps[pivot] / nb;
        if b_piv.norm() < tol {
            return false;
        }
        let phase = (a_piv / a_piv.norm()) * (b_piv / b_piv.norm()).conj();
        self.amps
            .iter()
            .zip(other.amps.iter())
            .all(|(a, b)| (a / na - phase * (b / nb)).norm() < tol)
    }
}

/// Exact probability table over joint outcomes of a measurement assignment.
///
/// Outcome bit `j` of an index corresponds to assignment `j`, most
/// significant first, matching the register's ket-order convention.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    assignments: Vec<(usize, BasisAxis)>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn assignments(&self) -> &[(usize, BasisAxis)] {
        &self.assignments
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_outcomes(&self) -> usize {
        self.probs.len()
    }

    /// Probability of a specific bit pattern, one bit per assignment.
    pub fn prob_of_bits(&self, bits: &[u8]) -> f64 {
        assert_eq!(bits.len(), self.assignments.len());
        let mut idx = 0usize;
        for b in bits {
            idx = (idx << 1) | (*b & 1) as usize;
        }
        self.probs[idx]
    }

    /// Marginal distribution (p0, p1) of one assignment slot.
    pub fn marginal(&self, slot: usize) -> (f64, f64) {
        let k = self.assignments.len();
        let bit = 1usize << (k - 1 - slot);
        let mut p1 = 0.0;
        for (idx, p) in self.probs.iter().enumerate() {
            if idx & bit != 0 {
                p1 += p;
            }
        }
        (1.0 - p1, p1)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::{Purpose, RngStream};

    fn labels3() -> Vec<QubitLabel> {
        vec![
            QubitLabel::Party(Role::Sim1),
            QubitLabel::Party(Role::Sim2),
            QubitLabel::Party(Role::Auc),
        ]
    }

    fn labels2() -> Vec<QubitLabel> {
        vec![QubitLabel::Party(Role::Sim1), QubitLabel::Party(Role::Auc)]
    }

    fn rng(seed: u64) -> RngStream {
        RngStream::derive(seed, Role::Auc, Purpose::Outcome, 0)
    }

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn named_state_amplitudes() {
        let ghz = StateVector::named(StateKind::Ghz3, &labels3()).unwrap();
        let amps = ghz.amplitudes();
        assert!((amps[0].re - INV_SQRT2).abs() < 1e-15);
        assert!((amps[7].re - INV_SQRT2).abs() < 1e-15);
        for amp in &amps[1..7] {
            assert_eq!(*amp, Complex64::ZERO);
        }

        let w = StateVector::named(StateKind::WFlipped, &labels3()).unwrap();
        assert!((w.amplitudes()[0b010].re - INV_SQRT2).abs() < 1e-15);
        assert!((w.amplitudes()[0b101].re - INV_SQRT2).abs() < 1e-15);
        let nonzero = w.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
        assert_eq!(nonzero, 2);

        let bell = StateVector::named(StateKind::BellPhiPlus, &labels2()).unwrap();
        assert!((bell.amplitudes()[0].re - INV_SQRT2).abs() < 1e-15);
        assert!((bell.amplitudes()[3].re - INV_SQRT2).abs() < 1e-15);
    }

    #[test]
    fn named_state_arity_is_checked() {
        let err = StateVector::named(StateKind::Ghz3, &labels2()).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { expected: 3, got: 2, .. }));
    }

    #[test]
    fn projectors_match_closed_forms() {
        let zp = projector(BasisAxis::Z, OutcomeSign::Plus);
        assert_eq!(zp[0][0], Complex64::ONE);
        assert_eq!(zp[1][1], Complex64::ZERO);

        let xp = projector(BasisAxis::X, OutcomeSign::Plus);
        for row in &xp {
            for v in row {
                assert!((v.re - 0.5).abs() < 1e-15 && v.im == 0.0);
            }
        }

        let yp = projector(BasisAxis::Y, OutcomeSign::Plus);
        assert!((yp[0][1] - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((yp[1][0] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn projector_completeness_and_idempotence() {
        for axis in [BasisAxis::X, BasisAxis::Y, BasisAxis::Z] {
            let p = projector(axis, OutcomeSign::Plus);
            let m = projector(axis, OutcomeSign::Minus);
            for i in 0..2 {
                for j in 0..2 {
                    let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
                    assert!((p[i][j] + m[i][j] - expect).norm() < 1e-15, "{axis:?}");
                    // P² = P
                    let sq = p[i][0] * p[0][j] + p[i][1] * p[1][j];
                    assert!((sq - p[i][j]).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn ghz_auc_x_measurement_splits_evenly() {
        let ghz = StateVector::named(StateKind::Ghz3, &labels3()).unwrap();
        let p = ghz.outcome_probability(2, BasisAxis::X, OutcomeSign::Plus).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let post = ghz.measure_forced(2, BasisAxis::X, OutcomeSign::Plus).unwrap();
        let expected = {
            // (|00⟩ + |11⟩) ⊗ |+⟩, spelled out over (SIM1, SIM2, AUC)
            let mut amps = vec![Complex64::ZERO; 8];
            amps[0b000] = Complex64::new(0.5, 0.0);
            amps[0b001] = Complex64::new(0.5, 0.0);
            amps[0b110] = Complex64::new(0.5, 0.0);
            amps[0b111] = Complex64::new(0.5, 0.0);
            StateVector::from_amplitudes(labels3(), amps).unwrap()
        };
        assert!(post.approx_equiv(&expected, 1e-10));
    }

    #[test]
    fn bell_z_correlation_is_perfect() {
        let bell = StateVector::named(StateKind::BellPhiPlus, &labels2()).unwrap();
        let mut r = rng(11);
        let (rec, post) = bell.measure(0, BasisAxis::Z, &mut r, 0).unwrap();
        let p_same = post
            .outcome_probability(1, BasisAxis::Z, rec.outcome_sign)
            .unwrap();
        assert!((p_same - 1.0).abs() < 1e-12);
        if rec.classical_bit == 0 {
            let expected = StateVector::product(&labels2(), &[Ket1::Zero, Ket1::Zero]).unwrap();
            assert!(post.approx_equiv(&expected, 1e-10));
        }
    }

    #[test]
    fn measurement_is_idempotent() {
        let ghz = StateVector::named(StateKind::Ghz3, &labels3()).unwrap();
        let mut r = rng(5);
        let (rec1, post1) = ghz.measure(0, BasisAxis::X, &mut r, 0).unwrap();
        let (rec2, post2) = post1.measure(0, BasisAxis::X, &mut r, 1).unwrap();
        assert_eq!(rec1.classical_bit, rec2.classical_bit);
        assert!(post1.approx_equiv(&post2, 1e-10));
    }

    #[test]
    fn forced_zero_probability_is_an_error() {
        let zero = StateVector::product(&labels2(), &[Ket1::Zero, Ket1::Zero]).unwrap();
        let err = zero.measure_forced(0, BasisAxis::Z, OutcomeSign::Minus).unwrap_err();
        assert!(matches!(err, Error::ZeroProbability { qubit: 0, .. }));

        // Bell pair forced to Z-minus on qubit 0 collapses to |11⟩.
        let bell = StateVector::named(StateKind::BellPhiPlus, &labels2()).unwrap();
        let post = bell.measure_forced(0, BasisAxis::Z, OutcomeSign::Minus).unwrap();
        let expected = StateVector::product(&labels2(), &[Ket1::One, Ket1::One]).unwrap();
        assert!(post.approx_equiv(&expected, 1e-10));
    }

    #[test]
    fn ghz_distributions_match_hand_expansion() {
        let ghz = StateVector::named(StateKind::Ghz3, &labels3()).unwrap();

        let zzz = ghz
            .outcome_distribution(&[(0, BasisAxis::Z), (1, BasisAxis::Z), (2, BasisAxis::Z)])
            .unwrap();
        assert!((zzz.prob_of_bits(&[0, 0, 0]) - 0.5).abs() < 1e-12);
        assert!((zzz.prob_of_bits(&[1, 1, 1]) - 0.5).abs() < 1e-12);
        assert!((zzz.total() - 1.0).abs() < 1e-12);

        // Expanding GHZ in the X eigenbasis leaves ¼ on each even-minus
        // pattern and zero on odd ones. The flipped-W source is also a +1
        // eigenstate of X⊗X⊗X and lands on the same four patterns.
        let w = StateVector::named(StateKind::WFlipped, &labels3()).unwrap();
        for state in [&ghz, &w] {
            let xxx = state
                .outcome_distribution(&[(0, BasisAxis::X), (1, BasisAxis::X), (2, BasisAxis::X)])
                .unwrap();
            for bits in [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]] {
                assert!((xxx.prob_of_bits(&bits) - 0.25).abs() < 1e-12);
            }
            for bits in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]] {
                assert!(xxx.prob_of_bits(&bits).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_zx_distribution_is_uniform() {
        let bell = StateVector::named(StateKind::BellPhiPlus, &labels2()).unwrap();
        let d = bell
            .outcome_distribution(&[(0, BasisAxis::Z), (1, BasisAxis::X)])
            .unwrap();
        for p in d.probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_sim1_tracks_auc_after_sim2_x() {
        // (AUC: Z+, SIM2: X, then SIM1: Z) leaves SIM1 equal to AUC.
        let ghz = StateVector::named(StateKind::Ghz3, &labels3()).unwrap();
        let d = ghz
            .outcome_distribution(&[(0, BasisAxis::Z), (2, BasisAxis::Z)])
            .unwrap();
        assert!((d.prob_of_bits(&[0, 0]) - 0.5).abs() < 1e-12);
        assert!((d.prob_of_bits(&[1, 1]) - 0.5).abs() < 1e-12);
        assert!(d.prob_of_bits(&[0, 1]).abs() < 1e-12);

        let mut r = rng(29);
        for seq in 0..64 {
            let state = ghz.measure_forced(2, BasisAxis::Z, OutcomeSign::Plus).unwrap();
            let (_, state) = state.measure(1, BasisAxis::X, &mut r, seq).unwrap();
            let (rec, _) = state.measure(0, BasisAxis::Z, &mut r, seq).unwrap();
            assert_eq!(rec.classical_bit, 0);
        }
    }

    #[test]
    fn duplicate_assignment_is_rejected() {
        let bell = StateVector::named(StateKind::BellPhiPlus, &labels2()).unwrap();
        let err = bell
            .outcome_distribution(&[(0, BasisAxis::Z), (0, BasisAxis::X)])
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateQubit { index: 0 }));
    }

    #[test]
    fn cnot_builds_bell_from_plus_zero() {
        let plus = StateVector::from_amplitudes(
            vec![QubitLabel::Ancilla(9)],
            vec![
                Complex64::new(INV_SQRT2, 0.0),
                Complex64::new(INV_SQRT2, 0.0),
            ],
        )
        .unwrap();
        let extended = plus.attach_ancilla(0).unwrap();
        let bell = extended.apply_cnot(0, 1).unwrap();
        assert!((bell.amplitudes()[0b00].re - INV_SQRT2).abs() < 1e-12);
        assert!((bell.amplitudes()[0b11].re - INV_SQRT2).abs() < 1e-12);

        let zero = StateVector::product(&[QubitLabel::Ancilla(9)], &[Ket1::Zero]).unwrap();
        let still_zero = zero.attach_ancilla(0).unwrap().apply_cnot(0, 1).unwrap();
        assert!((still_zero.amplitudes()[0b00].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_from_ghz_leg_grows_the_cat_state() {
        let ghz = StateVector::named(StateKind::Ghz3, &labels3()).unwrap();
        let four = ghz.attach_ancilla(0).unwrap().apply_cnot(0, 3).unwrap();
        assert_eq!(four.num_qubits(), 4);
        assert!((four.amplitudes()[0b0000].re - INV_SQRT2).abs() < 1e-12);
        assert!((four.amplitudes()[0b1111].re - INV_SQRT2).abs() < 1e-12);
        assert!((four.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_is_capped_at_five() {
        let mut state = StateVector::named(StateKind::Ghz3, &labels3()).unwrap();
        state = state.attach_ancilla(0).unwrap();
        state = state.attach_ancilla(1).unwrap();
        let err = state.attach_ancilla(0).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { requested: 6, .. }));
    }

    #[test]
    fn global_phase_is_ignored_by_equiv() {
        let bell = StateVector::named(StateKind::BellPhiPlus, &labels2()).unwrap();
        let rotated = StateVector::from_amplitudes(
            labels2(),
            bell.amplitudes()
                .iter()
                .map(|a| a * Complex64::from_polar(1.0, 1.234))
                .collect(),
        )
        .unwrap();
        assert!(bell.approx_equiv(&rotated, 1e-10));

        let psi_minus = StateVector::from_amplitudes(
            labels2(),
            vec![
                Complex64::new(INV_SQRT2, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(-INV_SQRT2, 0.0),
            ],
        )
        .unwrap();
        assert!(!bell.approx_equiv(&psi_minus, 1e-10));
    }
}
