//! The laboratory network: qubit ownership, the Bell-pair registry, the
//! classical channel, and the resource ledger that enforces and records
//! ebit/cbit consumption.
//!
//! Registered-but-unused Bell pairs are kept out of the dense register: each
//! one is a known product factor in the canonical maximally entangled state,
//! so it contributes exactly one ebit to any lab cut it crosses. A pair is
//! tensored into the dense register the moment it is consumed. The full live
//! state, pristine pairs included, is available from [`Network::joint_state`].

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resgraph::ResourceMatrix;
use crate::statevec::{Bits, MeasureMode, StateVector, Unitary, TOL_SPECTRAL};

/// Identifier of one laboratory, counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabId(usize);

impl LabId {
    pub fn new(index: usize) -> Option<Self> {
        (index >= 1).then_some(LabId(index))
    }

    pub fn index(&self) -> usize {
        self.0
    }
}

impl fmt::Display for LabId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

/// Stable handle for one physical qubit; survives register re-indexing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(u32);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// One registered unit of shared entanglement between two labs.
///
/// Every pair is prepared in the canonical maximally entangled state with
/// amplitudes `(1/sqrt(2)) [1, 0, 0, 1]` at registration time.
#[derive(Clone, Copy, Debug)]
pub struct BellPair {
    qubit_a: QubitId,
    qubit_b: QubitId,
    labs: (LabId, LabId),
}

impl BellPair {
    pub fn qubit_a(&self) -> QubitId {
        self.qubit_a
    }

    pub fn qubit_b(&self) -> QubitId {
        self.qubit_b
    }

    pub fn labs(&self) -> (LabId, LabId) {
        self.labs
    }

    fn crosses(&self, side_a_mask: u64) -> bool {
        let a = side_a_mask >> (self.labs.0.index() - 1) & 1;
        let b = side_a_mask >> (self.labs.1.index() - 1) & 1;
        a != b
    }
}

/// The canonical Bell state carried by every registered pair.
pub fn bell_state() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_amplitudes(
        2,
        vec![
            Complex64::new(h, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(h, 0.0),
        ],
    )
    .expect("canonical Bell state is normalized")
}

/// Monotone counters of consumed entanglement and transmitted classical bits.
#[derive(Clone, Debug, Default)]
pub struct Ledger {
    ebits: BTreeMap<(LabId, LabId), u64>,
    cbits: BTreeMap<(LabId, LabId), u64>,
}

impl Ledger {
    fn add_ebit(&mut self, i: LabId, j: LabId) {
        let key = (i.min(j), i.max(j));
        *self.ebits.entry(key).or_insert(0) += 1;
    }

    fn add_cbits(&mut self, from: LabId, to: LabId, count: u64) {
        *self.cbits.entry((from, to)).or_insert(0) += count;
    }

    /// Ebits consumed between a pair of labs, order-insensitive.
    pub fn ebits_consumed(&self, i: LabId, j: LabId) -> u64 {
        self.ebits.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    /// Classical bits sent along the directed link `from -> to`.
    pub fn cbits_sent(&self, from: LabId, to: LabId) -> u64 {
        self.cbits.get(&(from, to)).copied().unwrap_or(0)
    }

    pub fn ebits_total(&self) -> u64 {
        self.ebits.values().sum()
    }

    pub fn cbits_total(&self) -> u64 {
        self.cbits.values().sum()
    }
}

/// Initial state of the data qubits, one per lab.
#[derive(Clone, Debug)]
pub enum DataInput {
    /// Every data qubit starts in the ground state.
    Ground,
    /// One single-qubit state per lab, in lab order.
    Product(Vec<StateVector>),
    /// An arbitrary joint state over the data qubits; qubit `j-1` belongs to
    /// lab `j`. Collective operations must work on entangled inputs too.
    Joint(StateVector),
}

impl DataInput {
    fn realize(&self, num_labs: usize) -> Result<StateVector> {
        match self {
            DataInput::Ground => Ok(StateVector::ground(num_labs)),
            DataInput::Product(states) => {
                if states.len() != num_labs {
                    return Err(Error::QubitCountMismatch(num_labs, states.len()));
                }
                let mut joint = StateVector::ground(0);
                for s in states {
                    if s.num_qubits() != 1 {
                        return Err(Error::QubitCountMismatch(1, s.num_qubits()));
                    }
                    joint = joint.tensor(s);
                }
                Ok(joint)
            }
            DataInput::Joint(state) => {
                if state.num_qubits() != num_labs {
                    return Err(Error::QubitCountMismatch(num_labs, state.num_qubits()));
                }
                Ok(state.clone())
            }
        }
    }
}

/// Result of the step-by-step entanglement monotonicity audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// True when no audited step increased any cut value beyond `1e-9`.
    pub pass: bool,
    /// Largest single-step increase observed across all audited cuts.
    pub max_increase: f64,
    /// Number of audited protocol steps.
    pub steps: usize,
    /// Number of lab bipartitions tracked.
    pub bipartitions: usize,
}

/// Tracks cut entropy plus crossing pristine pairs across protocol steps.
///
/// Bipartitions are exhaustive for networks of up to 6 labs. Beyond that the
/// audit tracks every single-lab cut plus the even/odd partition, which keeps
/// the step cost bounded while still watching the cuts the protocols stress.
#[derive(Clone, Debug)]
struct CutAudit {
    masks: Vec<u64>,
    prev: Vec<f64>,
    max_increase: f64,
    steps: usize,
}

impl CutAudit {
    fn new(num_labs: usize) -> Self {
        let mut masks = Vec::new();
        if num_labs <= 6 {
            // All proper bipartitions, each counted once by pinning lab 1.
            let combos = 1u64 << (num_labs.saturating_sub(1));
            for bits in 0..combos.saturating_sub(1) {
                masks.push(1 | (bits << 1));
            }
        } else {
            for j in 0..num_labs {
                masks.push(1 << j);
            }
            let mut even_odd = 0u64;
            for j in (1..=num_labs).filter(|j| j % 2 == 1) {
                even_odd |= 1 << (j - 1);
            }
            masks.push(even_odd);
        }
        CutAudit {
            prev: vec![0.0; masks.len()],
            masks,
            max_increase: 0.0,
            steps: 0,
        }
    }
}

/// A network of separated laboratories holding one data qubit each, shared
/// Bell pairs, and a classical channel.
#[derive(Clone, Debug)]
pub struct Network {
    num_labs: usize,
    state: StateVector,
    positions: Vec<QubitId>,
    owner: BTreeMap<QubitId, LabId>,
    data: Vec<QubitId>,
    pristine: Vec<BellPair>,
    ledger: Ledger,
    channel: BTreeMap<(LabId, LabId), VecDeque<Bits>>,
    initial_matrix: ResourceMatrix,
    initial_data: StateVector,
    audit: CutAudit,
    next_qubit: u32,
}

/// Build a network of `num_labs` labs holding the given data input, with
/// `floor(w)` Bell pairs registered per lab pair of weight `w`.
pub fn build_network(
    num_labs: usize,
    resources: &ResourceMatrix,
    input: &DataInput,
) -> Result<Network> {
    if num_labs == 0 {
        return Err(Error::EmptyNetwork);
    }
    if resources.n() != num_labs {
        return Err(Error::MatrixShape {
            expected: num_labs,
            got: resources.n(),
        });
    }
    let initial_data = input.realize(num_labs)?;
    let mut owner = BTreeMap::new();
    let mut positions = Vec::with_capacity(num_labs);
    let mut data = Vec::with_capacity(num_labs);
    let mut next_qubit = 0u32;
    for j in 1..=num_labs {
        let id = QubitId(next_qubit);
        next_qubit += 1;
        owner.insert(id, LabId(j));
        positions.push(id);
        data.push(id);
    }
    let mut pristine = Vec::new();
    for i in 1..=num_labs {
        for j in (i + 1)..=num_labs {
            let count = resources.weight(i - 1, j - 1).floor() as u64;
            for _ in 0..count {
                let qubit_a = QubitId(next_qubit);
                let qubit_b = QubitId(next_qubit + 1);
                next_qubit += 2;
                owner.insert(qubit_a, LabId(i));
                owner.insert(qubit_b, LabId(j));
                pristine.push(BellPair {
                    qubit_a,
                    qubit_b,
                    labs: (LabId(i), LabId(j)),
                });
            }
        }
    }
    let mut net = Network {
        num_labs,
        state: initial_data.clone(),
        positions,
        owner,
        data,
        pristine,
        ledger: Ledger::default(),
        channel: BTreeMap::new(),
        initial_matrix: resources.clone(),
        initial_data,
        audit: CutAudit::new(num_labs),
        next_qubit,
    };
    net.record_step(true);
    Ok(net)
}

impl Network {
    pub fn num_labs(&self) -> usize {
        self.num_labs
    }

    pub fn lab_ids(&self) -> impl Iterator<Item = LabId> {
        (1..=self.num_labs).map(LabId)
    }

    fn check_lab(&self, lab: LabId) -> Result<()> {
        if lab.index() > self.num_labs {
            return Err(Error::LabOutOfRange(lab.index(), self.num_labs));
        }
        Ok(())
    }

    /// The qubit currently carrying lab `lab`'s data.
    pub fn data_qubit(&self, lab: LabId) -> Result<QubitId> {
        self.check_lab(lab)?;
        Ok(self.data[lab.index() - 1])
    }

    /// Which lab's data a qubit currently carries, if any.
    pub fn data_role(&self, q: QubitId) -> Option<LabId> {
        self.data
            .iter()
            .position(|&d| d == q)
            .map(|j| LabId(j + 1))
    }

    pub(crate) fn set_data_qubit(&mut self, lab: LabId, q: QubitId) -> Result<()> {
        self.check_lab(lab)?;
        if !self.owner.contains_key(&q) {
            return Err(Error::UnknownQubit(q));
        }
        self.data[lab.index() - 1] = q;
        Ok(())
    }

    pub fn owner(&self, q: QubitId) -> Result<LabId> {
        self.owner.get(&q).copied().ok_or(Error::UnknownQubit(q))
    }

    /// All live qubits: the dense register plus pristine pair members.
    pub fn live_qubits(&self) -> usize {
        self.positions.len() + 2 * self.pristine.len()
    }

    pub fn active_qubits(&self) -> usize {
        self.positions.len()
    }

    /// Dense state over the active qubits only.
    pub fn active_state(&self) -> &StateVector {
        &self.state
    }

    pub fn pristine_pairs(&self) -> &[BellPair] {
        &self.pristine
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn initial_matrix(&self) -> &ResourceMatrix {
        &self.initial_matrix
    }

    /// The joint data-qubit state the network was built with.
    pub fn initial_data(&self) -> &StateVector {
        &self.initial_data
    }

    /// Unused registered pairs between two labs, order-insensitive.
    pub fn available_ebits(&self, i: LabId, j: LabId) -> u64 {
        self.pristine
            .iter()
            .filter(|p| p.labs == (i, j) || p.labs == (j, i))
            .count() as u64
    }

    /// Matrix of still-registered pairs per lab pair.
    pub fn residual_matrix(&self) -> ResourceMatrix {
        let mut m = ResourceMatrix::zeros(self.num_labs);
        for pair in &self.pristine {
            let (i, j) = (pair.labs.0.index() - 1, pair.labs.1.index() - 1);
            let w = m.weight(i, j) + 1.0;
            m.set_edge(i, j, w);
        }
        m
    }

    fn position_of(&self, q: QubitId) -> Result<usize> {
        self.positions
            .iter()
            .position(|&p| p == q)
            .ok_or(Error::UnknownQubit(q))
    }

    fn positions_of(&self, qubits: &[QubitId]) -> Result<Vec<usize>> {
        qubits.iter().map(|&q| self.position_of(q)).collect()
    }

    /// Ok exactly when all target qubits share one owner.
    pub fn locality_guard(&self, qubits: &[QubitId]) -> Result<()> {
        let mut labs: Vec<LabId> = qubits
            .iter()
            .map(|&q| self.owner(q))
            .collect::<Result<_>>()?;
        labs.sort();
        labs.dedup();
        if labs.len() > 1 {
            return Err(Error::NonlocalGate(labs));
        }
        Ok(())
    }

    /// Apply a gate confined to one lab; refuses nonlocal target sets.
    pub fn apply_local(&mut self, u: &Unitary, qubits: &[QubitId]) -> Result<()> {
        self.locality_guard(qubits)?;
        let targets = self.positions_of(qubits)?;
        self.state = self.state.apply_unitary(u, &targets)?;
        self.record_step(false);
        Ok(())
    }

    /// Apply a collective operation without the locality guard.
    ///
    /// This is the tagged escape hatch for reference executions: the
    /// operation whose entangling power is under study, or a direct global
    /// application used for comparison. The audit rebaselines across it
    /// instead of treating it as a protocol step.
    pub fn apply_reference_global(&mut self, u: &Unitary, qubits: &[QubitId]) -> Result<()> {
        let targets = self.positions_of(qubits)?;
        self.state = self.state.apply_unitary(u, &targets)?;
        self.record_step(true);
        Ok(())
    }

    /// Measure qubits of a single lab in the computational basis.
    pub fn measure_local(&mut self, qubits: &[QubitId], mode: &MeasureMode) -> Result<(Bits, f64)> {
        self.locality_guard(qubits)?;
        let targets = self.positions_of(qubits)?;
        let m = self.state.measure(&targets, mode)?;
        self.state = m.state;
        self.record_step(false);
        Ok((m.outcome, m.probability))
    }

    /// Retire measured-out qubits from the dense register.
    pub fn discard(&mut self, qubits: &[QubitId]) -> Result<()> {
        for &q in qubits {
            if let Some(lab) = self.data_role(q) {
                return Err(Error::ProtocolViolation(format!(
                    "cannot discard {q}, it carries {lab}'s data"
                )));
            }
        }
        let targets = self.positions_of(qubits)?;
        self.state = self.state.discard_qubits(&targets)?;
        let mut sorted = targets;
        sorted.sort_unstable();
        for pos in sorted.into_iter().rev() {
            let q = self.positions.remove(pos);
            self.owner.remove(&q);
        }
        self.record_step(false);
        Ok(())
    }

    /// Allocate a fresh ground-state work qubit inside a lab.
    pub fn add_ancilla(&mut self, lab: LabId) -> Result<QubitId> {
        self.check_lab(lab)?;
        let id = QubitId(self.next_qubit);
        self.next_qubit += 1;
        self.state = self.state.tensor(&StateVector::ground(1));
        self.positions.push(id);
        self.owner.insert(id, lab);
        self.record_step(false);
        Ok(id)
    }

    /// Take one registered pair between `i` and `j` out of the registry,
    /// charge the ledger, and materialize its two qubits as workspace.
    pub fn consume_bell_pair(&mut self, i: LabId, j: LabId) -> Result<BellPair> {
        self.check_lab(i)?;
        self.check_lab(j)?;
        let idx = self
            .pristine
            .iter()
            .position(|p| p.labs == (i, j) || p.labs == (j, i))
            .ok_or(Error::NoSharedPair(i, j))?;
        let pair = self.pristine.remove(idx);
        self.state = self.state.tensor(&bell_state());
        self.positions.push(pair.qubit_a);
        self.positions.push(pair.qubit_b);
        self.ledger.add_ebit(i, j);
        self.record_step(false);
        Ok(pair)
    }

    /// Deliver a classical message reliably and in order, charging the ledger
    /// one cbit per transmitted bit.
    pub fn send_classical(&mut self, from: LabId, to: LabId, bits: Bits) -> Result<()> {
        self.check_lab(from)?;
        self.check_lab(to)?;
        if from == to {
            return Err(Error::SelfMessage(from));
        }
        self.ledger.add_cbits(from, to, bits.len() as u64);
        self.channel.entry((from, to)).or_default().push_back(bits);
        self.record_step(false);
        Ok(())
    }

    /// Pop the oldest undelivered message on the link `from -> at`.
    pub fn recv_classical(&mut self, at: LabId, from: LabId) -> Option<Bits> {
        self.channel.get_mut(&(from, at))?.pop_front()
    }

    /// Entanglement entropy of a set of live register qubits with everything
    /// else in the dense register.
    pub fn entanglement_of(&self, qubits: &[QubitId]) -> Result<f64> {
        let targets = self.positions_of(qubits)?;
        self.state.entanglement_entropy(&targets)
    }

    /// Entropy of the network across one lab bipartition: cut entropy of the
    /// dense register plus one ebit per pristine pair crossing the cut.
    pub(crate) fn lab_cut_entropy(&self, side_a_mask: u64) -> f64 {
        let cut: Vec<usize> = self
            .positions
            .iter()
            .enumerate()
            .filter(|(_, q)| {
                let lab = self.owner[q];
                side_a_mask >> (lab.index() - 1) & 1 == 1
            })
            .map(|(pos, _)| pos)
            .collect();
        let dense = if cut.is_empty() || cut.len() == self.positions.len() {
            0.0
        } else {
            self.state
                .entanglement_entropy(&cut)
                .expect("positions are valid targets")
        };
        let crossing = self.pristine.iter().filter(|p| p.crosses(side_a_mask)).count();
        dense + crossing as f64
    }

    fn record_step(&mut self, rebase: bool) {
        let values: Vec<f64> = self
            .audit
            .masks
            .iter()
            .map(|&m| self.lab_cut_entropy(m))
            .collect();
        if !rebase {
            for (now, before) in values.iter().zip(&self.audit.prev) {
                let increase = now - before;
                if increase > self.audit.max_increase {
                    self.audit.max_increase = increase;
                }
            }
            self.audit.steps += 1;
        }
        self.audit.prev = values;
    }

    pub fn audit_report(&self) -> AuditReport {
        AuditReport {
            pass: self.audit.max_increase <= TOL_SPECTRAL,
            max_increase: self.audit.max_increase,
            steps: self.audit.steps,
            bipartitions: self.audit.masks.len(),
        }
    }

    /// Per-pair resource conservation: registered plus consumed pairs equal
    /// whole pairs of the initial matrix, for every lab pair.
    pub fn conserves_resources(&self) -> bool {
        for i in 1..=self.num_labs {
            for j in (i + 1)..=self.num_labs {
                let (li, lj) = (LabId(i), LabId(j));
                let initial = self.initial_matrix.weight(i - 1, j - 1).floor() as u64;
                if self.available_ebits(li, lj) + self.ledger.ebits_consumed(li, lj) != initial {
                    return false;
                }
            }
        }
        true
    }

    /// The data-qubit state with qubit `j-1` holding lab `j`'s data.
    ///
    /// Only valid once every workspace qubit has been retired.
    pub fn data_state(&self) -> Result<StateVector> {
        if self.positions.len() != self.num_labs {
            return Err(Error::ProtocolViolation(format!(
                "{} workspace qubits still live",
                self.positions.len() - self.num_labs
            )));
        }
        let perm: Vec<usize> = self
            .data
            .iter()
            .map(|&q| self.position_of(q))
            .collect::<Result<_>>()?;
        self.state.permute_qubits(&perm)
    }

    /// Materialize the full live state, pristine pairs included, with qubits
    /// ordered by their stable ids.
    pub fn joint_state(&self) -> StateVector {
        let mut full = self.state.clone();
        let mut ids = self.positions.clone();
        for pair in &self.pristine {
            full = full.tensor(&bell_state());
            ids.push(pair.qubit_a);
            ids.push(pair.qubit_b);
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        let perm: Vec<usize> = sorted
            .iter()
            .map(|q| ids.iter().position(|p| p == q).expect("id present"))
            .collect();
        full.permute_qubits(&perm).expect("valid permutation")
    }
}
