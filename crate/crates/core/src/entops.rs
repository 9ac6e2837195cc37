//! Entangling operations and the ebit-generation experiments: the two-qubit
//! SWAP, the pairwise SWAP across adjacent labs, and the cut-entropy
//! bookkeeping used by the lower-bound argument.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::netmodel::{build_network, DataInput, LabId, Network};
use crate::resgraph::ResourceMatrix;
use crate::statevec::Unitary;

/// A bipartition of the laboratories into two disjoint, exhaustive sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSpec {
    side_a: BTreeSet<LabId>,
    side_b: BTreeSet<LabId>,
}

impl CutSpec {
    pub fn new(
        side_a: impl IntoIterator<Item = LabId>,
        side_b: impl IntoIterator<Item = LabId>,
    ) -> Result<Self> {
        let side_a: BTreeSet<LabId> = side_a.into_iter().collect();
        let side_b: BTreeSet<LabId> = side_b.into_iter().collect();
        if let Some(&shared) = side_a.intersection(&side_b).next() {
            return Err(Error::OverlappingCut(shared));
        }
        Ok(CutSpec { side_a, side_b })
    }

    /// The odd/even partition: labs 1, 3, 5, ... against labs 2, 4, 6, ...
    pub fn even_odd(num_labs: usize) -> Self {
        let odd = (1..=num_labs).step_by(2).filter_map(LabId::new);
        let even = (2..=num_labs).step_by(2).filter_map(LabId::new);
        CutSpec::new(odd, even).expect("odd and even labs are disjoint")
    }

    pub fn side_a(&self) -> impl Iterator<Item = LabId> + '_ {
        self.side_a.iter().copied()
    }

    pub fn side_b(&self) -> impl Iterator<Item = LabId> + '_ {
        self.side_b.iter().copied()
    }

    pub fn swapped(&self) -> Self {
        CutSpec {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }

    /// Check the cut covers exactly the labs `1..=num_labs`.
    pub fn validate_for(&self, num_labs: usize) -> Result<()> {
        for &lab in self.side_a.iter().chain(&self.side_b) {
            if lab.index() > num_labs {
                return Err(Error::LabOutOfRange(lab.index(), num_labs));
            }
        }
        for j in 1..=num_labs {
            let lab = LabId::new(j).expect("positive index");
            if !self.side_a.contains(&lab) && !self.side_b.contains(&lab) {
                return Err(Error::IncompleteCut(lab));
            }
        }
        Ok(())
    }

    pub(crate) fn mask_a(&self) -> u64 {
        self.side_a
            .iter()
            .fold(0, |acc, lab| acc | 1 << (lab.index() - 1))
    }
}

/// The two-qubit SWAP: exchanges the states of its two target qubits.
///
/// As a permutation of little-endian basis labels: 00 -> 00, 01 -> 10,
/// 10 -> 01, 11 -> 11.
pub fn swap_unitary() -> Unitary {
    Unitary::permutation(4, |l| match l {
        1 => 2,
        2 => 1,
        other => other,
    })
}

/// The pairwise SWAP on an even number of qubits: a tensor product of SWAPs
/// on qubit pairs (0,1), (2,3), ..., (n-2, n-1).
pub fn ps_unitary(num_qubits: usize) -> Result<Unitary> {
    if num_qubits < 2 || !num_qubits.is_multiple_of(2) {
        return Err(Error::OddLabCount(num_qubits));
    }
    Ok(Unitary::permutation(1 << num_qubits, |label| {
        let mut out = 0;
        for k in (0..num_qubits).step_by(2) {
            let low = label >> k & 1;
            let high = label >> (k + 1) & 1;
            out |= (high << k) | (low << (k + 1));
        }
        out
    }))
}

/// One run of an ebit-generation experiment.
#[derive(Debug)]
pub struct ExperimentRun {
    /// Cut value across the watched partition before the collective operation.
    pub entropy_before: f64,
    /// Cut value after it; the ebits the operation established.
    pub entropy_after: f64,
    /// Final network, with its audit trail, for inspection.
    pub network: Network,
}

/// Two labs, each holding a locally prepared entangled pair; one SWAP across
/// the labs then turns purely local entanglement into two ebits between them.
///
/// Returns the cut value across the lab partition before (0) and after (2)
/// the swap.
pub fn two_ebit_experiment() -> ExperimentRun {
    let mut net = build_network(2, &ResourceMatrix::zeros(2), &DataInput::Ground)
        .expect("two-lab network");
    let lab1 = LabId::new(1).expect("lab 1");
    let lab2 = LabId::new(2).expect("lab 2");
    let a = net.data_qubit(lab1).expect("data qubit of lab 1");
    let b = net.data_qubit(lab2).expect("data qubit of lab 2");
    prepare_local_pair(&mut net, lab1, a);
    prepare_local_pair(&mut net, lab2, b);
    let cut = CutSpec::even_odd(2);
    let entropy_before = cut_entropy(&net, &cut).expect("valid cut");
    net.apply_reference_global(&swap_unitary(), &[a, b])
        .expect("swap across labs");
    let entropy_after = cut_entropy(&net, &cut).expect("valid cut");
    ExperimentRun {
        entropy_before,
        entropy_after,
        network: net,
    }
}

/// Every lab holds its qubit maximally entangled with a local ancilla; one
/// pairwise SWAP across adjacent labs then establishes `n` ebits across the
/// odd/even partition.
pub fn ps_ebit_experiment(num_labs: usize) -> Result<ExperimentRun> {
    if num_labs < 2 || !num_labs.is_multiple_of(2) {
        return Err(Error::OddLabCount(num_labs));
    }
    let mut net = build_network(num_labs, &ResourceMatrix::zeros(num_labs), &DataInput::Ground)?;
    let mut data = Vec::with_capacity(num_labs);
    for j in 1..=num_labs {
        let lab = LabId::new(j).expect("positive index");
        let q = net.data_qubit(lab)?;
        prepare_local_pair(&mut net, lab, q);
        data.push(q);
    }
    let cut = CutSpec::even_odd(num_labs);
    let entropy_before = cut_entropy(&net, &cut)?;
    net.apply_reference_global(&ps_unitary(num_labs)?, &data)?;
    let entropy_after = cut_entropy(&net, &cut)?;
    Ok(ExperimentRun {
        entropy_before,
        entropy_after,
        network: net,
    })
}

/// Entangle `q` with a fresh ancilla inside its own lab.
fn prepare_local_pair(net: &mut Network, lab: LabId, q: crate::netmodel::QubitId) {
    let anc = net.add_ancilla(lab).expect("ancilla allocation");
    net.apply_local(&Unitary::hadamard(), &[q])
        .expect("local Hadamard");
    net.apply_local(&Unitary::cnot(), &[q, anc])
        .expect("local CNOT");
}

/// Ebits shared across a lab bipartition: cut entropy of the live state plus
/// one per unconsumed registered pair crossing the cut.
pub fn cut_entropy(net: &Network, cut: &CutSpec) -> Result<f64> {
    cut.validate_for(net.num_labs())?;
    Ok(net.lab_cut_entropy(cut.mask_a()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{Bits, StateVector};

    fn lab(i: usize) -> LabId {
        LabId::new(i).unwrap()
    }

    fn labs(ids: &[usize]) -> Vec<LabId> {
        ids.iter().map(|&i| lab(i)).collect()
    }

    #[test]
    fn swap_exchanges_random_product_states() {
        for seed in 0..20 {
            let a = StateVector::haar_random(1, 2 * seed);
            let b = StateVector::haar_random(1, 2 * seed + 1);
            let swapped = a
                .tensor(&b)
                .apply_unitary(&swap_unitary(), &[0, 1])
                .unwrap();
            let expect = b.tensor(&a);
            assert!(swapped.fidelity_up_to_phase(&expect).unwrap() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn swap_moves_basis_label_one_to_two() {
        let input = StateVector::basis_state(2, &"10".parse::<Bits>().unwrap()).unwrap();
        let output = input.apply_unitary(&swap_unitary(), &[0, 1]).unwrap();
        let expect = StateVector::basis_state(2, &"01".parse::<Bits>().unwrap()).unwrap();
        assert!(output.fidelity_up_to_phase(&expect).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn swap_is_an_involution_and_unitary() {
        let s = swap_unitary();
        assert!(s.unitarity_residual() < 1e-12);
        let square = s.matmul(&s).unwrap();
        assert_eq!(square.entries(), Unitary::identity(4).entries());
    }

    #[test]
    fn ps_on_two_qubits_is_swap() {
        assert_eq!(ps_unitary(2).unwrap().entries(), swap_unitary().entries());
    }

    #[test]
    fn ps_swaps_bits_within_each_pair() {
        let u = ps_unitary(4).unwrap();
        let input = StateVector::basis_state(4, &"0111".parse::<Bits>().unwrap()).unwrap();
        let output = input.apply_unitary(&u, &[0, 1, 2, 3]).unwrap();
        let expect = StateVector::basis_state(4, &"1011".parse::<Bits>().unwrap()).unwrap();
        assert!(output.fidelity_up_to_phase(&expect).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn ps_matches_brute_force_label_permutation() {
        let u = ps_unitary(4).unwrap();
        let swap_pair_bits = |label: usize| -> usize {
            let mut out = 0;
            for pair in 0..2 {
                let b0 = label >> (2 * pair) & 1;
                let b1 = label >> (2 * pair + 1) & 1;
                out |= b0 << (2 * pair + 1) | b1 << (2 * pair);
            }
            out
        };
        for col in 0..16 {
            for row in 0..16 {
                let expect = if row == swap_pair_bits(col) { 1.0 } else { 0.0 };
                assert_eq!(u.entry(row, col).re, expect, "entry ({row},{col})");
                assert_eq!(u.entry(row, col).im, 0.0);
            }
        }
    }

    #[test]
    fn ps_is_an_involution() {
        let u = ps_unitary(4).unwrap();
        let square = u.matmul(&u).unwrap();
        assert_eq!(square.entries(), Unitary::identity(16).entries());
    }

    #[test]
    fn ps_rejects_odd_qubit_counts() {
        assert!(matches!(ps_unitary(3), Err(Error::OddLabCount(3))));
        assert!(matches!(ps_unitary(0), Err(Error::OddLabCount(0))));
    }

    #[test]
    fn two_ebit_experiment_produces_two_ebits() {
        let run = two_ebit_experiment();
        assert!(run.entropy_before.abs() < 1e-12);
        assert!((run.entropy_after - 2.0).abs() < 1e-9);
        // The swapped qubit is now maximally entangled with the remote ancilla.
        let alpha = run.network.data_qubit(lab(1)).unwrap();
        let entropy = run.network.entanglement_of(&[alpha]).unwrap();
        assert!((entropy - 1.0).abs() < 1e-9);
        // Every locality-guarded step respected monotonicity.
        assert!(run.network.audit_report().pass);
    }

    #[test]
    fn ps_experiment_establishes_n_ebits() {
        for n in [2usize, 4, 6] {
            let run = ps_ebit_experiment(n).unwrap();
            assert!(run.entropy_before.abs() < 1e-12, "n = {n}");
            assert!((run.entropy_after - n as f64).abs() < 1e-9, "n = {n}");
            assert!(run.network.audit_report().pass);
        }
        assert!(matches!(ps_ebit_experiment(5), Err(Error::OddLabCount(5))));
    }

    #[test]
    fn cut_entropy_of_fresh_star_counts_crossing_pairs() {
        let net = build_network(4, &ResourceMatrix::star(4), &DataInput::Ground).unwrap();
        let hub_cut = CutSpec::new(labs(&[1]), labs(&[2, 3, 4])).unwrap();
        assert_eq!(cut_entropy(&net, &hub_cut).unwrap(), 6.0);

        // Independently count star edges crossing the odd/even partition.
        let even_odd = CutSpec::even_odd(4);
        let star = ResourceMatrix::star(4);
        let mut crossing = 0.0;
        for a in even_odd.side_a() {
            for b in even_odd.side_b() {
                crossing += star.weight(a.index() - 1, b.index() - 1);
            }
        }
        assert_eq!(crossing, 4.0);
        assert_eq!(cut_entropy(&net, &even_odd).unwrap(), crossing);
    }

    #[test]
    fn cut_entropy_is_side_symmetric() {
        let net = build_network(4, &ResourceMatrix::star(4), &DataInput::Ground).unwrap();
        let cut = CutSpec::new(labs(&[1, 4]), labs(&[2, 3])).unwrap();
        let forward = cut_entropy(&net, &cut).unwrap();
        let reverse = cut_entropy(&net, &cut.swapped()).unwrap();
        assert!((forward - reverse).abs() < 1e-12);
    }

    #[test]
    fn cut_spec_validation() {
        assert!(matches!(
            CutSpec::new(labs(&[1, 2]), labs(&[2, 3])),
            Err(Error::OverlappingCut(_))
        ));
        let incomplete = CutSpec::new(labs(&[1]), labs(&[3])).unwrap();
        assert!(matches!(
            incomplete.validate_for(3),
            Err(Error::IncompleteCut(_))
        ));
        let out_of_range = CutSpec::new(labs(&[1, 5]), labs(&[2])).unwrap();
        assert!(matches!(
            out_of_range.validate_for(2),
            Err(Error::LabOutOfRange(5, 2))
        ));
    }
}
