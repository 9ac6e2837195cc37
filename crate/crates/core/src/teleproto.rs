//! The teleportation primitive and the hub protocol: teleport every remote
//! data qubit to lab 1, apply the collective unitary there locally, then
//! teleport the results back.
//!
//! Every teleportation consumes exactly one registered pair and sends exactly
//! two classical bits, so a full hub run on `n` labs costs `2(n-1)` ebits and
//! `4(n-1)` cbits regardless of the unitary or the measurement outcomes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{AuditReport, LabId, Network, QubitId};
use crate::resgraph::ResourceMatrix;
use crate::statevec::{Bits, MeasureMode, Unitary};

/// Resource trace of a single qubit teleportation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportRecord {
    pub source: LabId,
    pub destination: LabId,
    /// The two measured bits: data qubit first, then the local pair half.
    pub branch_outcome: Bits,
    /// Born probability of that branch; 1/4 for every branch of an honest
    /// teleportation.
    pub probability: f64,
    pub ebits_used: u64,
    pub cbits_used: u64,
}

/// How a teleportation resolves its Bell-measurement branch.
#[derive(Clone, Debug)]
pub enum TeleportBranch {
    /// Born-rule sampling from a per-call seed.
    Sampled { seed: u64 },
    /// Force one of the four branches (two bits).
    Forced(Bits),
}

/// Teleport the state of `q` to a fresh qubit inside `dest`.
///
/// Consumes one registered pair between the owner of `q` and `dest`, runs the
/// entangling rotation and two-qubit measurement at the source, ships the two
/// outcome bits over the classical channel, and applies the conditional
/// bit/phase flips at the destination after delivery. The measured qubits are
/// retired; if `q` carried a lab's data, the destination half takes over that
/// role.
pub fn teleport_qubit(
    net: &mut Network,
    q: QubitId,
    dest: LabId,
    branch: &TeleportBranch,
) -> Result<TeleportRecord> {
    let source = net.owner(q)?;
    let pair = net.consume_bell_pair(source, dest)?;
    let (near, far) = if pair.labs().0 == source {
        (pair.qubit_a(), pair.qubit_b())
    } else {
        (pair.qubit_b(), pair.qubit_a())
    };

    net.apply_local(&Unitary::cnot(), &[q, near])?;
    net.apply_local(&Unitary::hadamard(), &[q])?;
    let mode = match branch {
        TeleportBranch::Sampled { seed } => MeasureMode::Sampled { seed: *seed },
        TeleportBranch::Forced(bits) => MeasureMode::Branch {
            outcome: bits.clone(),
        },
    };
    let (outcome, probability) = net.measure_local(&[q, near], &mode)?;

    // Corrections run at the receiver, from the delivered message.
    net.send_classical(source, dest, outcome.clone())?;
    let message = net
        .recv_classical(dest, source)
        .expect("classical channel is reliable");
    if message.bit(1) {
        net.apply_local(&Unitary::pauli_x(), &[far])?;
    }
    if message.bit(0) {
        net.apply_local(&Unitary::pauli_z(), &[far])?;
    }

    if let Some(role) = net.data_role(q) {
        net.set_data_qubit(role, far)?;
    }
    net.discard(&[q, near])?;

    Ok(TeleportRecord {
        source,
        destination: dest,
        branch_outcome: outcome,
        probability,
        ebits_used: 1,
        cbits_used: 2,
    })
}

/// Summary of a hub-protocol execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub n: usize,
    /// Worst-case overlap with the directly applied unitary, over all
    /// verified branches; 1 means exact up to global phase.
    pub fidelity: f64,
    pub ebits_total: u64,
    pub cbits_total: u64,
    /// Number of correction-branch assignments the run verified.
    pub branches_verified: usize,
    /// Per-teleportation trace of one representative run.
    pub records: Vec<TeleportRecord>,
    pub monotonicity_audit: AuditReport,
}

/// Branch handling for a hub run.
#[derive(Clone, Debug)]
pub enum HubMode {
    /// One run with Born-sampled measurement outcomes.
    Sampled { seed: u64 },
    /// Verify correction branches: all `4^(2(n-1))` of them for `n <= 3`, a
    /// seeded 256-branch sample for larger networks.
    Exhaustive { seed: u64 },
}

/// Execute an arbitrary collective unitary on the data qubits of a fresh
/// star network by teleporting them to lab 1 and back.
///
/// The report's fidelity compares the final data state against direct
/// application of `u` to the initial data state; resource totals come from
/// the network ledger.
pub fn hub_execute(net: &Network, u: &Unitary, mode: &HubMode) -> Result<ProtocolReport> {
    let n = net.num_labs();
    if u.dim() != 1 << n {
        return Err(Error::GateDimension {
            dim: u.dim(),
            targets: n,
        });
    }
    let pairs_expected = 2 * (n as u64).saturating_sub(1);
    if *net.initial_matrix() != ResourceMatrix::star(n)
        || net.ledger().ebits_total() != 0
        || net.ledger().cbits_total() != 0
        || net.pristine_pairs().len() as u64 != pairs_expected
        || net.active_qubits() != n
    {
        return Err(Error::NotStarTopology(n));
    }

    let teleports = 2 * (n - 1);
    let all_targets: Vec<usize> = (0..n).collect();
    let expected = net.initial_data().apply_unitary(u, &all_targets)?;

    let (seed, plans): (u64, Vec<Option<u128>>) = match mode {
        HubMode::Sampled { seed } => (*seed, vec![None]),
        HubMode::Exhaustive { seed } => {
            if teleports > 60 {
                return Err(Error::ExhaustiveTooLarge(n));
            }
            let combos = 1u128 << (2 * teleports);
            let plans = if n <= 3 {
                (0..combos).map(Some).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..256).map(|_| Some(rng.random_range(0..combos))).collect()
            };
            (*seed, plans)
        }
    };

    let mut sample_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_fidelity = f64::INFINITY;
    let mut costs: Option<(u64, u64)> = None;
    let mut first_records = Vec::new();
    let mut worst_audit: Option<AuditReport> = None;

    for plan in &plans {
        let mut work = net.clone();
        let mut records = Vec::with_capacity(teleports);
        let hub = LabId::new(1).expect("lab 1 exists");

        for j in 2..=n {
            let branch = next_branch(plan, records.len(), &mut sample_rng);
            let q = work.data_qubit(LabId::new(j).expect("positive index"))?;
            records.push(teleport_qubit(&mut work, q, hub, &branch)?);
        }

        let gathered: Vec<QubitId> = (1..=n)
            .map(|j| work.data_qubit(LabId::new(j).expect("positive index")))
            .collect::<Result<_>>()?;
        work.apply_local(u, &gathered)?;

        for j in 2..=n {
            let home = LabId::new(j).expect("positive index");
            let branch = next_branch(plan, records.len(), &mut sample_rng);
            let q = work.data_qubit(home)?;
            records.push(teleport_qubit(&mut work, q, home, &branch)?);
        }

        let fidelity = work.data_state()?.fidelity_up_to_phase(&expected)?;
        min_fidelity = min_fidelity.min(fidelity);

        let run_costs = (work.ledger().ebits_total(), work.ledger().cbits_total());
        match costs {
            None => {
                costs = Some(run_costs);
                first_records = records;
            }
            Some(c) if c != run_costs => {
                return Err(Error::ProtocolViolation(format!(
                    "resource counts varied across branches: {c:?} vs {run_costs:?}"
                )));
            }
            Some(_) => {}
        }

        let audit = work.audit_report();
        worst_audit = Some(match worst_audit.take() {
            Some(w) if w.max_increase >= audit.max_increase => w,
            _ => audit,
        });
    }

    let (ebits_total, cbits_total) = costs.expect("at least one run");
    debug_assert_eq!(ebits_total, first_records.iter().map(|r| r.ebits_used).sum::<u64>());
    debug_assert_eq!(cbits_total, first_records.iter().map(|r| r.cbits_used).sum::<u64>());
    Ok(ProtocolReport {
        n,
        fidelity: min_fidelity,
        ebits_total,
        cbits_total,
        branches_verified: plans.len(),
        records: first_records,
        monotonicity_audit: worst_audit.expect("at least one run"),
    })
}

fn next_branch(plan: &Option<u128>, teleport_index: usize, rng: &mut ChaCha8Rng) -> TeleportBranch {
    match plan {
        None => TeleportBranch::Sampled { seed: rng.random() },
        Some(combo) => {
            let label = (combo >> (2 * teleport_index)) & 3;
            TeleportBranch::Forced(Bits::from_label(label as usize, 2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{build_network, DataInput};
    use crate::statevec::StateVector;

    fn lab(i: usize) -> LabId {
        LabId::new(i).unwrap()
    }

    fn plus_state() -> StateVector {
        StateVector::ground(1)
            .apply_unitary(&Unitary::hadamard(), &[0])
            .unwrap()
    }

    #[test]
    fn teleport_plus_state_across_all_branches() {
        for label in 0..4 {
            let input = DataInput::Product(vec![StateVector::ground(1), plus_state()]);
            let mut net = build_network(2, &ResourceMatrix::star(2), &input).unwrap();
            let q = net.data_qubit(lab(2)).unwrap();
            let record = teleport_qubit(
                &mut net,
                q,
                lab(1),
                &TeleportBranch::Forced(Bits::from_label(label, 2)),
            )
            .unwrap();

            assert!((record.probability - 0.25).abs() < 1e-10, "branch {label}");
            let final_state = net.data_state().unwrap();
            let fidelity = final_state
                .fidelity_up_to_phase(net.initial_data())
                .unwrap();
            assert!(fidelity >= 1.0 - 1e-10, "branch {label}: {fidelity}");

            assert_eq!(record.ebits_used, 1);
            assert_eq!(record.cbits_used, 2);
            assert_eq!(net.ledger().ebits_total(), 1);
            assert_eq!(net.ledger().cbits_total(), 2);
            assert_eq!(net.owner(net.data_qubit(lab(2)).unwrap()).unwrap(), lab(1));
            assert!(net.audit_report().pass);
        }
    }

    #[test]
    fn teleport_preserves_entanglement_with_a_partner() {
        // Data qubits of labs 2 and 3 start in a Bell state.
        let joint = StateVector::ground(3)
            .apply_unitary(&Unitary::hadamard(), &[1])
            .unwrap()
            .apply_unitary(&Unitary::cnot(), &[1, 2])
            .unwrap();
        for label in 0..4 {
            let mut net =
                build_network(3, &ResourceMatrix::star(3), &DataInput::Joint(joint.clone()))
                    .unwrap();
            let q = net.data_qubit(lab(2)).unwrap();
            teleport_qubit(
                &mut net,
                q,
                lab(1),
                &TeleportBranch::Forced(Bits::from_label(label, 2)),
            )
            .unwrap();

            let carrier = net.data_qubit(lab(2)).unwrap();
            let entropy = net.entanglement_of(&[carrier]).unwrap();
            assert!((entropy - 1.0).abs() < 1e-9, "branch {label}");
            let fidelity = net
                .data_state()
                .unwrap()
                .fidelity_up_to_phase(net.initial_data())
                .unwrap();
            assert!(fidelity >= 1.0 - 1e-10, "branch {label}");
        }
    }

    #[test]
    fn teleport_without_shared_pair_fails() {
        let mut net = build_network(3, &ResourceMatrix::star(3), &DataInput::Ground).unwrap();
        let q = net.data_qubit(lab(2)).unwrap();
        assert!(matches!(
            teleport_qubit(&mut net, q, lab(3), &TeleportBranch::Sampled { seed: 0 }),
            Err(Error::NoSharedPair(_, _))
        ));
    }

    #[test]
    fn hub_identity_still_pays_full_cost() {
        let net = build_network(2, &ResourceMatrix::star(2), &DataInput::Ground).unwrap();
        let report = hub_execute(&net, &Unitary::identity(4), &HubMode::Sampled { seed: 1 }).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-10);
        assert_eq!(report.ebits_total, 2);
        assert_eq!(report.cbits_total, 4);
        assert_eq!(report.records.len(), 2);
        assert!(report.monotonicity_audit.pass);
    }

    #[test]
    fn hub_runs_pairwise_swap_on_four_labs() {
        let input = DataInput::Product(vec![
            StateVector::haar_random(1, 10),
            StateVector::haar_random(1, 11),
            StateVector::haar_random(1, 12),
            StateVector::haar_random(1, 13),
        ]);
        let net = build_network(4, &ResourceMatrix::star(4), &input).unwrap();
        let ps = crate::entops::ps_unitary(4).unwrap();
        let report = hub_execute(&net, &ps, &HubMode::Sampled { seed: 3 }).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-9);
        assert_eq!(report.ebits_total, 6);
        assert_eq!(report.cbits_total, 12);
    }

    #[test]
    fn hub_matches_direct_haar_application_on_three_labs() {
        let net = build_network(3, &ResourceMatrix::star(3), &DataInput::Ground).unwrap();
        let u = Unitary::haar_random(8, 7).unwrap();
        let report = hub_execute(&net, &u, &HubMode::Sampled { seed: 7 }).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-9);
        assert_eq!(report.ebits_total, 4);
        assert_eq!(report.cbits_total, 8);
    }

    #[test]
    fn hub_exhaustive_covers_every_branch() {
        let net = build_network(2, &ResourceMatrix::star(2), &DataInput::Ground).unwrap();
        let u = Unitary::haar_random(4, 21).unwrap();
        let report = hub_execute(&net, &u, &HubMode::Exhaustive { seed: 21 }).unwrap();
        assert_eq!(report.branches_verified, 16);
        assert!(report.fidelity >= 1.0 - 1e-9);
        assert!(report.monotonicity_audit.pass);
    }

    #[test]
    fn hub_handles_entangled_inputs() {
        let bell = crate::netmodel::bell_state();
        let net = build_network(2, &ResourceMatrix::star(2), &DataInput::Joint(bell)).unwrap();
        let u = Unitary::haar_random(4, 5).unwrap();
        let report = hub_execute(&net, &u, &HubMode::Exhaustive { seed: 5 }).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-9);
        assert_eq!(report.ebits_total, 2);
    }

    #[test]
    fn hub_rejects_wrong_dimension_or_topology() {
        let net = build_network(2, &ResourceMatrix::star(2), &DataInput::Ground).unwrap();
        assert!(matches!(
            hub_execute(&net, &Unitary::identity(8), &HubMode::Sampled { seed: 0 }),
            Err(Error::GateDimension { .. })
        ));

        let mut uniform = ResourceMatrix::zeros(2);
        uniform.set_edge(0, 1, 4.0);
        let net = build_network(2, &uniform, &DataInput::Ground).unwrap();
        assert!(matches!(
            hub_execute(&net, &Unitary::identity(4), &HubMode::Sampled { seed: 0 }),
            Err(Error::NotStarTopology(2))
        ));
    }

    #[test]
    fn hub_on_a_single_lab_is_free() {
        let net = build_network(1, &ResourceMatrix::star(1), &DataInput::Ground).unwrap();
        let u = Unitary::haar_random(2, 2).unwrap();
        let report = hub_execute(&net, &u, &HubMode::Sampled { seed: 2 }).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-10);
        assert_eq!(report.ebits_total, 0);
        assert_eq!(report.cbits_total, 0);
        assert!(report.records.is_empty());
    }

    #[test]
    fn sampled_hub_runs_are_deterministic_per_seed() {
        let net = build_network(3, &ResourceMatrix::star(3), &DataInput::Ground).unwrap();
        let u = Unitary::haar_random(8, 40).unwrap();
        let a = hub_execute(&net, &u, &HubMode::Sampled { seed: 40 }).unwrap();
        let b = hub_execute(&net, &u, &HubMode::Sampled { seed: 40 }).unwrap();
        assert_eq!(a, b);
    }
}
