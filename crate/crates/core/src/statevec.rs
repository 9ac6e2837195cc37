//! Dense pure-state simulation: basis states, unitary application, measurement,
//! partial trace, entanglement entropy, and fidelity.
//!
//! Qubit ordering is little-endian throughout: qubit `k` is bit `k` of the
//! computational basis label, so qubit 0 is the least significant bit. Bit
//! strings are written qubit-0-first, i.e. `"10"` sets qubit 0 to 1 and qubit 1
//! to 0, which is basis label 1.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance for algebraic identities: norms, unitarity, hermiticity.
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// Tolerance for derived spectral quantities: entropies, mixtures.
pub const TOL_SPECTRAL: f64 = 1e-9;
/// Eigenvalues below this floor contribute nothing to an entropy.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// A little-endian bit string: bit `k` holds the value of qubit `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    /// The `len` low bits of `label`, bit `k` first.
    pub fn from_label(label: usize, len: usize) -> Self {
        Bits((0..len).map(|k| (label >> k) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, k: usize) -> bool {
        self.0[k]
    }

    /// Basis label with bit `k` weighted by `2^k`.
    pub fn label(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &b)| acc | (usize::from(b) << k))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::BadBitChar(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// How a computational-basis measurement resolves its outcome.
#[derive(Clone, Debug)]
pub enum MeasureMode {
    /// Draw the outcome from the Born distribution with a seeded generator.
    Sampled { seed: u64 },
    /// Project onto one requested outcome; fails if its probability vanishes.
    Branch { outcome: Bits },
}

/// Result of a computational-basis measurement.
#[derive(Clone, Debug)]
pub struct Measurement {
    /// Observed bits, one per measured qubit, in target order.
    pub outcome: Bits,
    /// Born probability of that outcome, exactly as computed.
    pub probability: f64,
    /// Normalized post-measurement state; measured qubits stay in the register.
    pub state: StateVector,
}

fn check_targets(num_qubits: usize, targets: &[usize]) -> Result<()> {
    let mut seen = 0u128;
    for &t in targets {
        if t >= num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: t,
                num_qubits,
            });
        }
        if seen >> t & 1 == 1 {
            return Err(Error::DuplicateTarget(t));
        }
        seen |= 1 << t;
    }
    Ok(())
}

/// Pure state of a qubit register, stored as `2^n` complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn ground(num_qubits: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[0] = Complex64::ONE;
        StateVector { num_qubits, amps }
    }

    /// Computational basis state labeled by `bits` (qubit-0-first).
    pub fn basis_state(num_qubits: usize, bits: &Bits) -> Result<Self> {
        if bits.len() != num_qubits {
            return Err(Error::BitLength {
                expected: num_qubits,
                got: bits.len(),
            });
        }
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[bits.label()] = Complex64::ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Build a state from raw amplitudes, checking length and normalization.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << num_qubits {
            return Err(Error::AmplitudeLength {
                expected: 1 << num_qubits,
                got: amps.len(),
            });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > TOL_ALGEBRAIC {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(StateVector { num_qubits, amps })
    }

    /// A Haar-random pure state, deterministic for a fixed seed.
    pub fn haar_random(num_qubits: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps = gaussian_vector(1 << num_qubits, &mut rng);
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, label: usize) -> Complex64 {
        self.amps[label]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product; `other`'s qubit `j` becomes qubit `self.num_qubits + j`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let n = self.num_qubits;
        let mut amps = vec![Complex64::ZERO; 1 << (n + other.num_qubits)];
        for (hi, &b) in other.amps.iter().enumerate() {
            if b == Complex64::ZERO {
                continue;
            }
            for (lo, &a) in self.amps.iter().enumerate() {
                amps[(hi << n) | lo] = a * b;
            }
        }
        StateVector {
            num_qubits: n + other.num_qubits,
            amps,
        }
    }

    /// Apply a `2^k`-dimensional unitary to `k` target qubits, identity on the
    /// rest. Gate qubit `i` acts on register qubit `targets[i]`.
    pub fn apply_unitary(&self, u: &Unitary, targets: &[usize]) -> Result<StateVector> {
        check_targets(self.num_qubits, targets)?;
        if u.dim() != 1 << targets.len() {
            return Err(Error::GateDimension {
                dim: u.dim(),
                targets: targets.len(),
            });
        }
        let subdim = u.dim();
        // Sub-index bit i lives at register bit targets[i].
        let offsets: Vec<usize> = (0..subdim)
            .map(|s| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| s >> i & 1 == 1)
                    .fold(0, |acc, (_, &t)| acc | (1 << t))
            })
            .collect();
        let rest: Vec<usize> = (0..self.num_qubits)
            .filter(|p| !targets.contains(p))
            .collect();

        let mut amps = vec![Complex64::ZERO; self.amps.len()];
        let mut gathered = vec![Complex64::ZERO; subdim];
        for env in 0..1usize << rest.len() {
            let base = rest
                .iter()
                .enumerate()
                .filter(|(i, _)| env >> i & 1 == 1)
                .fold(0, |acc, (_, &p)| acc | (1 << p));
            for (s, g) in gathered.iter_mut().enumerate() {
                *g = self.amps[base | offsets[s]];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for (s, &g) in gathered.iter().enumerate() {
                    acc += u.entry(r, s) * g;
                }
                amps[base | off] = acc;
            }
        }
        let out = StateVector {
            num_qubits: self.num_qubits,
            amps,
        };
        debug_assert!((out.norm_sqr() - 1.0).abs() < TOL_ALGEBRAIC);
        Ok(out)
    }

    /// Born probabilities of all `2^k` outcomes for the given targets, indexed
    /// by the outcome label (target `i` as bit `i`).
    pub fn branch_probabilities(&self, targets: &[usize]) -> Result<Vec<f64>> {
        check_targets(self.num_qubits, targets)?;
        let mut probs = vec![0.0; 1 << targets.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let outcome = targets
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &t)| acc | (((idx >> t) & 1) << i));
            probs[outcome] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Measure the target qubits in the computational basis.
    pub fn measure(&self, targets: &[usize], mode: &MeasureMode) -> Result<Measurement> {
        let probs = self.branch_probabilities(targets)?;
        let outcome = match mode {
            MeasureMode::Sampled { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let draw: f64 = rng.random();
                let mut acc = 0.0;
                let mut picked = None;
                let mut likeliest = 0;
                for (o, &p) in probs.iter().enumerate() {
                    if p > probs[likeliest] {
                        likeliest = o;
                    }
                    acc += p;
                    if picked.is_none() && draw < acc {
                        picked = Some(o);
                    }
                }
                // Rounding can leave the cumulative sum a hair under the draw.
                picked.unwrap_or(likeliest)
            }
            MeasureMode::Branch { outcome } => {
                if outcome.len() != targets.len() {
                    return Err(Error::OutcomeLength {
                        expected: targets.len(),
                        got: outcome.len(),
                    });
                }
                outcome.label()
            }
        };
        let probability = probs[outcome];
        if probability <= EIGENVALUE_FLOOR {
            return Err(Error::ImpossibleBranch(probability));
        }
        let scale = probability.sqrt().recip();
        let mut amps = self.amps.clone();
        for (idx, a) in amps.iter_mut().enumerate() {
            let o = targets
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &t)| acc | (((idx >> t) & 1) << i));
            if o == outcome {
                *a *= scale;
            } else {
                *a = Complex64::ZERO;
            }
        }
        Ok(Measurement {
            outcome: Bits::from_label(outcome, targets.len()),
            probability,
            state: StateVector {
                num_qubits: self.num_qubits,
                amps,
            },
        })
    }

    /// Remove qubits that sit in a computational product state with the rest.
    ///
    /// Remaining qubits are re-indexed downward. Fails with
    /// [`Error::CorrelatedQubit`] if a target is still entangled with, or in
    /// superposition relative to, the rest of the register.
    pub fn discard_qubits(&self, targets: &[usize]) -> Result<StateVector> {
        check_targets(self.num_qubits, targets)?;
        let mut fixed = 0usize;
        let mut mask = 0usize;
        for &t in targets {
            let rho = self.reduced_density(&[t])?;
            let p1 = rho.entry(1, 1).re;
            let off = rho.entry(0, 1).norm();
            let purity = rho.purity();
            if off > TOL_ALGEBRAIC || (purity - 1.0).abs() > TOL_ALGEBRAIC {
                return Err(Error::CorrelatedQubit(t));
            }
            mask |= 1 << t;
            if p1 > 0.5 {
                fixed |= 1 << t;
            }
        }
        let kept: Vec<usize> = (0..self.num_qubits).filter(|p| mask >> p & 1 == 0).collect();
        let mut amps = vec![Complex64::ZERO; 1 << kept.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let old_idx = kept
                .iter()
                .enumerate()
                .filter(|(i, _)| new_idx >> i & 1 == 1)
                .fold(fixed, |acc, (_, &p)| acc | (1 << p));
            *slot = self.amps[old_idx];
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(StateVector {
            num_qubits: kept.len(),
            amps,
        })
    }

    /// Partial trace over the complement of `keep`. Qubit `keep[i]` becomes
    /// qubit `i` of the reduced state.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_targets(self.num_qubits, keep)?;
        let k = keep.len();
        let dim = 1usize << k;
        let offsets: Vec<usize> = (0..dim)
            .map(|s| {
                keep.iter()
                    .enumerate()
                    .filter(|(i, _)| s >> i & 1 == 1)
                    .fold(0, |acc, (_, &t)| acc | (1 << t))
            })
            .collect();
        let rest: Vec<usize> = (0..self.num_qubits).filter(|p| !keep.contains(p)).collect();
        let mut entries = vec![Complex64::ZERO; dim * dim];
        let mut gathered = vec![Complex64::ZERO; dim];
        for env in 0..1usize << rest.len() {
            let base = rest
                .iter()
                .enumerate()
                .filter(|(i, _)| env >> i & 1 == 1)
                .fold(0, |acc, (_, &p)| acc | (1 << p));
            for (s, g) in gathered.iter_mut().enumerate() {
                *g = self.amps[base | offsets[s]];
            }
            for r in 0..dim {
                for c in 0..dim {
                    entries[r * dim + c] += gathered[r] * gathered[c].conj();
                }
            }
        }
        Ok(DensityMatrix { dim, entries })
    }

    /// Base-2 von Neumann entropy of the reduced state on `cut`, in ebits.
    ///
    /// For a pure global state this equals the entropy of the complement, so
    /// the spectrum is always taken on the smaller side.
    pub fn entanglement_entropy(&self, cut: &[usize]) -> Result<f64> {
        check_targets(self.num_qubits, cut)?;
        let side: Vec<usize> = if cut.len() * 2 <= self.num_qubits {
            cut.to_vec()
        } else {
            (0..self.num_qubits).filter(|p| !cut.contains(p)).collect()
        };
        if side.is_empty() {
            return Ok(0.0);
        }
        let rho = self.reduced_density(&side)?;
        Ok(entropy_from_eigenvalues(&rho.eigenvalues()))
    }

    /// `|<self|other>|`, the overlap magnitude; 1 means equal up to global phase.
    pub fn fidelity_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::QubitCountMismatch(self.num_qubits, other.num_qubits));
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm())
    }

    /// Relabel qubits so that new qubit `k` is old qubit `perm[k]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<StateVector> {
        if perm.len() != self.num_qubits {
            return Err(Error::BadPermutation);
        }
        check_targets(self.num_qubits, perm).map_err(|_| Error::BadPermutation)?;
        let mut amps = vec![Complex64::ZERO; self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let old_idx = perm
                .iter()
                .enumerate()
                .filter(|(k, _)| new_idx >> k & 1 == 1)
                .fold(0, |acc, (_, &p)| acc | (1 << p));
            *slot = self.amps[old_idx];
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps,
        })
    }
}

/// Entropy in bits of a clipped eigenvalue spectrum; never negative.
pub(crate) fn entropy_from_eigenvalues(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

fn gaussian_vector(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// A unitary matrix on a power-of-two dimension, validated at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Unitary {
    /// Validate and wrap a row-major matrix; `U†U = 1` within `1e-10`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::AmplitudeLength {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let u = Unitary { dim, entries };
        let residual = u.unitarity_residual();
        if residual > TOL_ALGEBRAIC {
            return Err(Error::NotUnitary(residual));
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            entries[r * dim + r] = Complex64::ONE;
        }
        Unitary { dim, entries }
    }

    /// Permutation matrix sending basis label `l` to `map(l)`.
    pub(crate) fn permutation(dim: usize, map: impl Fn(usize) -> usize) -> Self {
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for l in 0..dim {
            entries[map(l) * dim + l] = Complex64::ONE;
        }
        Unitary { dim, entries }
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Unitary {
            dim: 2,
            entries: vec![
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        }
    }

    pub fn pauli_x() -> Self {
        Unitary::permutation(2, |l| l ^ 1)
    }

    pub fn pauli_z() -> Self {
        Unitary {
            dim: 2,
            entries: vec![
                Complex64::ONE,
                Complex64::ZERO,
                Complex64::ZERO,
                -Complex64::ONE,
            ],
        }
    }

    /// CNOT with gate qubit 0 as control and gate qubit 1 as target.
    pub fn cnot() -> Self {
        Unitary::permutation(4, |l| if l & 1 == 1 { l ^ 2 } else { l })
    }

    /// A Haar-distributed random unitary, deterministic for a fixed seed.
    ///
    /// Orthonormalizes a seeded complex-Gaussian matrix column by column; the
    /// positive-diagonal convention of Gram-Schmidt fixes the phases that make
    /// the result Haar-distributed.
    pub fn haar_random(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = gaussian_vector(dim * dim, &mut rng);
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|c| (0..dim).map(|r| raw[r * dim + c]).collect())
            .collect();
        for j in 0..dim {
            // Two passes keep the basis orthogonal to machine precision.
            for _ in 0..2 {
                let (done, rest) = cols.split_at_mut(j);
                let col_j = &mut rest[0];
                for col_i in done.iter() {
                    let proj: Complex64 = col_i
                        .iter()
                        .zip(col_j.iter())
                        .map(|(q, a)| q.conj() * a)
                        .sum();
                    for (a, q) in col_j.iter_mut().zip(col_i) {
                        *a -= proj * q;
                    }
                }
            }
            let norm: f64 = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut cols[j] {
                *a /= norm;
            }
        }
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] = cols[c][r];
            }
        }
        Ok(Unitary { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Unitary {
        let dim = self.dim;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[c * dim + r] = self.entry(r, c).conj();
            }
        }
        Unitary { dim, entries }
    }

    pub fn matmul(&self, other: &Unitary) -> Result<Unitary> {
        if self.dim != other.dim {
            return Err(Error::GateDimension {
                dim: other.dim,
                targets: self.dim.trailing_zeros() as usize,
            });
        }
        let dim = self.dim;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::ZERO;
                for k in 0..dim {
                    acc += self.entry(r, k) * other.entry(k, c);
                }
                entries[r * dim + c] = acc;
            }
        }
        Ok(Unitary { dim, entries })
    }

    /// Max-norm of `U†U - 1`.
    pub fn unitarity_residual(&self) -> f64 {
        let dim = self.dim;
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::ZERO;
                for k in 0..dim {
                    acc += self.entry(k, r).conj() * self.entry(k, c);
                }
                let expect = if r == c { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }
}

/// A density matrix, produced here only by partial traces of pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|r| self.entry(r, r)).sum()
    }

    /// `tr(rho^2)`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc += (self.entry(r, c) * self.entry(c, r)).re;
            }
        }
        acc
    }

    /// Real eigenvalue spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim, &self.entries)
    }

    /// Check the density-matrix invariants: Hermitian and unit trace within
    /// `1e-10`, eigenvalues above `-1e-10`.
    pub fn validate(&self) -> Result<()> {
        let mut herm = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                herm = herm.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        if herm > TOL_ALGEBRAIC {
            return Err(Error::NotHermitian(herm));
        }
        let tr = self.trace();
        if (tr - Complex64::ONE).norm() > TOL_ALGEBRAIC {
            return Err(Error::BadTrace(tr.re));
        }
        if let Some(&low) = self
            .eigenvalues()
            .iter()
            .find(|&&l| l < -TOL_ALGEBRAIC)
        {
            return Err(Error::NegativeEigenvalue(low));
        }
        Ok(())
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The matrices diagonalized here are reduced density operators of at most a
/// few dozen rows, where Jacobi converges in a handful of sweeps and keeps the
/// spectrum accurate to machine precision.
pub(crate) fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(entries.len(), dim * dim);
    if dim == 1 {
        return vec![entries[0].re];
    }
    let mut a = entries.to_vec();
    let at = |m: &[Complex64], r: usize, c: usize| m[r * dim + c];
    let scale: f64 = entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    let threshold = (scale * 1e-15).max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = at(&a, p, q);
                let g = apq.norm();
                if g <= threshold {
                    continue;
                }
                rotated = true;
                let phase = apq / g;
                let app = at(&a, p, p).re;
                let aqq = at(&a, q, q).re;
                // Rotation angle zeroing the (p,q) element.
                let t = if app == aqq {
                    1.0
                } else {
                    let tau = (app - aqq) / (2.0 * g);
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = at(&a, p, k);
                    let akq = at(&a, q, k);
                    a[p * dim + k] = c * akp + s * phase * akq;
                    a[q * dim + k] = -s * phase.conj() * akp + c * akq;
                }
                for k in 0..dim {
                    a[k * dim + p] = at(&a, p, k).conj();
                    a[k * dim + q] = at(&a, q, k).conj();
                }
                let new_pp = c * c * app + 2.0 * c * s * g + s * s * aqq;
                let new_qq = s * s * app - 2.0 * c * s * g + c * c * aqq;
                a[p * dim + p] = Complex64::new(new_pp, 0.0);
                a[q * dim + q] = Complex64::new(new_qq, 0.0);
                a[p * dim + q] = Complex64::ZERO;
                a[q * dim + p] = Complex64::ZERO;
            }
        }
        if !rotated {
            break;
        }
    }
    let mut eigs: Vec<f64> = (0..dim).map(|r| at(&a, r, r).re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eigs
}
