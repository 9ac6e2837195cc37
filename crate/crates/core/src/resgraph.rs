//! Weighted graphs of the entanglement shared between labs: totals, the
//! star topology, permutation symmetrization, cut weights, and the even-N
//! lower-bound check.
//!
//! Vertices are indexed 0-based here; the network layer maps lab `j` to
//! vertex `j - 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::entops::CutSpec;
use crate::error::{Error, Result};

/// Symmetric nonnegative matrix of ebits shared between pairs of labs.
///
/// Serializes as a plain 2D array of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ResourceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl ResourceMatrix {
    pub fn zeros(n: usize) -> Self {
        ResourceMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Validate a square, symmetric, nonnegative matrix with a zero diagonal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MatrixShape {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::BadWeight { i, j, value: w });
                }
                entries[i * n + j] = w;
            }
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(ResourceMatrix { n, entries })
    }

    /// Star topology: weight 2 on every edge from vertex 0, zero elsewhere.
    pub fn star(n: usize) -> Self {
        let mut m = ResourceMatrix::zeros(n);
        for j in 1..n {
            m.set_edge(0, j, 2.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Set both `(i,j)` and `(j,i)`; panics on diagonal or out-of-range use.
    pub fn set_edge(&mut self, i: usize, j: usize, w: f64) {
        assert!(i != j && i < self.n && j < self.n, "invalid edge ({i},{j})");
        assert!(w.is_finite() && w >= 0.0, "invalid weight {w}");
        self.entries[i * self.n + j] = w;
        self.entries[j * self.n + i] = w;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Total entanglement: half the sum of all entries, so each edge counts once.
    pub fn total(&self) -> f64 {
        self.entries.iter().sum::<f64>() / 2.0
    }

    /// Sum the matrix over all vertex permutations, by the closed form: the
    /// result is complete and regular with every off-diagonal entry equal to
    /// `2 (n-2)! total`.
    pub fn symmetrized(&self) -> ResourceMatrix {
        let n = self.n;
        if n < 2 {
            return ResourceMatrix::zeros(n);
        }
        let weight = 2.0 * factorial_f64(n - 2) * self.total();
        let mut out = ResourceMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                out.set_edge(i, j, weight);
            }
        }
        out
    }

    /// Sum the matrix over all vertex permutations by explicit enumeration of
    /// all `n!` terms. This is the ground-truth path the closed form is
    /// checked against; it refuses more than 10 vertices.
    pub fn symmetrized_enumerated(&self) -> Result<ResourceMatrix> {
        let n = self.n;
        if n > 10 {
            return Err(Error::TooManyVertices(n));
        }
        let mut out = ResourceMatrix::zeros(n);
        let mut perm: Vec<usize> = (0..n).collect();
        for_each_permutation(&mut perm, &mut |p| {
            for i in 0..n {
                for j in 0..n {
                    out.entries[i * n + j] += self.weight(p[i], p[j]);
                }
            }
        });
        Ok(out)
    }

    /// The common edge weight of a regular complete matrix, within `1e-9`.
    pub fn uniform_edge_weight(&self) -> Result<f64> {
        let n = self.n;
        if n < 2 {
            return Ok(0.0);
        }
        let reference = self.weight(0, 1);
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weight(i, j);
                if (w - reference).abs() > 1e-9 {
                    return Err(Error::NonUniformWeights(reference, w));
                }
            }
        }
        Ok(reference)
    }

    /// Total weight of edges crossing the cut.
    pub fn cut_weight(&self, cut: &CutSpec) -> Result<f64> {
        cut.validate_for(self.n)?;
        let mut total = 0.0;
        for a in cut.side_a() {
            for b in cut.side_b() {
                total += self.weight(a.index() - 1, b.index() - 1);
            }
        }
        Ok(total)
    }

    /// Render the weighted graph in DOT format; zero-weight edges are omitted.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph resources {\n");
        for i in 0..self.n {
            out.push_str(&format!("    A{};\n", i + 1));
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let w = self.weight(i, j);
                if w > 0.0 {
                    out.push_str(&format!(
                        "    A{} -- A{} [label=\"{}\"];\n",
                        i + 1,
                        j + 1,
                        format_weight(w)
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

impl TryFrom<Vec<Vec<f64>>> for ResourceMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        ResourceMatrix::from_rows(rows)
    }
}

impl From<ResourceMatrix> for Vec<Vec<f64>> {
    fn from(m: ResourceMatrix) -> Self {
        m.rows()
    }
}

fn format_weight(w: f64) -> String {
    if (w - w.round()).abs() < 1e-9 && w.abs() < 9e15 {
        format!("{}", w.round() as i64)
    } else {
        format!("{w}")
    }
}

/// Visit every permutation of `items` exactly once (Heap's algorithm).
fn for_each_permutation<T>(items: &mut [T], visit: &mut impl FnMut(&[T])) {
    fn go<T>(k: usize, items: &mut [T], visit: &mut impl FnMut(&[T])) {
        if k <= 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            go(k - 1, items, visit);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    go(items.len(), items, visit);
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Exact arithmetic behind a [`BoundReport`].
///
/// Starting from a total entanglement `E`, a network whose resources are
/// spread uniformly by symmetrization carries edge weight `2 (N-2)! E`, so the
/// even/odd partition is crossed by `(N/2)^2` such edges. Executing the
/// pairwise swap once per vertex permutation can establish `N! N` ebits across
/// that partition, and entanglement cannot grow under local operations and
/// classical messages, which forces the crossing weight to cover `N! N`. That
/// inequality is equivalent to `E >= 2(N-1)`.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub n: usize,
    /// Uniform edge weight after symmetrization, `2 (N-2)! E`.
    pub edge_weight: BigRational,
    /// Weight crossing the even/odd partition, `(N/2)^2` times the edge weight.
    pub cut_weight: BigRational,
    /// Ebits the repeated pairwise swap must create, `N! N`.
    pub required: BigInt,
    /// The total entanglement the inequality demands, `2(N-1)`.
    pub implied_lower_bound: BigInt,
    pub satisfied: bool,
}

impl BoundCheck {
    /// Floating-point view used for serialization.
    pub fn report(&self) -> BoundReport {
        BoundReport {
            n: self.n,
            edge_weight: rational_to_f64(&self.edge_weight),
            cut_weight: rational_to_f64(&self.cut_weight),
            required: self.required.to_f64().unwrap_or(f64::INFINITY),
            implied_lower_bound: self.implied_lower_bound.to_f64().unwrap_or(f64::INFINITY),
            satisfied: self.satisfied,
        }
    }
}

/// Outcome of the even-N lower-bound check, in ebits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub edge_weight: f64,
    pub cut_weight: f64,
    pub required: f64,
    pub implied_lower_bound: f64,
    pub satisfied: bool,
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Check whether total entanglement `total_ebits` passes the even-N cut
/// argument. All arithmetic is exact: the input is converted to a rational,
/// and `satisfied` compares `cut_weight >= required - 1e-9` without rounding,
/// which holds exactly when `total_ebits >= 2(N-1) - epsilon`.
///
/// Odd `n` is not supported; this check is specific to the even/odd partition.
pub fn verify_even_bound(n: usize, total_ebits: f64) -> Result<BoundCheck> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::OddLabCount(n));
    }
    if !total_ebits.is_finite() {
        return Err(Error::NotFinite(total_ebits));
    }
    let total = BigRational::from_float(total_ebits).ok_or(Error::NotFinite(total_ebits))?;
    if total.is_negative() {
        return Err(Error::BadWeight {
            i: 0,
            j: 0,
            value: total_ebits,
        });
    }
    let edge_weight = BigRational::from_integer(2 * factorial(n - 2)) * &total;
    let half = BigInt::from(n / 2);
    let cut_weight = BigRational::from_integer(&half * &half) * &edge_weight;
    let required = factorial(n) * BigInt::from(n);
    let slack = BigRational::from_float(1e-9).expect("finite slack");
    let satisfied = cut_weight >= BigRational::from_integer(required.clone()) - slack;
    Ok(BoundCheck {
        n,
        edge_weight,
        cut_weight,
        required,
        implied_lower_bound: BigInt::from(2 * (n - 1)),
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::LabId;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labs(ids: &[usize]) -> Vec<LabId> {
        ids.iter().map(|&i| LabId::new(i).unwrap()).collect()
    }

    fn random_matrix(n: usize, seed: u64) -> ResourceMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ResourceMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set_edge(i, j, rng.random_range(0.0..5.0));
            }
        }
        m
    }

    #[test]
    fn total_of_zero_matrix_is_zero() {
        assert_eq!(ResourceMatrix::zeros(5).total(), 0.0);
    }

    #[test]
    fn total_of_star_matches_twice_spokes() {
        assert_eq!(ResourceMatrix::star(4).total(), 6.0);
    }

    #[test]
    fn total_counts_each_edge_once() {
        let mut m = ResourceMatrix::zeros(3);
        m.set_edge(0, 2, 1.75);
        assert_eq!(m.total(), 1.75);
    }

    #[test]
    fn star_matrix_small_cases() {
        assert_eq!(ResourceMatrix::star(2).rows(), vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
        assert_eq!(ResourceMatrix::star(1).rows(), vec![vec![0.0]]);
        let star4 = ResourceMatrix::star(4);
        for j in 1..4 {
            assert_eq!(star4.weight(0, j), 2.0);
        }
        assert_eq!(star4.weight(1, 2), 0.0);
    }

    #[test]
    fn from_rows_rejects_invalid_matrices() {
        assert!(matches!(
            ResourceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::NotSymmetric { i: 0, j: 1 })
        ));
        assert!(matches!(
            ResourceMatrix::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            ResourceMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]]),
            Err(Error::NonzeroDiagonal(0))
        ));
        assert!(matches!(
            ResourceMatrix::from_rows(vec![vec![0.0, 1.0]]),
            Err(Error::MatrixShape { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn symmetrized_star_is_complete_with_enumerated_weight() {
        let star = ResourceMatrix::star(4);
        let enumerated = star.symmetrized_enumerated().unwrap();
        let closed = star.symmetrized();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.0 } else { 24.0 };
                assert!((enumerated.weight(i, j) - expect).abs() < 1e-9);
                assert!((closed.weight(i, j) - expect).abs() < 1e-9);
            }
        }
        // 4! times the original 6 ebits.
        assert!((enumerated.total() - 144.0).abs() < 1e-9);
    }

    #[test]
    fn symmetrizing_a_uniform_complete_graph_scales_it() {
        let mut m = ResourceMatrix::zeros(4);
        for i in 0..4 {
            for j in (i + 1)..4 {
                m.set_edge(i, j, 1.5);
            }
        }
        let sym = m.symmetrized_enumerated().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = 24.0 * m.weight(i, j);
                assert!((sym.weight(i, j) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn enumeration_refuses_large_vertex_sets() {
        assert!(matches!(
            ResourceMatrix::zeros(11).symmetrized_enumerated(),
            Err(Error::TooManyVertices(11))
        ));
    }

    #[test]
    fn uniform_edge_weight_of_symmetrized_stars() {
        let sym4 = ResourceMatrix::star(4).symmetrized();
        assert!((sym4.uniform_edge_weight().unwrap() - 24.0).abs() < 1e-9);

        // 720-term enumeration agrees with 2 * 4! * 10 = 480.
        let sym6 = ResourceMatrix::star(6).symmetrized_enumerated().unwrap();
        assert!((sym6.uniform_edge_weight().unwrap() - 480.0).abs() < 1e-9);

        let mut uniform = ResourceMatrix::zeros(3);
        uniform.set_edge(0, 1, 7.0);
        uniform.set_edge(0, 2, 7.0);
        uniform.set_edge(1, 2, 7.0);
        assert_eq!(uniform.uniform_edge_weight().unwrap(), 7.0);

        assert!(matches!(
            ResourceMatrix::star(3).uniform_edge_weight(),
            Err(Error::NonUniformWeights(_, _))
        ));
    }

    #[test]
    fn cut_weight_examples() {
        let sym4 = ResourceMatrix::star(4).symmetrized();
        let even_odd = CutSpec::new(labs(&[1, 3]), labs(&[2, 4])).unwrap();
        assert!((sym4.cut_weight(&even_odd).unwrap() - 96.0).abs() < 1e-9);

        let star4 = ResourceMatrix::star(4);
        let hub_vs_rest = CutSpec::new(labs(&[1]), labs(&[2, 3, 4])).unwrap();
        assert!((star4.cut_weight(&hub_vs_rest).unwrap() - 6.0).abs() < 1e-12);

        let empty_side = CutSpec::new(labs(&[]), labs(&[1, 2, 3, 4])).unwrap();
        assert_eq!(star4.cut_weight(&empty_side).unwrap(), 0.0);

        let incomplete = CutSpec::new(labs(&[1]), labs(&[2])).unwrap();
        assert!(matches!(
            star4.cut_weight(&incomplete),
            Err(Error::IncompleteCut(_))
        ));
    }

    #[test]
    fn even_bound_is_tight_at_the_protocol_cost() {
        let check = verify_even_bound(4, 6.0).unwrap();
        assert!(check.satisfied);
        // Equality, in exact integer arithmetic.
        assert_eq!(check.cut_weight, BigRational::from_integer(96.into()));
        assert_eq!(check.required, BigInt::from(96));
        assert_eq!(check.implied_lower_bound, BigInt::from(6));

        let report = check.report();
        assert_eq!(report.cut_weight, 96.0);
        assert_eq!(report.required, 96.0);
        assert!(report.satisfied);
    }

    #[test]
    fn even_bound_fails_just_below_the_cost() {
        let check = verify_even_bound(4, 5.99).unwrap();
        assert!(!check.satisfied);
        let cut = check.report().cut_weight;
        assert!((cut - 95.84).abs() < 1e-9);
    }

    #[test]
    fn even_bound_two_labs_at_equality() {
        let check = verify_even_bound(2, 2.0).unwrap();
        assert_eq!(check.edge_weight, BigRational::from_integer(4.into()));
        assert_eq!(check.cut_weight, BigRational::from_integer(4.into()));
        assert_eq!(check.required, BigInt::from(4));
        assert!(check.satisfied);
    }

    #[test]
    fn even_bound_rejects_odd_or_bad_input() {
        assert!(matches!(verify_even_bound(3, 4.0), Err(Error::OddLabCount(3))));
        assert!(matches!(
            verify_even_bound(4, f64::NAN),
            Err(Error::NotFinite(_))
        ));
        assert!(matches!(
            verify_even_bound(4, -1.0),
            Err(Error::BadWeight { .. })
        ));
    }

    #[test]
    fn symmetrization_is_permutation_covariant() {
        // Relabeling the vertices before symmetrizing changes nothing.
        for n in 2..=5usize {
            let m = random_matrix(n, 77 + n as u64);
            let reference = m.symmetrized_enumerated().unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            for_each_permutation(&mut perm, &mut |p| {
                let mut relabeled = ResourceMatrix::zeros(n);
                for i in 0..n {
                    for j in (i + 1)..n {
                        relabeled.set_edge(i, j, m.weight(p[i], p[j]));
                    }
                }
                let sym = relabeled.symmetrized_enumerated().unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert!((sym.weight(i, j) - reference.weight(i, j)).abs() < 1e-9);
                    }
                }
            });
        }
    }

    #[test]
    fn dot_export_examples() {
        let dot = ResourceMatrix::star(3).to_dot();
        assert_eq!(dot.matches("--").count(), 2);
        assert_eq!(dot.matches("label=\"2\"").count(), 2);
        assert!(dot.contains("A1;"));

        assert_eq!(ResourceMatrix::zeros(3).to_dot().matches("--").count(), 0);

        let sym = ResourceMatrix::star(4).symmetrized();
        let dot = sym.to_dot();
        assert_eq!(dot.matches("--").count(), 6);
        assert_eq!(dot.matches("label=\"24\"").count(), 6);
    }

    #[test]
    fn matrix_serde_rejects_invalid_json() {
        let good: ResourceMatrix = serde_json::from_str("[[0.0,2.0],[2.0,0.0]]").unwrap();
        assert_eq!(good, ResourceMatrix::star(2));
        assert!(serde_json::from_str::<ResourceMatrix>("[[0.0,2.0],[1.0,0.0]]").is_err());
        let text = serde_json::to_string(&good).unwrap();
        assert_eq!(text, "[[0.0,2.0],[2.0,0.0]]");
    }

    proptest! {
        #[test]
        fn closed_form_matches_enumeration(n in 3usize..=6, seed in any::<u64>()) {
            let m = random_matrix(n, seed);
            let closed = m.symmetrized();
            let enumerated = m.symmetrized_enumerated().unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((closed.weight(i, j) - enumerated.weight(i, j)).abs() < 1e-9);
                }
            }
            let expect_total = factorial_f64(n) * m.total();
            prop_assert!((enumerated.total() - expect_total).abs() <= 1e-6 * expect_total.max(1.0));
        }

        #[test]
        fn bound_holds_exactly_at_cost_for_even_n(k in 1usize..=10) {
            let n = 2 * k;
            let at_cost = verify_even_bound(n, 2.0 * (n as f64 - 1.0)).unwrap();
            prop_assert!(at_cost.satisfied);
            prop_assert_eq!(
                at_cost.cut_weight,
                BigRational::from_integer(at_cost.required.clone())
            );
        }
    }
}
