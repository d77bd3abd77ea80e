//! Counting sequences of a given Markov type.
//!
//! A Markov graph records, for a finite alphabet, how often each transition
//! `u -> v` occurs in a sequence, plus its first (source) and last (sink)
//! symbols. Sequences with that summary are the Eulerian paths from source to
//! sink once parallel darts are identified. The general count goes through the
//! BEST theorem with a matrix-tree cofactor evaluated in exact integer
//! arithmetic; the binary alphabet has a closed form.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::types::MarkovType;

/// Transition counts `N_{u,v}` over an alphabet `{0, .., m-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkovGraph {
    alphabet_size: usize,
    counts: Vec<Vec<u64>>,
    source: usize,
    sink: usize,
}

impl MarkovGraph {
    pub fn new(counts: Vec<Vec<u64>>, source: usize, sink: usize) -> Result<Self> {
        let m = counts.len();
        if m == 0 {
            return Err(Error::MalformedGraph("empty alphabet".into()));
        }
        if let Some(row) = counts.iter().position(|r| r.len() != m) {
            return Err(Error::MalformedGraph(format!(
                "row {row} has length {}, expected {m}",
                counts[row].len()
            )));
        }
        if source >= m || sink >= m {
            return Err(Error::MalformedGraph(format!(
                "source {source} / sink {sink} outside alphabet of size {m}"
            )));
        }
        Ok(MarkovGraph {
            alphabet_size: m,
            counts,
            source,
            sink,
        })
    }

    /// The graph of a sequence over `{0, .., m-1}`. Panics on out-of-range
    /// symbols or an empty sequence.
    pub fn from_symbols(symbols: &[usize], m: usize) -> Self {
        assert!(!symbols.is_empty(), "empty sequence");
        let mut counts = vec![vec![0u64; m]; m];
        for w in symbols.windows(2) {
            counts[w[0]][w[1]] += 1;
        }
        MarkovGraph::new(counts, symbols[0], symbols[symbols.len() - 1])
            .expect("symbols within alphabet")
    }

    pub fn from_markov_type(mt: &MarkovType) -> Self {
        let counts = vec![vec![mt.n00, mt.n01], vec![mt.n10, mt.n11]];
        MarkovGraph::new(counts, mt.first as usize, mt.last as usize).expect("binary graph")
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn count(&self, u: usize, v: usize) -> u64 {
        self.counts[u][v]
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn out_degree(&self, v: usize) -> u64 {
        self.counts[v].iter().sum()
    }

    pub fn in_degree(&self, v: usize) -> u64 {
        self.counts.iter().map(|row| row[v]).sum()
    }

    /// `out(v) - in(v) = [v = source] - [v = sink]` for every vertex.
    pub fn is_balanced(&self) -> bool {
        (0..self.alphabet_size).all(|v| {
            let expected = i128::from(v == self.source) - i128::from(v == self.sink);
            self.out_degree(v) as i128 - self.in_degree(v) as i128 == expected
        })
    }

    /// Vertices touched by a dart, plus the endpoints; source first.
    fn vertices(&self) -> Vec<usize> {
        let mut vs = vec![self.source];
        vs.extend((0..self.alphabet_size).filter(|&v| {
            v != self.source && (v == self.sink || self.out_degree(v) > 0 || self.in_degree(v) > 0)
        }));
        vs
    }
}

/// Determinant of a square integer matrix by Bareiss fraction-free elimination.
pub(crate) fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Number of spanning out-trees rooted at the source.
///
/// Builds the matrix with `a_ij = -N_{v_i, v_j}` over the graph's vertices
/// (source first), fixes the diagonal so that every column sums to zero, and
/// returns the cofactor of `a_11`. A disconnected graph gives 0.
pub fn spanning_out_trees(g: &MarkovGraph) -> BigUint {
    let vs = g.vertices();
    let n = vs.len();
    let mut a = vec![vec![BigInt::zero(); n]; n];
    for (i, &u) in vs.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            if i != j {
                a[i][j] = -BigInt::from(g.count(u, v));
            }
        }
    }
    let column_sums: Vec<BigInt> = (0..n)
        .map(|j| (0..n).filter(|&i| i != j).map(|i| a[i][j].clone()).sum())
        .collect();
    for (j, column) in column_sums.into_iter().enumerate() {
        a[j][j] = -column;
    }
    let minor: Vec<Vec<BigInt>> = a[1..].iter().map(|row| row[1..].to_vec()).collect();
    let det = bareiss_determinant(minor);
    debug_assert!(!det.is_negative());
    det.to_biguint().unwrap_or_default()
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of Eulerian paths from source to sink with parallel darts identified,
/// i.e. the number of sequences sharing this Markov graph.
///
/// Evaluated by adding one closing dart `sink -> source` (a loop when they
/// coincide): Eulerian circuits of the augmented graph number
/// `T * prod_v (out'(v) - 1)!`, each cut open at the extra dart, and the
/// result is divided by `prod N_{u,v}!`. When `out(sink) >= 1` this is the
/// usual `T * out(sink) * prod (out(v)-1)! / prod N_{u,v}!`. Unbalanced
/// graphs count 0.
pub fn eulerian_path_count(g: &MarkovGraph) -> BigUint {
    if !g.is_balanced() {
        return BigUint::zero();
    }
    let trees = spanning_out_trees(g);
    if trees.is_zero() {
        return trees;
    }
    let mut numerator = trees;
    for v in 0..g.alphabet_size() {
        let out = g.out_degree(v) + u64::from(v == g.sink());
        if out > 0 {
            numerator *= factorial(out - 1);
        }
    }
    let mut denominator = BigUint::one();
    for u in 0..g.alphabet_size() {
        for v in 0..g.alphabet_size() {
            denominator *= factorial(g.count(u, v));
        }
    }
    let (q, r) = numerator.div_rem(&denominator);
    debug_assert!(r.is_zero(), "BEST count must be integral");
    q
}

/// Closed-form count of binary sequences with Markov type `mt`:
/// `N_{F,1-F} (N0-1)! (N1-1)! / (N00! N01! N10! N11!)` when both symbols
/// occur, 1 for constant sequences, and 0 for unrealizable sextuples.
pub fn binary_type_count(mt: &MarkovType) -> BigUint {
    if mt.validate().is_err() {
        return BigUint::zero();
    }
    let exch = mt.exch();
    if !exch.is_mixed() {
        return BigUint::one();
    }
    let numerator =
        BigUint::from(mt.first_switch()) * factorial(exch.n0 - 1) * factorial(exch.n1 - 1);
    let denominator = factorial(mt.n00) * factorial(mt.n01) * factorial(mt.n10) * factorial(mt.n11);
    numerator / denominator
}

/// `ln` of [`binary_type_count`] via log-factorials, for large horizons.
pub fn log_binary_type_count(mt: &MarkovType) -> f64 {
    use crate::numerics::log_factorial as lf;
    let exch = mt.exch();
    if !exch.is_mixed() {
        return 0.0;
    }
    (mt.first_switch() as f64).ln() + lf(exch.n0 - 1) + lf(exch.n1 - 1)
        - lf(mt.n00)
        - lf(mt.n01)
        - lf(mt.n10)
        - lf(mt.n11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{markov_type, BinarySequence};
    use num_traits::ToPrimitive;
    use std::collections::HashMap;

    fn biguint_to_f64(x: &BigUint) -> f64 {
        x.to_f64().unwrap()
    }

    fn graph(counts: &[&[u64]], source: usize, sink: usize) -> MarkovGraph {
        MarkovGraph::new(counts.iter().map(|r| r.to_vec()).collect(), source, sink).unwrap()
    }

    /// Brute-force out-tree count: every non-root vertex picks a parent among
    /// its in-neighbours, weighted by the dart multiplicity; keep the choices
    /// where every vertex reaches the root.
    fn brute_out_trees(g: &MarkovGraph) -> u64 {
        let vs = g.vertices();
        let others: Vec<usize> = vs[1..].to_vec();
        let choices: Vec<Vec<usize>> = others
            .iter()
            .map(|&v| {
                vs.iter()
                    .copied()
                    .filter(|&u| u != v && g.count(u, v) > 0)
                    .collect()
            })
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            return 0;
        }
        let mut total = 0;
        let mut idx = vec![0usize; others.len()];
        loop {
            let parent: HashMap<usize, usize> = others
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, choices[i][idx[i]]))
                .collect();
            let rooted = others.iter().all(|&v| {
                let mut cur = v;
                for _ in 0..=vs.len() {
                    if cur == g.source() {
                        return true;
                    }
                    cur = parent[&cur];
                }
                false
            });
            if rooted {
                total += others
                    .iter()
                    .map(|&v| g.count(parent[&v], v))
                    .product::<u64>();
            }
            let mut i = 0;
            while i < idx.len() {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == idx.len() {
                return total;
            }
        }
    }

    #[test]
    fn out_trees_examples() {
        assert_eq!(
            spanning_out_trees(&graph(&[&[0, 1], &[1, 0]], 0, 0)),
            BigUint::from(1u8)
        );
        let cycle = graph(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]], 0, 0);
        assert_eq!(spanning_out_trees(&cycle), BigUint::from(1u8));
        assert_eq!(brute_out_trees(&cycle), 1);
        // Binary: T = N_{F,1-F}.
        for (n01, n10, f) in [(3u64, 3u64, 0usize), (2, 3, 1), (5, 4, 0)] {
            let g = graph(&[&[2, n01], &[n10, 1]], f, 1 - f);
            let expected = if f == 0 { n01 } else { n10 };
            assert_eq!(spanning_out_trees(&g), BigUint::from(expected));
        }
        let disconnected = graph(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]], 0, 0);
        assert!(spanning_out_trees(&disconnected).is_zero());
    }

    #[test]
    fn out_trees_match_brute_force_on_dense_graphs() {
        let dense = [
            graph(
                &[&[1, 2, 1, 0], &[1, 0, 3, 1], &[2, 1, 0, 2], &[1, 1, 1, 0]],
                2,
                2,
            ),
            graph(
                &[&[0, 1, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 1], &[1, 1, 1, 0]],
                0,
                0,
            ),
            graph(&[&[0, 2, 0], &[0, 1, 3], &[1, 0, 0]], 0, 1),
        ];
        for g in &dense {
            assert_eq!(spanning_out_trees(g), BigUint::from(brute_out_trees(g)));
        }
        // Complete digraph on 4 vertices: 4^(4-2) = 16 out-trees per root.
        assert_eq!(spanning_out_trees(&dense[1]), BigUint::from(16u8));
    }

    #[test]
    fn path_count_examples() {
        let t = |s: &str| markov_type(&s.parse::<BinarySequence>().unwrap());
        assert_eq!(
            eulerian_path_count(&MarkovGraph::from_markov_type(&t("010"))),
            1u8.into()
        );
        assert_eq!(
            eulerian_path_count(&MarkovGraph::from_markov_type(&t("0101"))),
            1u8.into()
        );
        assert_eq!(
            eulerian_path_count(&MarkovGraph::from_markov_type(&t("01"))),
            1u8.into()
        );
        // Ternary 0120 and its brute-force class.
        let g = MarkovGraph::from_symbols(&[0, 1, 2, 0], 3);
        let mut same = 0u32;
        for idx in 0..81usize {
            let s: Vec<usize> = (0..4).map(|i| (idx / 3usize.pow(3 - i)) % 3).collect();
            if MarkovGraph::from_symbols(&s, 3) == g {
                same += 1;
            }
        }
        assert_eq!(eulerian_path_count(&g), BigUint::from(same));
    }

    #[test]
    fn single_symbol_graph() {
        let g = MarkovGraph::from_symbols(&[1], 2);
        assert_eq!(eulerian_path_count(&g), BigUint::one());
        let g = MarkovGraph::from_symbols(&[1, 1, 1], 3);
        assert_eq!(eulerian_path_count(&g), BigUint::one());
    }

    #[test]
    fn unbalanced_graph_counts_zero() {
        let g = graph(&[&[0, 2], &[0, 0]], 0, 1);
        assert!(eulerian_path_count(&g).is_zero());
    }

    #[test]
    fn malformed_graphs_rejected() {
        assert!(MarkovGraph::new(vec![], 0, 0).is_err());
        assert!(MarkovGraph::new(vec![vec![0, 1], vec![1]], 0, 0).is_err());
        assert!(MarkovGraph::new(vec![vec![0]], 1, 0).is_err());
    }

    #[test]
    fn binary_closed_form_examples() {
        assert_eq!(
            binary_type_count(&MarkovType::new(0, 0, 1, 1, 0, 0).unwrap()),
            1u8.into()
        );
        assert_eq!(
            binary_type_count(&MarkovType::new(0, 6, 0, 0, 0, 0).unwrap()),
            1u8.into()
        );
        let mt = MarkovType::new(0, 1, 2, 1, 0, 1).unwrap();
        let brute = (0..32u64)
            .filter(|&i| markov_type(&BinarySequence::from_index(i, 5).unwrap()) == mt)
            .count();
        assert_eq!(binary_type_count(&mt), BigUint::from(brute));
        assert_eq!(brute, 2);
    }

    #[test]
    fn log_count_matches_exact() {
        let mt = MarkovType::new(1, 40, 17, 18, 30, 0).unwrap();
        let exact = biguint_to_f64(&binary_type_count(&mt)).ln();
        assert!((log_binary_type_count(&mt) - exact).abs() < 1e-9);
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m: Vec<Vec<BigInt>> = [[2i64, -1, 0], [-1, 2, -1], [0, -1, 2]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(bareiss_determinant(m), BigInt::from(4));
        let swap: Vec<Vec<BigInt>> = [[0i64, 1], [1, 0]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(bareiss_determinant(swap), BigInt::from(-1));
    }
}
