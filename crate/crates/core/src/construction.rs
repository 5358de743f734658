//! From a strongly connected unambiguous transducer with spectral radius 1
//! to the weighted automaton of limiting output block frequencies.
//!
//! Outputs longer than one symbol are first split into chains of fresh
//! states whose extra edges consume no input. Each remaining edge gets a
//! weight: `α_q / (#A·α_p)` when it consumes a symbol, 1 otherwise. Then
//! `E` collects empty-output edges, `D_b` the edges emitting `b`, and the
//! automaton is `⟨π̂, b ↦ E*·D_b, 𝟏⟩` where `π̂` is stationary for `Σ_b E*·D_b`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automata::{Alphabet, Symbol, Transducer};
use crate::linalg::{self, LinalgError, Orientation, RMatrix, RVector, Rational};
use crate::weighted::WeightedAutomaton;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    /// Some cycle emits nothing forever with positive probability.
    #[error("the component has a cycle of empty outputs, so normal inputs need not produce infinite output")]
    NoInfiniteOutput,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An edge of the normalized transducer. `input` is `None` on chain edges
/// and `output` is `None` for the empty word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedEdge {
    pub src: usize,
    pub input: Option<Symbol>,
    pub output: Option<Symbol>,
    pub dst: usize,
    /// Index of the original transition this edge comes from.
    pub origin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedTransducer {
    state_names: Vec<String>,
    original_states: usize,
    input: Alphabet,
    output: Alphabet,
    edges: Vec<NormalizedEdge>,
    chain_parent: Vec<usize>,
}

impl NormalizedTransducer {
    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    /// States `0..original_states()` are the original ones, in order.
    pub fn original_states(&self) -> usize {
        self.original_states
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn edges(&self) -> &[NormalizedEdge] {
        &self.edges
    }

    /// For a chain state, the index of the original transition it splits.
    pub fn chain_parent(&self, state: usize) -> Option<usize> {
        state
            .checked_sub(self.original_states)
            .map(|k| self.chain_parent[k])
    }

    /// Runs the edges consuming `input` from `state`; chain edges are followed
    /// until an original state is reached. Returns the output and the target.
    pub fn step(&self, state: usize, input: Symbol) -> Vec<(Vec<Symbol>, usize)> {
        self.edges
            .iter()
            .filter(|e| e.src == state && e.input == Some(input))
            .map(|e| {
                let mut out: Vec<Symbol> = e.output.into_iter().collect();
                let mut at = e.dst;
                while at >= self.original_states {
                    let next = self
                        .edges
                        .iter()
                        .find(|f| f.src == at)
                        .expect("chain states have one edge");
                    out.extend(next.output);
                    at = next.dst;
                }
                (out, at)
            })
            .collect()
    }
}

/// Weight per normalized edge, aligned with [`NormalizedTransducer::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTransitionTable {
    pub weights: Vec<Rational>,
}

impl WeightedTransitionTable {
    /// Sum of the weights leaving each state.
    pub fn outgoing_sums(&self, nt: &NormalizedTransducer) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); nt.state_count()];
        for (e, w) in nt.edges.iter().zip(&self.weights) {
            sums[e.src] += w;
        }
        sums
    }
}

fn fresh_name(taken: &mut Vec<String>, candidate: usize) -> String {
    let mut name = candidate.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.push(name.clone());
    name
}

/// Splits long outputs and weights every edge. `alpha` is the right Perron
/// vector of the input automaton's adjacency matrix (any positive multiple).
pub fn normalize(
    t: &Transducer,
    alpha: &RVector,
) -> (NormalizedTransducer, WeightedTransitionTable) {
    let n = t.state_count();
    let symbols = Rational::from_integer(t.input_alphabet().len().into());
    let mut names = t.state_names().to_vec();
    let mut chain_parent = Vec::new();
    let mut edges = Vec::new();

    let mut order: Vec<usize> = (0..t.transitions().len()).collect();
    order.sort_by_key(|&i| {
        let tr = &t.transitions()[i];
        (tr.src, tr.input, tr.dst, i)
    });
    let consuming = |p: usize, q: usize| &alpha[q] / (&symbols * &alpha[p]);

    for &i in &order {
        let tr = &t.transitions()[i];
        if tr.output.len() <= 1 {
            continue;
        }
        let first_chain = names.len();
        for k in 1..tr.output.len() {
            let candidate = n + chain_parent.len() + 1;
            fresh_name(&mut names, candidate);
            chain_parent.push(i);
            let src = if k == 1 { tr.src } else { first_chain + k - 2 };
            let input = (k == 1).then_some(tr.input);
            let w = if k == 1 {
                consuming(tr.src, tr.dst)
            } else {
                Rational::one()
            };
            edges.push((
                i,
                k - 1,
                NormalizedEdge {
                    src,
                    input,
                    output: Some(tr.output[k - 1]),
                    dst: first_chain + k - 1,
                    origin: i,
                },
                w,
            ));
        }
        let last = first_chain + tr.output.len() - 2;
        edges.push((
            i,
            tr.output.len() - 1,
            NormalizedEdge {
                src: last,
                input: None,
                output: tr.output.last().copied(),
                dst: tr.dst,
                origin: i,
            },
            Rational::one(),
        ));
    }
    for (i, tr) in t.transitions().iter().enumerate() {
        if tr.output.len() <= 1 {
            let e = NormalizedEdge {
                src: tr.src,
                input: Some(tr.input),
                output: tr.output.first().copied(),
                dst: tr.dst,
                origin: i,
            };
            edges.push((i, 0, e, consuming(tr.src, tr.dst)));
        }
    }
    // original transition order, chain edges in sequence
    edges.sort_by_key(|(i, k, _, _)| (*i, *k));
    let (edges, weights): (Vec<_>, Vec<_>) = edges.into_iter().map(|(_, _, e, w)| (e, w)).unzip();

    let nt = NormalizedTransducer {
        state_names: names,
        original_states: n,
        input: t.input_alphabet().clone(),
        output: t.output_alphabet().clone(),
        edges,
        chain_parent,
    };
    (nt, WeightedTransitionTable { weights })
}

/// `E`, `E*`, the `D_b` (indexed by output symbol), `P̂` and its stationary `π̂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionMatrices {
    pub e: RMatrix,
    pub e_star: RMatrix,
    pub d: Vec<RMatrix>,
    pub p_hat: RMatrix,
    pub pi_hat: RVector,
}

impl ConstructionMatrices {
    /// `E*·D_b`.
    pub fn mu(&self, b: Symbol) -> RMatrix {
        self.e_star
            .mul(&self.d[b])
            .expect("square matrices of one size")
    }

    /// `E + Σ_b D_b`, the one-step transition matrix of the normalized transducer.
    pub fn step_matrix(&self) -> RMatrix {
        self.d
            .iter()
            .fold(self.e.clone(), |acc, d| acc.add(d).expect("same size"))
    }

    /// Checks that `P̂` is row-stochastic and that `π̂` is proportional to
    /// `π′ − π′E` where `π′` is stationary for `E + Σ_b D_b`.
    pub fn stochasticity_holds(&self) -> bool {
        if !self.p_hat.is_row_stochastic() {
            return false;
        }
        let Ok(pi_prime) = linalg::stationary(&self.step_matrix()) else {
            return false;
        };
        let drop = pi_prime.mul_matrix(&self.e).expect("same size");
        let diff: Vec<Rational> = pi_prime
            .entries()
            .iter()
            .zip(drop.entries())
            .map(|(a, b)| a - b)
            .collect();
        let total: Rational = diff.iter().sum();
        if !total.is_positive() {
            return false;
        }
        diff.iter()
            .zip(self.pi_hat.entries())
            .all(|(x, y)| x / &total == *y)
    }
}

/// Builds `E`, `E*`, `D_b`, `P̂` and `π̂`.
pub fn build_matrices(
    nt: &NormalizedTransducer,
    wt: &WeightedTransitionTable,
) -> Result<ConstructionMatrices, ConstructionError> {
    let n = nt.state_count();
    let mut e = RMatrix::zeros(n, n);
    let mut d = vec![RMatrix::zeros(n, n); nt.output.len()];
    for (edge, w) in nt.edges.iter().zip(&wt.weights) {
        match edge.output {
            None => e[(edge.src, edge.dst)] += w,
            Some(b) => d[b][(edge.src, edge.dst)] += w,
        }
    }
    if nt.edges.iter().all(|edge| edge.output.is_none()) {
        return Err(ConstructionError::NoInfiniteOutput);
    }
    let e_star = match linalg::solve(
        &e.minus_identity().scale(&-Rational::one()),
        &RMatrix::identity(n),
    ) {
        Ok(x) => x,
        Err(LinalgError::Singular { .. }) => return Err(ConstructionError::NoInfiniteOutput),
        Err(other) => return Err(other.into()),
    };
    let mut p_hat = RMatrix::zeros(n, n);
    for db in &d {
        p_hat = p_hat.add(&e_star.mul(db)?)?;
    }
    let pi_hat = linalg::stationary(&p_hat)?;
    Ok(ConstructionMatrices {
        e,
        e_star,
        d,
        p_hat,
        pi_hat,
    })
}

/// `⟨π̂, b ↦ E*·D_b, 𝟏⟩` over the output alphabet.
pub fn build_frequency_automaton(
    cm: &ConstructionMatrices,
    nt: &NormalizedTransducer,
) -> WeightedAutomaton {
    let mu = (0..nt.output.len()).map(|b| cm.mu(b)).collect();
    WeightedAutomaton::new(
        nt.output.clone(),
        cm.pi_hat.clone(),
        mu,
        RVector::ones(nt.state_count(), Orientation::Column),
    )
    .expect("sizes agree by construction")
}

impl fmt::Display for NormalizedTransducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.edges {
            let input = e.input.map_or('ε', |a| self.input.char_of(a));
            let output = e.output.map_or('ε', |b| self.output.char_of(b));
            writeln!(
                f,
                "{} -{}|{}-> {}",
                self.state_names[e.src], input, output, self.state_names[e.dst]
            )?;
        }
        Ok(())
    }
}

/// Plain-text dump of every matrix, states labelled by `names`.
pub fn render_matrices(cm: &ConstructionMatrices, nt: &NormalizedTransducer) -> String {
    let mut out = String::new();
    out.push_str(&format!("states {}\n", nt.state_names.join(" ")));
    let mut block = |label: String, m: &RMatrix| {
        out.push_str(&label);
        out.push('\n');
        for i in 0..m.rows() {
            let cells: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    };
    block("E".into(), &cm.e);
    block("E*".into(), &cm.e_star);
    for (b, db) in cm.d.iter().enumerate() {
        block(format!("D {}", nt.output.char_of(b)), db);
    }
    block("P^".into(), &cm.p_hat);
    let cells: Vec<String> = cm
        .pi_hat
        .entries()
        .iter()
        .map(ToString::to_string)
        .collect();
    out.push_str(&format!("pi^ {}\n", cells.join(" ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{parse_transducer, scc_decompose};
    use crate::linalg::{int, rat};
    use crate::spectral::{adjacency_matrix, perron_vectors};
    use crate::weighted::{bernoulli_automaton, equivalent};

    const BIASED: &str = include_str!("../data/biased.t");
    const EVEN_ZEROS: &str = include_str!("../data/even_zeros.t");

    fn alpha_of(t: &Transducer) -> RVector {
        perron_vectors(&adjacency_matrix(&t.input_automaton()))
            .unwrap()
            .alpha
    }

    fn biased() -> (
        NormalizedTransducer,
        WeightedTransitionTable,
        ConstructionMatrices,
    ) {
        let t = parse_transducer(BIASED).unwrap();
        let (nt, wt) = normalize(&t, &alpha_of(&t));
        let cm = build_matrices(&nt, &wt).unwrap();
        (nt, wt, cm)
    }

    fn edge_weight(
        nt: &NormalizedTransducer,
        wt: &WeightedTransitionTable,
        src: &str,
        dst: &str,
    ) -> Rational {
        let idx = |s: &str| nt.state_names().iter().position(|n| n == s).unwrap();
        let i = nt
            .edges()
            .iter()
            .position(|e| e.src == idx(src) && e.dst == idx(dst))
            .unwrap();
        wt.weights[i].clone()
    }

    #[test]
    fn normalization_splits_the_long_output() {
        let (nt, wt, _) = biased();
        assert_eq!(nt.state_count(), 5);
        assert_eq!(nt.state_names()[4], "5");
        assert_eq!(nt.chain_parent(4), Some(1));
        assert_eq!(nt.chain_parent(3), None);
        let into_chain = nt.edges().iter().find(|e| e.dst == 4).unwrap();
        assert_eq!(
            (into_chain.src, into_chain.input, into_chain.output),
            (0, Some(1), Some(1))
        );
        let out_of_chain = nt.edges().iter().find(|e| e.src == 4).unwrap();
        assert_eq!(
            (out_of_chain.input, out_of_chain.output, out_of_chain.dst),
            (None, Some(0), 1)
        );
        assert_eq!(edge_weight(&nt, &wt, "1", "5"), rat(1, 4));
        assert_eq!(edge_weight(&nt, &wt, "5", "2"), int(1));
        assert!(wt.outgoing_sums(&nt).iter().all(|s| *s == int(1)));
    }

    #[test]
    fn short_outputs_are_unchanged() {
        let t = parse_transducer(EVEN_ZEROS).unwrap();
        let (nt, _) = normalize(&t, &RVector::ones(4, Orientation::Column));
        assert_eq!(nt.state_count(), 4);
        assert_eq!(nt.edges().len(), t.transitions().len());
        assert!((0..4).all(|q| nt.chain_parent(q).is_none()));
    }

    #[test]
    fn long_chains_get_fresh_states() {
        let t = parse_transducer(
            "transducer\nin 0\nout 01\nstates 2 a\ninitial a\nfinal a\nt a 0 0110 a\n",
        )
        .unwrap();
        let (nt, wt) = normalize(&t, &RVector::ones(2, Orientation::Column));
        // "3" is free, then "4" and "5"; names never collide with existing ones
        assert_eq!(nt.state_names(), ["2", "a", "3", "4", "5"]);
        assert_eq!(wt.weights, vec![int(1); 4]);
        assert_eq!(nt.step(1, 0), vec![(vec![0, 1, 1, 0], 1)]);
        let clash = parse_transducer(
            "transducer\nin 0\nout 0\nstates 2 x\ninitial x\nfinal x\nt x 0 00 x\n",
        )
        .unwrap();
        let (nt, _) = normalize(&clash, &RVector::ones(2, Orientation::Column));
        assert_eq!(nt.state_names(), ["2", "x", "3"]);
        let clash = parse_transducer(
            "transducer\nin 0\nout 0\nstates 3 x\ninitial x\nfinal x\nt x 0 00 x\n",
        )
        .unwrap();
        let (nt, _) = normalize(&clash, &RVector::ones(2, Orientation::Column));
        assert_eq!(nt.state_names(), ["3", "x", "3'"]);
    }

    #[test]
    fn biased_matrices() {
        let (_, _, cm) = biased();
        let z = (0, 1);
        assert_eq!(
            cm.e,
            RMatrix::from_ratios(&[
                &[z; 5],
                &[z; 5],
                &[z, z, z, (1, 1), z],
                &[z, z, (1, 4), z, z],
                &[z; 5]
            ])
        );
        assert_eq!(
            cm.e_star,
            RMatrix::from_ratios(&[
                &[(1, 1), z, z, z, z],
                &[z, (1, 1), z, z, z],
                &[z, z, (4, 3), (4, 3), z],
                &[z, z, (1, 3), (4, 3), z],
                &[z, z, z, z, (1, 1)],
            ])
        );
        assert_eq!(
            cm.d[0],
            RMatrix::from_ratios(&[
                &[(1, 2), z, z, z, z],
                &[(1, 1), z, z, z, z],
                &[z; 5],
                &[z, z, (1, 4), z, z],
                &[z, (1, 1), z, z, z]
            ])
        );
        assert_eq!(
            cm.d[1],
            RMatrix::from_ratios(&[
                &[z, z, (1, 4), z, (1, 4)],
                &[z; 5],
                &[z; 5],
                &[(1, 2), z, z, z, z],
                &[z; 5]
            ])
        );
        assert_eq!(
            cm.p_hat,
            RMatrix::from_ratios(&[
                &[(1, 2), z, (1, 4), z, (1, 4)],
                &[(1, 1), z, z, z, z],
                &[(2, 3), z, (1, 3), z, z],
                &[(2, 3), z, (1, 3), z, z],
                &[z, (1, 1), z, z, z],
            ])
        );
        assert_eq!(
            cm.pi_hat,
            RVector::from_ratios(
                &[(8, 15), (2, 15), (3, 15), (0, 1), (2, 15)],
                Orientation::Row
            )
        );
        assert_eq!(
            cm.e_star
                .mul(&RMatrix::identity(5).sub(&cm.e).unwrap())
                .unwrap(),
            RMatrix::identity(5)
        );
        assert!(cm.stochasticity_holds());
    }

    #[test]
    fn biased_frequency_automaton() {
        let (nt, _, cm) = biased();
        let a = build_frequency_automaton(&cm, &nt);
        assert_eq!(a.weight_of("0").unwrap(), rat(9, 15));
        assert_eq!(a.weight_of("1").unwrap(), rat(6, 15));
        assert_eq!(a.weight_of("").unwrap(), int(1));
        assert!(
            !equivalent(&a, &bernoulli_automaton(nt.output_alphabet()).unwrap())
                .unwrap()
                .is_equivalent()
        );
    }

    #[test]
    fn even_zeros_component() {
        let t = parse_transducer(EVEN_ZEROS).unwrap();
        let scc = scc_decompose(&t.input_automaton());
        let sub = t.restrict(&scc.components()[0].states);
        let alpha = alpha_of(&sub);
        assert_eq!(
            alpha,
            RVector::from_ratios(&[(1, 1), (3, 2), (1, 2)], Orientation::Column)
        );
        let (nt, wt) = normalize(&sub, &alpha);
        let cm = build_matrices(&nt, &wt).unwrap();
        assert_eq!(
            cm.pi_hat,
            RVector::from_ratios(&[(0, 1), (3, 4), (1, 4)], Orientation::Row)
        );
        assert!(cm.stochasticity_holds());
        let a = build_frequency_automaton(&cm, &nt);
        assert!(
            equivalent(&a, &bernoulli_automaton(&Alphabet::binary()).unwrap())
                .unwrap()
                .is_equivalent()
        );
        assert!(equivalent(&a, &crate::weighted::tests::even_zeros_triple())
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn silent_cycle_has_no_infinite_output() {
        let t = parse_transducer("transducer\nin 01\nout 0\nstates a b\ninitial a\nfinal a\nt a 0 - a\nt a 1 - b\nt b 0 - a\nt b 1 - b\n").unwrap();
        let (nt, wt) = normalize(&t, &alpha_of(&t));
        assert_eq!(
            build_matrices(&nt, &wt),
            Err(ConstructionError::NoInfiniteOutput)
        );
    }

    #[test]
    fn scaling_alpha_leaves_matrices_unchanged() {
        let t = parse_transducer(BIASED).unwrap();
        let alpha = alpha_of(&t);
        let (nt, wt) = normalize(&t, &alpha);
        let base = build_matrices(&nt, &wt).unwrap();
        for k in [rat(2, 3), rat(17, 1), rat(1, 9)] {
            let (nt, wt) = normalize(&t, &alpha.scale(&k));
            assert_eq!(build_matrices(&nt, &wt).unwrap(), base);
        }
    }

    #[test]
    fn render_lists_every_matrix() {
        let (nt, _, cm) = biased();
        let text = render_matrices(&cm, &nt);
        assert!(text.starts_with("states 1 2 3 4 5\nE\n"));
        assert!(text.contains("E*\n1 0 0 0 0\n0 1 0 0 0\n0 0 4/3 4/3 0\n"));
        assert!(text.contains("D 0\n") && text.contains("D 1\n") && text.contains("P^\n"));
        assert!(text.ends_with("pi^ 8/15 2/15 1/5 0 2/15\n"));
        assert!(nt.to_string().contains("5 -ε|0-> 2"));
    }
}
