use std::collections::BTreeSet;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::automata::{check_unambiguous, parse_transducer, Alphabet, Transition};
use crate::linalg::{int, rat};

const BIASED: &str = include_str!("../../data/biased.t");
const EVEN_ZEROS: &str = include_str!("../../data/even_zeros.t");
const IDENTITY: &str = include_str!("../../data/identity.t");

fn names(v: &Verdict, c: &SccReport) -> Vec<String> {
    c.states
        .iter()
        .map(|&q| v.trimmed.state_name(q).to_string())
        .collect()
}

#[test]
fn biased_does_not_preserve() {
    let t = parse_transducer(BIASED).unwrap();
    let v = preserves_normality(&t).unwrap();
    assert!(!v.preserves);
    assert!(!v.empty_normal_domain);
    assert_eq!(v.components.len(), 1);
    let c = &v.components[0];
    assert!(c.analyzed && c.radius_one && !c.preserves);
    assert_eq!(
        c.witness,
        Some(FrequencyWitness {
            word: vec![0],
            computed: rat(9, 15),
            expected: rat(1, 2)
        })
    );
    assert_eq!(c.symbol_frequencies, [rat(9, 15), rat(6, 15)]);
    assert_eq!(
        block_frequencies(&t, 0, 1).unwrap(),
        vec![(vec![0], rat(9, 15)), (vec![1], rat(6, 15))]
    );
}

#[test]
fn even_zeros_preserves() {
    let t = parse_transducer(EVEN_ZEROS).unwrap();
    let v = preserves_normality(&t).unwrap();
    assert!(v.preserves);
    let summary: Vec<(Vec<String>, bool, bool)> = v
        .components
        .iter()
        .map(|c| (names(&v, c), c.radius_one, c.analyzed))
        .collect();
    assert_eq!(
        summary,
        [
            (vec!["1".into(), "2".into(), "3".into()], true, true),
            (vec!["4".into()], false, false)
        ]
    );
    let table = block_frequencies(&t, 0, 2).unwrap();
    assert_eq!(table.len(), 6);
    assert!(table
        .iter()
        .filter(|(w, _)| w.len() == 2)
        .all(|(_, x)| *x == rat(1, 4)));
    assert!(matches!(
        block_frequencies(&t, 1, 2),
        Err(DecisionError::NotAnalyzable { component: 1, .. })
    ));
    assert!(matches!(
        block_frequencies(&t, 2, 2),
        Err(DecisionError::UnknownComponent(2))
    ));
}

#[test]
fn identity_preserves() {
    let t = parse_transducer(IDENTITY).unwrap();
    let v = preserves_normality(&t).unwrap();
    assert!(v.preserves && !v.empty_normal_domain);
    assert_eq!(block_frequencies(&t, 0, 0).unwrap(), vec![(vec![], int(1))]);
}

#[test]
fn invalid_inputs() {
    let empty =
        parse_transducer("transducer\nin 0\nout 0\nstates a b\ninitial a\nfinal b\nt a 0 0 a\n")
            .unwrap();
    assert_eq!(
        preserves_normality(&empty).unwrap_err(),
        DecisionError::EmptyLanguage
    );
    let ambiguous = parse_transducer(
        "transducer\nin 0\nout 01\nstates p\ninitial p\nfinal p\nt p 0 0 p\nt p 0 1 p\n",
    )
    .unwrap();
    assert!(matches!(
        preserves_normality(&ambiguous),
        Err(DecisionError::AmbiguousTransducer(_))
    ));
}

#[test]
fn vacuous_when_no_component_has_radius_one() {
    let t =
        parse_transducer("transducer\nin 01\nout 01\nstates a\ninitial a\nfinal a\nt a 0 1 a\n")
            .unwrap();
    let v = preserves_normality(&t).unwrap();
    assert!(v.preserves && v.empty_normal_domain);
    assert!(v.to_string().contains("empty normal domain"));
    assert_eq!(first_analyzable(&t).unwrap(), None);
}

#[test]
fn silent_component_does_not_preserve() {
    let t = parse_transducer("transducer\nin 01\nout 01\nstates a b\ninitial a\nfinal b\nt a 0 0 a\nt a 1 1 b\nt b 0 - b\nt b 1 - b\n").unwrap();
    let v = preserves_normality(&t).unwrap();
    assert!(!v.preserves);
    let silent = v.components.iter().find(|c| c.analyzed).unwrap();
    assert!(silent.no_infinite_output && silent.witness.is_none());
}

#[test]
fn reports() {
    let v = preserves_normality(&parse_transducer(BIASED).unwrap()).unwrap();
    let text = v.to_string();
    assert!(text.starts_with("does not preserve normality\n"));
    assert!(text.contains("freq(0) = 3/5"));
    assert!(text.contains("witness: freq(0) = 3/5 but uniform is 1/2"));
    let machine = v.machine_report();
    assert!(machine.contains("preserves = false\n"));
    assert!(machine.contains("scc.0.freq.0 = 3/5\n"));
    assert!(machine.contains("scc.0.witness.expected = 1/2\n"));
    for line in machine
        .lines()
        .filter(|l| l.contains("freq") || l.contains("computed"))
    {
        let value = line.split(" = ").nth(1).unwrap();
        assert!(crate::linalg::parse_rational(value).is_some());
    }
    let even = preserves_normality(&parse_transducer(EVEN_ZEROS).unwrap()).unwrap();
    assert!(even.machine_report().contains("scc.1.radius_one = false\n"));
    assert!(even.machine_report().contains("scc.0.freq.1 = 1/2\n"));
}

/// Random transducer over binary alphabets whose trimmed form is unambiguous.
pub(crate) fn random_unambiguous_transducer(rng: &mut impl Rng, max_states: usize) -> Transducer {
    loop {
        let a = crate::automata::tests::random_automaton(rng, max_states, 0.35).trim();
        if a.is_empty() || !check_unambiguous(&a).is_unambiguous() {
            continue;
        }
        let transitions = a
            .edges()
            .iter()
            .map(|e| {
                let len = rng.gen_range(0..=2);
                Transition {
                    src: e.src,
                    input: e.symbol,
                    output: (0..len).map(|_| rng.gen_range(0..2)).collect(),
                    dst: e.dst,
                }
            })
            .collect();
        return Transducer::new(
            a.state_names().to_vec(),
            Alphabet::binary(),
            Alphabet::binary(),
            transitions,
            a.initial().iter().copied(),
            a.finals().iter().copied(),
        )
        .unwrap();
    }
}

#[test]
fn construction_invariants_on_random_transducers() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut analyzed = 0;
    for _ in 0..400 {
        let t = random_unambiguous_transducer(&mut rng, 5);
        let trimmed = validate(&t).unwrap();
        for c in components(&trimmed).components() {
            if !c.contains_final || c.is_trivial || !radius_one(&trimmed, &c.states) {
                continue;
            }
            let Ok(an) = analyze_component(&trimmed, &c.states) else {
                continue;
            };
            analyzed += 1;
            assert!(an
                .weights
                .outgoing_sums(&an.normalized)
                .iter()
                .all(|s| s.is_one()));
            let n = an.normalized.state_count();
            let eye = crate::linalg::RMatrix::identity(n);
            let i_minus_e = eye.sub(&an.matrices.e).unwrap();
            assert_eq!(an.matrices.e_star.mul(&i_minus_e).unwrap(), eye);
            assert_eq!(i_minus_e.mul(&an.matrices.e_star).unwrap(), eye);
            assert!(an.matrices.stochasticity_holds());
            for len in 0..=4 {
                let total: Rational = Alphabet::binary()
                    .words_of_length(len)
                    .iter()
                    .map(|w| an.automaton.weight(w).unwrap())
                    .sum();
                assert!(total.is_one(), "length {len} sums to {total}");
            }
            for k in [rat(3, 2), rat(1, 7)] {
                let (nt, wt) = construction::normalize(&an.transducer, &an.perron.alpha.scale(&k));
                assert_eq!(construction::build_matrices(&nt, &wt).unwrap(), an.matrices);
            }
        }
    }
    assert!(analyzed >= 30, "only {analyzed} analyzable components");
}

#[test]
fn verdict_is_stable_under_state_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut fixtures = vec![
        parse_transducer(BIASED).unwrap(),
        parse_transducer(EVEN_ZEROS).unwrap(),
    ];
    fixtures.extend((0..60).map(|_| random_unambiguous_transducer(&mut rng, 5)));
    for t in fixtures {
        let base = preserves_normality(&t).unwrap();
        let mut order: Vec<usize> = (0..t.state_count()).collect();
        order.shuffle(&mut rng);
        let shuffled = t.permute_states(&order);
        let other = preserves_normality(&shuffled).unwrap();
        assert_eq!(base.preserves, other.preserves);
        assert_eq!(base.empty_normal_domain, other.empty_normal_domain);
        let key = |v: &Verdict, c: &SccReport| names(v, c).into_iter().collect::<BTreeSet<_>>();
        for (i, c) in base.components.iter().enumerate() {
            let (j, d) = other
                .components
                .iter()
                .enumerate()
                .find(|(_, d)| key(&other, d) == key(&base, c))
                .unwrap();
            assert_eq!(
                (c.analyzed, c.preserves, &c.symbol_frequencies),
                (d.analyzed, d.preserves, &d.symbol_frequencies)
            );
            if c.analyzed && !c.no_infinite_output {
                assert_eq!(
                    block_frequencies(&t, i, 3).unwrap(),
                    block_frequencies(&shuffled, j, 3).unwrap()
                );
            }
        }
    }
}

#[test]
fn witnesses_are_genuine() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut negatives = 0;
    for _ in 0..150 {
        let t = random_unambiguous_transducer(&mut rng, 4);
        let v = preserves_normality(&t).unwrap();
        for (i, c) in v.components.iter().enumerate() {
            let Some(w) = &c.witness else {
                assert!(c.preserves || c.no_infinite_output);
                continue;
            };
            negatives += 1;
            let table = block_frequencies(&t, i, w.word.len()).unwrap();
            let expected = Rational::new(1.into(), (1u64 << w.word.len()).into());
            assert_eq!(w.expected, expected);
            let got = &table.iter().find(|(x, _)| *x == w.word).unwrap().1;
            assert_eq!(*got, w.computed);
            assert_ne!(w.computed, w.expected);
        }
        assert_eq!(v.preserves, v.components.iter().all(|c| c.preserves));
        assert!(v
            .components
            .iter()
            .filter(|c| !c.analyzed)
            .all(|c| c.preserves && c.symbol_frequencies.is_empty()));
    }
    assert!(negatives > 10);
}
