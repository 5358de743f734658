use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub(crate) const UNAMBIGUOUS: &str = include_str!("../../data/unambiguous.a");
pub(crate) const BIASED: &str = include_str!("../../data/biased.t");
pub(crate) const EVEN_ZEROS: &str = include_str!("../../data/even_zeros.t");

fn names(t: &Transducer, states: &[usize]) -> Vec<String> {
    states
        .iter()
        .map(|&q| t.state_name(q).to_string())
        .collect()
}

#[test]
fn parses_biased_transducer() {
    let t = parse_transducer(BIASED).unwrap();
    assert_eq!(t.state_count(), 4);
    assert_eq!(t.transitions().len(), 8);
    let long = t
        .transitions()
        .iter()
        .find(|tr| tr.output.len() == 2)
        .unwrap();
    assert_eq!(t.output_alphabet().render(&long.output), "10");
}

#[test]
fn parses_even_zeros_transducer() {
    let t = parse_transducer(EVEN_ZEROS).unwrap();
    assert_eq!(t.state_count(), 4);
    assert_eq!(t.transitions().len(), 8);
    assert_eq!(
        names(&t, &t.initial().iter().copied().collect::<Vec<_>>()),
        ["1"]
    );
    assert_eq!(
        names(&t, &t.finals().iter().copied().collect::<Vec<_>>()),
        ["2", "4"]
    );
}

#[test]
fn parse_errors() {
    let undeclared = "transducer\nin 01\nout 01\nstates a\ninitial a\nfinal a\nt a 0 0 b\n";
    assert_eq!(
        parse_transducer(undeclared),
        Err(ParseError::UnknownState {
            line: 7,
            name: "b".into()
        })
    );
    let dup = "transducer\nin 01\nout 01\nstates a\nt a 0 0 a\n# again\nt a 0 0 a\n";
    assert_eq!(
        parse_transducer(dup),
        Err(ParseError::DuplicateTransition { line: 7 })
    );
    let bad_symbol = "transducer\nin 01\nout 01\nstates a\nt a 2 0 a\n";
    assert_eq!(
        parse_transducer(bad_symbol),
        Err(ParseError::UnknownSymbol {
            line: 5,
            symbol: '2'
        })
    );
    let bad_out = "transducer\nin 01\nout 01\nstates a\nt a 0 0x a\n";
    assert_eq!(
        parse_transducer(bad_out),
        Err(ParseError::UnknownSymbol {
            line: 5,
            symbol: 'x'
        })
    );
    assert!(matches!(
        parse_transducer("automaton\n"),
        Err(ParseError::Syntax { line: 1, .. })
    ));
    assert_eq!(
        parse_transducer("transducer\nstates a\nout 0\n"),
        Err(ParseError::Missing("in"))
    );
    assert!(matches!(
        parse_transducer("transducer\nin 0\nout 0\nstates a\nfoo\n"),
        Err(ParseError::Syntax { line: 5, .. })
    ));
    assert!(matches!(
        parse_transducer("transducer\nin 0\nout 0\nstates a a\n"),
        Err(ParseError::Syntax { line: 4, .. })
    ));
}

#[test]
fn text_format_round_trips() {
    let t = parse_transducer(BIASED).unwrap();
    assert_eq!(parse_transducer(&t.to_string()).unwrap(), t);
    let a = parse_automaton(UNAMBIGUOUS).unwrap();
    assert_eq!(parse_automaton(&a.to_string()).unwrap(), a);
    assert!(matches!(
        parse_machine(UNAMBIGUOUS),
        Ok(Machine::Automaton(_))
    ));
    assert!(matches!(parse_machine(BIASED), Ok(Machine::Transducer(_))));
}

#[test]
fn input_automaton_of_biased_is_unambiguous_example() {
    let t = parse_transducer(BIASED).unwrap();
    let a = parse_automaton(UNAMBIGUOUS).unwrap();
    let ia = t.input_automaton();
    let edges = |x: &Automaton| x.edges().iter().copied().collect::<BTreeSet<_>>();
    assert_eq!(edges(&ia), edges(&a));
    assert_eq!(ia.initial(), a.initial());
    assert_eq!(ia.finals(), a.finals());
}

#[test]
fn input_automaton_without_transitions() {
    let t = parse_transducer("transducer\nin 0\nout 0\nstates a\n").unwrap();
    assert!(t.input_automaton().edges().is_empty());
}

#[test]
fn trim_examples() {
    let t = parse_transducer(BIASED).unwrap();
    assert_eq!(t.trim(), t);

    let isolated = BIASED.replace("states 1 2 3 4", "states 1 2 3 4 9");
    let t9 = parse_transducer(&isolated).unwrap();
    assert_eq!(t9.state_count(), 5);
    assert_eq!(t9.trim(), t);

    let unreachable_final =
        "transducer\nin 0\nout 0\nstates a b\ninitial a\nfinal b\nt a 0 0 a\nt b 0 0 b\n";
    assert!(parse_transducer(unreachable_final)
        .unwrap()
        .trim()
        .is_empty());
}

#[test]
fn trim_drops_states_that_only_pass_through_transient_finals() {
    // b is final but on no cycle; the only accepting runs stay in a
    let text = "transducer\nin 0\nout 0\nstates a b c\ninitial a\nfinal a b\nt a 0 0 a\nt a 0 0 b\nt b 0 0 c\n";
    let t = parse_transducer(text).unwrap().trim();
    assert_eq!(t.state_names(), ["a"]);
}

#[test]
fn scc_examples() {
    let t = parse_transducer(EVEN_ZEROS).unwrap();
    let scc = scc_decompose(&t.input_automaton());
    let comps: Vec<Vec<String>> = scc
        .components()
        .iter()
        .map(|c| names(&t, &c.states))
        .collect();
    assert_eq!(comps, [vec!["1", "2", "3"], vec!["4"]]);
    assert!(scc
        .components()
        .iter()
        .all(|c| c.contains_final && !c.is_trivial));

    let a = parse_automaton(UNAMBIGUOUS).unwrap();
    assert_eq!(scc_decompose(&a).len(), 1);
}

#[test]
fn determinism_examples() {
    assert!(!parse_automaton(UNAMBIGUOUS).unwrap().is_deterministic());
    assert!(!parse_transducer(EVEN_ZEROS)
        .unwrap()
        .input_automaton()
        .is_deterministic());
    let one = parse_automaton("automaton\nin a\nstates s\ninitial s\nfinal s\nt s a s\n").unwrap();
    assert!(is_deterministic(&one));
}

#[test]
fn fixture_machines_are_unambiguous() {
    assert!(check_unambiguous(&parse_automaton(UNAMBIGUOUS).unwrap()).is_unambiguous());
    assert!(check_unambiguous_transducer(&parse_transducer(BIASED).unwrap()).is_unambiguous());
    assert!(check_unambiguous_transducer(&parse_transducer(EVEN_ZEROS).unwrap()).is_unambiguous());
}

pub(crate) fn random_automaton(rng: &mut impl Rng, max_states: usize, density: f64) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let mut edges = Vec::new();
    for src in 0..n {
        for symbol in 0..2 {
            for dst in 0..n {
                if rng.gen_bool(density) {
                    edges.push(Edge { src, symbol, dst });
                }
            }
        }
    }
    let mut initial: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    if initial.is_empty() {
        initial.push(0);
    }
    let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Automaton::with_indexed_states(n, Alphabet::binary(), edges, initial, finals).unwrap()
}

/// Brute-force oracle: looks for a word `uv` with `|uv| <= max_len` carrying
/// two distinct runs from initial states that each close a loop over `v`
/// through a final state. Any hit gives two accepting runs on `u v^ω`, so the
/// oracle is sound; it is complete only for witnesses within the length bound.
fn brute_force_ambiguous(a: &Automaton, max_len: usize) -> bool {
    let mut delta = vec![vec![Vec::new(); 2]; a.state_count()];
    for e in a.edges() {
        delta[e.src][e.symbol].push(e.dst);
    }
    for len in 1..=max_len {
        for word in a.alphabet().words_of_length(len) {
            let mut runs: Vec<Vec<usize>> = a.initial().iter().map(|&q| vec![q]).collect();
            for &s in &word {
                runs = runs
                    .into_iter()
                    .flat_map(|r| {
                        let last = *r.last().unwrap();
                        delta[last][s].iter().map(move |&q| {
                            let mut r = r.clone();
                            r.push(q);
                            r
                        })
                    })
                    .collect();
            }
            for k in 0..len {
                let lassos: BTreeSet<&Vec<usize>> = runs
                    .iter()
                    .filter(|r| {
                        r[k] == r[len] && r[k + 1..=len].iter().any(|q| a.finals().contains(q))
                    })
                    .collect();
                if lassos.len() >= 2 {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn unambiguity_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ambiguous = 0;
    for _ in 0..300 {
        let a = random_automaton(&mut rng, 4, 0.3);
        let oracle = brute_force_ambiguous(&a, 8);
        match check_unambiguous(&a) {
            Ambiguity::Unambiguous => assert!(!oracle, "oracle found ambiguity in\n{a}"),
            Ambiguity::Ambiguous(w) => {
                ambiguous += 1;
                assert!(
                    super::ambiguity::witness_is_valid(&w, a.edges(), a.initial(), a.finals()),
                    "bad witness for\n{a}"
                );
                if w.prefix.len() + w.cycle.len() <= 8 {
                    assert!(oracle, "witness within bound but oracle missed it\n{a}");
                }
            }
        }
    }
    assert!(
        ambiguous > 20 && ambiguous < 290,
        "degenerate sample: {ambiguous}"
    );
}

#[test]
fn trim_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = random_automaton(&mut rng, 5, 0.25);
        let once = a.trim();
        assert_eq!(once.trim(), once);
    }
}

#[test]
fn components_of_unambiguous_automata_stay_unambiguous() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    for _ in 0..300 {
        let a = random_automaton(&mut rng, 4, 0.3).trim();
        if a.is_empty() || !check_unambiguous(&a).is_unambiguous() {
            continue;
        }
        let scc = scc_decompose(&a);
        for c in scc.components() {
            let sub = a.restrict(&c.states);
            for local in 0..c.states.len() {
                assert!(check_unambiguous(&sub.with_initial([local])).is_unambiguous());
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}
