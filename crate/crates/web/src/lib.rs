//! Browser bindings. Every exported function takes plain text and returns a
//! JSON string; failures are reported as `{"ok": false, "error": "..."}`.
//! The `*_json` functions are the same logic without wasm-bindgen.

use normality_core::automata::{parse_automaton, parse_transducer};
use normality_core::decision::{self, fraction, DecisionError, Verdict};
use normality_core::selection::{prefix_select, Mode};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn failure(e: impl ToString) -> Value {
    json!({ "ok": false, "error": e.to_string() })
}

fn verdict_json(v: &Verdict) -> Value {
    let t = &v.trimmed;
    let out = t.output_alphabet();
    let components: Vec<Value> = v
        .components
        .iter()
        .map(|c| {
            let freq: serde_json::Map<String, Value> = c
                .symbol_frequencies
                .iter()
                .enumerate()
                .map(|(b, x)| (out.char_of(b).to_string(), json!(fraction(x))))
                .collect();
            json!({
                "states": c.states.iter().map(|&q| t.state_name(q)).collect::<Vec<_>>(),
                "contains_final": c.contains_final,
                "radius_one": c.radius_one,
                "analyzed": c.analyzed,
                "preserves": c.preserves,
                "no_infinite_output": c.no_infinite_output,
                "frequencies": freq,
                "witness": c.witness.as_ref().map(|w| json!({
                    "word": out.render(&w.word),
                    "computed": fraction(&w.computed),
                    "expected": fraction(&w.expected),
                })),
            })
        })
        .collect();
    json!({
        "ok": true,
        "preserves": v.preserves,
        "empty_normal_domain": v.empty_normal_domain,
        "components": components,
        "report": v.to_string(),
    })
}

/// Decision on a transducer given in the text format.
pub fn check_json(transducer: &str) -> String {
    let value = match parse_transducer(transducer) {
        Err(e) => failure(e),
        Ok(t) => match decision::preserves_normality(&t) {
            Ok(v) => verdict_json(&v),
            Err(DecisionError::AmbiguousTransducer(w)) => {
                let a = t.input_alphabet();
                failure(format!(
                    "the transducer is ambiguous: two accepting runs on {}({})^ω",
                    a.render(&w.prefix),
                    a.render(&w.cycle)
                ))
            }
            Err(e) => failure(e),
        },
    };
    value.to_string()
}

/// Block frequencies of lengths `1..=max_len` for a component; a negative
/// `scc` picks the first analyzable one.
pub fn frequencies_json(transducer: &str, scc: i32, max_len: usize) -> String {
    let run = || -> Result<Value, Value> {
        let t = parse_transducer(transducer).map_err(failure)?;
        let component = match usize::try_from(scc) {
            Ok(i) => i,
            Err(_) => decision::first_analyzable(&t)
                .map_err(failure)?
                .ok_or_else(|| failure("no component has a final state and spectral radius 1"))?,
        };
        let analysis = decision::component_analysis(&t, component).map_err(failure)?;
        let alphabet = analysis.automaton.alphabet();
        let table = decision::frequency_table(&analysis.automaton, max_len).map_err(failure)?;
        let rows: Vec<Value> = table
            .iter()
            .map(|(w, x)| json!({ "block": alphabet.render(w), "frequency": fraction(x) }))
            .collect();
        Ok(json!({
            "ok": true,
            "component": component,
            "frequencies": rows,
            "automaton": analysis.automaton.to_string(),
        }))
    };
    run().unwrap_or_else(|e| e).to_string()
}

/// Subword of `word` selected by the DFA in the given mode.
pub fn select_json(dfa: &str, mode: &str, word: &str) -> String {
    let run = || -> Result<Value, Value> {
        let a = parse_automaton(dfa).map_err(failure)?;
        let mode: Mode = mode.parse().map_err(failure)?;
        let x = a
            .alphabet()
            .parse_word(word)
            .map_err(|c| failure(format!("symbol {c:?} is not in the alphabet")))?;
        let y = prefix_select(&x, &a, mode).map_err(failure)?;
        Ok(json!({ "ok": true, "selected": a.alphabet().render(&y) }))
    };
    run().unwrap_or_else(|e| e).to_string()
}

#[wasm_bindgen]
pub fn check(transducer: &str) -> String {
    check_json(transducer)
}

#[wasm_bindgen]
pub fn block_frequencies(transducer: &str, scc: i32, max_len: usize) -> String {
    frequencies_json(transducer, scc, max_len)
}

#[wasm_bindgen]
pub fn select(dfa: &str, mode: &str, word: &str) -> String {
    select_json(dfa, mode, word)
}
