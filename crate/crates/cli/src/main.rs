//! `normality`: decide whether an unambiguous Büchi transducer preserves
//! normality, and inspect the objects the decision is built from.
//!
//! Exit codes: 0 success (for `check`: preserves), 1 does not preserve or
//! tolerance exceeded, 2 invalid input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use normality_core::automata::{
    parse_automaton, parse_machine, parse_transducer, scc_decompose, ParseError, Transducer,
};
use normality_core::construction::render_matrices;
use normality_core::decision::{self, fraction, DecisionError};
use normality_core::empirical::{compare_frequencies, EmpiricalError, Source};
use normality_core::selection::{prefix_select, Mode, SelectionError};
use normality_core::spectral::{
    adjacency_matrix, markov_matrix, perron_vectors, radius_is_one, SpectralError,
};

#[derive(Debug, Parser)]
#[command(
    name = "normality",
    version,
    about = "Normality preservation by unambiguous Büchi transducers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the transducer preserves normality (exit 0 yes, 1 no, 2 invalid).
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Components, adjacency matrices, spectral radius flags and Perron data.
    Info { file: PathBuf },
    /// Limiting frequencies of output blocks on normal inputs.
    Weights {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_len: usize,
        /// Component index; defaults to the first analyzable one.
        #[arg(long)]
        scc: Option<usize>,
        /// Also print the frequency automaton in the `weighted` text format.
        #[arg(long)]
        dump: bool,
    },
    /// Normalized transducer and the matrices E, E*, D_b, P^, pi^.
    Matrices {
        file: PathBuf,
        #[arg(long)]
        scc: Option<usize>,
    },
    /// Apply the prefix selection rule of a complete DFA to a finite word.
    Select {
        #[arg(long)]
        mode: Mode,
        dfa: PathBuf,
        word: String,
    },
    /// Run a finite prefix of a normal sequence through the transducer and
    /// compare block frequencies with the exact prediction.
    Freq {
        file: PathBuf,
        #[arg(long, default_value = "champernowne:2")]
        source: Source,
        #[arg(long, default_value_t = 1_000_000)]
        len: usize,
        #[arg(long, default_value_t = 2)]
        max_block: usize,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
        /// Exit with 1 when some block deviates by more than this.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Report {
    Text,
    Csv,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Empirical(#[from] EmpiricalError),
    #[error("the transducer is ambiguous: two accepting runs on {prefix}({cycle})^ω")]
    Ambiguous { prefix: String, cycle: String },
    #[error("no component has a final state and spectral radius 1")]
    NothingToAnalyze,
    #[error("symbol {0:?} is not in the input alphabet")]
    Symbol(char),
}

/// Text written to stdout plus the exit code.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_transducer(path: &Path) -> Result<Transducer, CliError> {
    parse_transducer(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn pick_component(t: &Transducer, scc: Option<usize>) -> Result<usize, CliError> {
    match scc {
        Some(i) => Ok(i),
        None => decision::first_analyzable(t)?.ok_or(CliError::NothingToAnalyze),
    }
}

fn check(file: &Path, format: Format) -> Result<Output, CliError> {
    let t = load_transducer(file)?;
    let verdict = match decision::preserves_normality(&t) {
        Ok(v) => v,
        Err(DecisionError::AmbiguousTransducer(w)) => {
            let input = t.input_alphabet();
            return Err(CliError::Ambiguous {
                prefix: input.render(&w.prefix),
                cycle: input.render(&w.cycle),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        Format::Text => verdict.to_string(),
        Format::Machine => verdict.machine_report(),
    };
    Ok(Output {
        text,
        code: if verdict.preserves { 0 } else { 1 },
    })
}

fn info(file: &Path) -> Result<Output, CliError> {
    let machine = parse_machine(&read(file)?).map_err(|source| CliError::Parse {
        path: file.to_owned(),
        source,
    })?;
    let a = machine.automaton().trim();
    if a.is_empty() {
        return Ok(Output::ok("empty after trim\n".into()));
    }
    let mut out = String::new();
    let names = |states: &[usize]| {
        states
            .iter()
            .map(|&q| a.state_name(q))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        out,
        "states after trim: {}",
        names(&(0..a.state_count()).collect::<Vec<_>>())
    );
    for (i, c) in scc_decompose(&a).components().iter().enumerate() {
        let sub = a.restrict(&c.states);
        let m = adjacency_matrix(&sub);
        let one = !c.is_trivial && radius_is_one(&m);
        let _ = writeln!(out, "component {i} {{{}}}", names(&c.states));
        let _ = writeln!(out, "  final: {}", c.contains_final);
        let _ = writeln!(out, "  M = {}", m.display_factored());
        let _ = writeln!(out, "  radius: {}", if one { "1" } else { "< 1" });
        if one {
            let d = perron_vectors(&m)?;
            let _ = writeln!(out, "  alpha = {}", d.alpha);
            let _ = writeln!(out, "  pi = {}", d.pi);
            let _ = writeln!(out, "  P = {}", markov_matrix(&d).display_factored());
        }
    }
    Ok(Output::ok(out))
}

fn weights(
    file: &Path,
    max_len: usize,
    scc: Option<usize>,
    dump: bool,
) -> Result<Output, CliError> {
    let t = load_transducer(file)?;
    let component = pick_component(&t, scc)?;
    let analysis = decision::component_analysis(&t, component)?;
    let mut out = String::new();
    if dump {
        let _ = writeln!(out, "{}", analysis.automaton);
    }
    let alphabet = analysis.automaton.alphabet();
    for (w, x) in decision::frequency_table(&analysis.automaton, max_len)? {
        let word = if w.is_empty() {
            "ε".to_string()
        } else {
            alphabet.render(&w)
        };
        let _ = writeln!(out, "{word} = {}", fraction(&x));
    }
    Ok(Output::ok(out))
}

fn matrices(file: &Path, scc: Option<usize>) -> Result<Output, CliError> {
    let t = load_transducer(file)?;
    let component = pick_component(&t, scc)?;
    let a = decision::component_analysis(&t, component)?;
    let out = format!(
        "normalized\n{}{}",
        a.normalized,
        render_matrices(&a.matrices, &a.normalized)
    );
    Ok(Output::ok(out))
}

fn select(mode: Mode, dfa: &Path, word: &str) -> Result<Output, CliError> {
    let a = parse_automaton(&read(dfa)?).map_err(|source| CliError::Parse {
        path: dfa.to_owned(),
        source,
    })?;
    let x = a.alphabet().parse_word(word).map_err(CliError::Symbol)?;
    let y = prefix_select(&x, &a, mode)?;
    Ok(Output::ok(format!("{}\n", a.alphabet().render(&y))))
}

fn freq(
    file: &Path,
    source: Source,
    len: usize,
    max_block: usize,
    report: Report,
    tolerance: Option<f64>,
) -> Result<Output, CliError> {
    let t = load_transducer(file)?;
    let r = compare_frequencies(&t, source, len, max_block)?;
    let text = match report {
        Report::Text => r.to_text(),
        Report::Csv => r.to_csv(),
    };
    let code = match tolerance {
        Some(tol) if r.max_deviation() > tol => {
            eprintln!(
                "max deviation {:.6} exceeds tolerance {tol}",
                r.max_deviation()
            );
            1
        }
        _ => 0,
    };
    Ok(Output { text, code })
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Check { file, format } => check(&file, format),
        Command::Info { file } => info(&file),
        Command::Weights {
            file,
            max_len,
            scc,
            dump,
        } => weights(&file, max_len, scc, dump),
        Command::Matrices { file, scc } => matrices(&file, scc),
        Command::Select { mode, dfa, word } => select(mode, &dfa, &word),
        Command::Freq {
            file,
            source,
            len,
            max_block,
            report,
            tolerance,
        } => freq(&file, source, len, max_block, report, tolerance),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
