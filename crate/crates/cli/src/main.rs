mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Report;

/// Finite-model tools and a cyclic proof checker for first-order logic with
/// inductive definitions.
#[derive(Parser)]
#[command(name = "folid", version)]
struct Cli {
    /// Print results as JSON (keys sorted).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct SigArg {
    /// Signature and production rules (`.folid`).
    #[arg(long = "sig", value_name = "FILE")]
    pub sig: PathBuf,
}

#[derive(Args, Clone)]
pub struct ModelArgs {
    #[command(flatten)]
    pub sig: SigArg,
    /// Finite structure (`.model` JSON).
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
}

#[derive(Args, Clone)]
pub struct TermModelArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Term depth bound.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Number of name constants.
    #[arg(long, default_value_t = 8)]
    pub budget: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check proofs: local rule instances, then the global trace condition.
    CheckProof {
        #[arg(required = true, value_name = "PROOF")]
        proofs: Vec<PathBuf>,
        #[command(flatten)]
        sig: SigArg,
    },
    /// Least fixpoint of the rules over a structure.
    Lfp {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Whether the structure interprets every inductive predicate as its
    /// least fixpoint.
    StandardCheck {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Evaluate a formula, or check a sequent for validity.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, conflicts_with = "sequent", required_unless_present = "sequent")]
        formula: Option<String>,
        #[arg(long)]
        sequent: Option<String>,
        /// Variable assignment `x=0`; repeatable.
        #[arg(long = "assign", value_name = "VAR=ELEM")]
        assign: Vec<String>,
    },
    /// The k-fold unfolding of an inductive predicate.
    Unfold {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        pred: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Also compare every unfolding up to k with the Kleene stages here.
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
    },
    /// Term model of a name-extended structure.
    Termmodel {
        #[command(flatten)]
        args: TermModelArgs,
        /// Write the term model as a `.model` file over representatives.
        #[arg(long, value_name = "FILE")]
        export: Option<PathBuf>,
    },
    /// Codes of terms and formulas, decoding, and coded membership search.
    Code {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long, group = "what")]
        term: Option<String>,
        #[arg(long, group = "what")]
        formula: Option<String>,
        #[arg(long, group = "what", value_name = "CODE")]
        decode: Option<String>,
        /// Search for a stage witness of `PRED(term)`; needs --model.
        #[arg(long, value_name = "PRED", requires_all = ["term", "model"])]
        search: Option<String>,
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Derive a truth valuation from a term model, check its clauses, and
    /// compare coded membership search with it.
    ApproxTruth {
        #[command(flatten)]
        args: TermModelArgs,
        /// Print-length bound for the checked fragment.
        #[arg(long, default_value_t = 80)]
        size: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Corpus formula; repeatable. A generated corpus is used if absent.
        #[arg(long)]
        formula: Vec<String>,
        /// Size of the generated corpus.
        #[arg(long, default_value_t = 40)]
        corpus: usize,
    },
    /// Relativize an arithmetic formula and print the reduction sequent.
    TranslatePa {
        #[arg(long)]
        formula: String,
    },
    /// Explain why a proof fails the trace condition, along a lasso.
    ExplainTrace {
        proof: PathBuf,
        #[command(flatten)]
        sig: SigArg,
        /// Node ids of the stem, comma separated.
        #[arg(long, value_delimiter = ',', requires = "cycle")]
        stem: Vec<u64>,
        /// Node ids of the cycle, comma separated.
        #[arg(long, value_delimiter = ',')]
        cycle: Vec<u64>,
    },
}

fn run(cli: Cli) -> Result<Report, String> {
    match cli.command {
        Command::CheckProof { proofs, sig } => commands::check_proof(&proofs, &sig),
        Command::Lfp { model } => commands::lfp(&model),
        Command::StandardCheck { model } => commands::standard_check(&model),
        Command::Eval {
            model,
            formula,
            sequent,
            assign,
        } => commands::eval(&model, formula.as_deref(), sequent.as_deref(), &assign),
        Command::Unfold { sig, pred, k, model } => commands::unfold(&sig, &pred, k, model.as_deref()),
        Command::Termmodel { args, export } => commands::termmodel(&args, export.as_deref()),
        Command::Code {
            sig,
            term,
            formula,
            decode,
            search,
            model,
            k,
            depth,
            budget,
        } => match (search, model) {
            (Some(pred), Some(model)) => {
                let args = TermModelArgs {
                    model: ModelArgs { sig, model },
                    depth,
                    budget,
                };
                commands::code_search(&args, &pred, term.as_deref().unwrap_or_default(), k)
            }
            _ => commands::code(&sig, term.as_deref(), formula.as_deref(), decode.as_deref()),
        },
        Command::ApproxTruth {
            args,
            size,
            k,
            formula,
            corpus,
        } => commands::approx_truth(&args, size, k, &formula, corpus),
        Command::TranslatePa { formula } => commands::translate_pa(&formula),
        Command::ExplainTrace {
            proof,
            sig,
            stem,
            cycle,
        } => commands::explain_trace(&proof, &sig, &stem, &cycle),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let json = cli.json;
    match run(cli) {
        Ok(report) => {
            report.print(json);
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("folid: {message}");
            ExitCode::from(2)
        }
    }
}
