use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use rdk_core::classify::DEFAULT_BUDGET;
use serde_json::Value;

use crate::codec::{self, SchemaError};
use crate::commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Exact computations with root data.
///
/// Files are JSON; a missing path or `-` reads standard input. Commands that
/// build data print JSON, so they chain through pipes. A p-morphism from R′
/// to R stores `f: X′ → X` on character lattices, along the arrow, while
/// `tau` sends each root of R to a root of R′.
#[derive(Parser, Debug)]
#[command(name = "rdk", version)]
pub struct Cli {
    /// Print machine-readable JSON for verdicts as well as data.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest automorphism group enumerated before giving up.
    #[arg(long, global = true, env = "RDK_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Override the finite-order search bound of the Steinberg test.
    #[arg(long, global = true)]
    pub max_order: Option<u64>,
    /// Build the literal product even when the input is already smooth.
    #[arg(long, global = true)]
    pub force_construction: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the root datum axioms.
    Validate { file: Option<String> },
    /// Print a catalog datum: `catalog C2 sc`, `catalog A3 "[2,0,0]"` (extra weights), `catalog GL3`.
    Catalog {
        label: String,
        selector: Option<String>,
    },
    /// Print the dual datum.
    Dual { file: Option<String> },
    /// Build a central product from a spec `{"r1","r2","a","h1","h2"}`.
    Cproduct { file: Option<String> },
    /// Derived part, radical, A and K of a datum.
    Recover { file: Option<String> },
    /// Isomorphism classes of products for a triple (or the triple of a datum).
    Classify { file: Option<String> },
    /// Decide whether two data are isomorphic.
    Isomorphic { a: String, b: String },
    /// p-morphisms: validation, Steinberg and Frobenius tests, duality
    #[command(subcommand)]
    Morphism(MorphismCommand),
    /// Smooth regular embeddings and their checks
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Completions, coverings and cyclic blocks for Asai-type settings
    #[command(subcommand)]
    Asai(AsaiCommand),
}

#[derive(Args, Debug)]
pub struct Ends {
    /// Source datum R′.
    #[arg(long)]
    pub source: String,
    /// Target datum R (defaults to the source).
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum MorphismCommand {
    /// Check a p-morphism against its source and target.
    Validate {
        file: Option<String>,
        #[command(flatten)]
        ends: Ends,
    },
    /// Decide whether some power of f is a p-power scalar.
    Steinberg { file: Option<String> },
    /// Decide whether f is q·(finite order) with q a power of p.
    Frobenius { file: Option<String> },
    /// Transpose to the dual data.
    Dualize { file: Option<String> },
}

#[derive(Subcommand, Debug)]
pub enum EmbedCommand {
    /// Smooth regular embedding R ⊕_A R° → R, with the lift of F.
    Smooth {
        file: Option<String>,
        /// `split:q=N`, `twisted:q=N[,index=I]` or a p-morphism file.
        #[arg(long)]
        frobenius: Option<String>,
    },
    /// Smooth embedding with a torus of rank s for a Frobenius map on a simple datum.
    Optimal {
        file: Option<String>,
        #[arg(long)]
        frobenius: String,
    },
    /// Classify f: R′ → R as derived, p-regular or smooth.
    Check {
        file: Option<String>,
        #[command(flatten)]
        ends: Ends,
        #[arg(long)]
        p: u64,
        /// Steinberg endomorphism of the target to lift.
        #[arg(long)]
        frobenius: Option<String>,
    },
    /// The rank-one torus obstruction for the Suzuki map on C2.
    Suzuki {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 10)]
        s_max: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum AsaiCommand {
    /// Complete two derived embeddings `{"datum","p1"[,"psi"]}` of a base datum.
    Complete {
        base: String,
        first: String,
        second: String,
        #[arg(long)]
        frobenius: Option<String>,
    },
    /// Smooth covering: the dual of the smooth embedding of the dual.
    Cover {
        file: Option<String>,
        #[arg(long)]
        frobenius: Option<String>,
    },
    /// Blockwise smooth embedding for F permuting blocks cyclically.
    Cyclic {
        blocks: Vec<String>,
        #[arg(long)]
        frobenius: String,
    },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: format!("schema error at {e}"),
        }
    }
}

impl From<rdk_core::Error> for Failure {
    fn from(e: rdk_core::Error) -> Self {
        let code = match e {
            rdk_core::Error::BudgetExceeded { .. } => EXIT_BUDGET,
            rdk_core::Error::Refused(_) => EXIT_NEGATIVE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// What a command produced. `text: None` means the output is data and is
/// always printed as JSON.
pub struct Report {
    pub value: Value,
    pub text: Option<String>,
    pub negative: bool,
}

impl Report {
    pub fn data(value: Value) -> Self {
        Report {
            value,
            text: None,
            negative: false,
        }
    }

    pub fn verdict(value: Value, text: String, negative: bool) -> Self {
        Report {
            value,
            text: Some(text),
            negative,
        }
    }
}

/// Reads input files, with standard input behind `-` or a missing path.
pub struct Inputs<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl<'a> Inputs<'a> {
    pub fn load(&mut self, path: Option<&str>) -> Outcome<Value> {
        let text = match path {
            None | Some("-") => {
                if self.stdin_used {
                    return Err(Failure {
                        code: EXIT_INPUT,
                        message: "standard input can be read only once".into(),
                    });
                }
                self.stdin_used = true;
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| Failure {
                    code: EXIT_INPUT,
                    message: format!("reading standard input: {e}"),
                })?;
                s
            }
            Some(p) => std::fs::read_to_string(p).map_err(|e| Failure {
                code: EXIT_INPUT,
                message: format!("{p}: {e}"),
            })?,
        };
        Ok(codec::parse(&text)?)
    }
}

/// Runs one command line; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let mut inputs = Inputs {
        stdin,
        stdin_used: false,
    };
    match commands::dispatch(&cli, &mut inputs) {
        Ok(report) => {
            let printed = match (&report.text, cli.json) {
                (Some(text), false) => writeln!(out, "{text}"),
                _ => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report.value).expect("serialisable")
                ),
            };
            if printed.is_err() {
                return EXIT_INPUT;
            }
            if report.negative {
                EXIT_NEGATIVE
            } else {
                EXIT_OK
            }
        }
        Err(f) => {
            let _ = writeln!(err, "rdk: {}", f.message);
            f.code
        }
    }
}
