use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use motivic_cli::commands::{run, Command, Flags, EXIT_USAGE};

/// Exact motivic invariants of quotient stacks.
#[derive(Parser)]
#[command(name = "motivic", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Evaluate a class expression such as "[P^2 / GL(3)]".
    Eval {
        expr: String,
        /// Also evaluate at ℓ = 1.
        #[arg(long)]
        at_one: bool,
        /// Also print the virtual Poincaré polynomial (ℓ ↦ z²).
        #[arg(long)]
        poincare: bool,
        #[arg(long)]
        json: bool,
    },
    /// Tabulate E(m) and F(m) for m = 1..=max.
    EffTable {
        #[arg(long)]
        max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Abelianized class of BGL(m).
    Abelianize {
        m: usize,
        #[arg(long)]
        json: bool,
    },
    /// Generalized Euler characteristic of BGL(m).
    Euler {
        m: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a self-check suite.
    Check {
        /// eff-recursion | consistency | mobius-crosscut | operator-algebra | model-pi1
        suite: String,
        #[arg(long)]
        max: usize,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let (cmd, json) = match cli.cmd {
        Sub::Eval {
            expr,
            at_one,
            poincare,
            json,
        } => (
            Command::Eval {
                expr,
                at_one,
                poincare,
            },
            json,
        ),
        Sub::EffTable { max, json } => (Command::EffTable { max }, json),
        Sub::Abelianize { m, json } => (Command::Abelianize { m }, json),
        Sub::Euler { m, json } => (Command::Euler { m }, json),
        Sub::Check { suite, max, json } => (Command::Check { suite, max }, json),
    };
    let out = run(&cmd, Flags::from_env(json));
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
