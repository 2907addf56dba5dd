//! `ualg`: command-line front end for finite universal algebra checks.
//!
//! Exit status: 0 when the checked property holds, 1 when it fails (with
//! `WITNESS ...` lines on stdout), 2 on input or usage errors.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ualg", version, about = "Finite universal algebra workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse and validate an algebra file.
    Validate { file: String },
    /// Check an identity in one algebra.
    Sat {
        /// FILE[:NAME]
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        equation: String,
    },
    /// Check an identity in every algebra of the given files.
    ClassSat {
        #[arg(long)]
        equation: String,
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// List the non-trivial identities of bounded depth holding in a class.
    Theory {
        #[arg(long)]
        depth: usize,
        /// Number of variables, named v0, v1, ...
        #[arg(long)]
        vars: usize,
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Classify a carrier map between two algebras.
    Hom {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        /// Images of 0, 1, ..., space separated.
        #[arg(long)]
        map: String,
    },
    /// Enumerate homomorphisms between two algebras.
    HomFind {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        #[arg(long)]
        surjective: bool,
        #[arg(long)]
        injective: bool,
        /// Stop after the first homomorphism.
        #[arg(long)]
        first: bool,
    },
    /// Factor g through a surjective h: find phi with g = phi . h.
    Factor {
        /// Common source of g and h.
        #[arg(long)]
        src: String,
        /// Target of g.
        #[arg(long)]
        g_dst: String,
        /// Target of h.
        #[arg(long)]
        h_dst: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Build the free algebra of the class generated by the given files.
    Free {
        #[arg(long)]
        vars: usize,
        /// Write the algebra to PATH and element representatives to PATH.repr.
        #[arg(long)]
        out: Option<String>,
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Check an equational proof against axioms and a goal.
    EntailCheck {
        #[arg(long)]
        axioms: String,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        proof: String,
    },
    /// Search for an equational proof of bounded height.
    EntailSearch {
        #[arg(long)]
        axioms: String,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Largest intermediate term visited by transitivity steps.
        #[arg(long, default_value_t = 16)]
        max_term_size: usize,
    },
    /// Run both directions of the variety theorem on a class.
    BirkhoffDemo {
        /// Variables of the free algebra reported for the class.
        #[arg(long)]
        vars: usize,
        /// Check this algebra (FILE[:NAME]) against --cert instead of the
        /// certificates derived from squares of class members.
        #[arg(long, requires = "cert")]
        target: Option<String>,
        #[arg(long, requires = "target")]
        cert: Option<String>,
        #[arg(required = true)]
        files: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(2)
        }
    }
}
