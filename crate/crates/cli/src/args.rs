use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evoclass::classify::Method;
use evoclass::ideals::CountMethod;
use evoclass::search::Relation;
use evoclass::MonomialOrder;

#[derive(Parser, Debug)]
#[command(name = "evoclass", version, about = "Classify evolution algebras over finite fields")]
pub struct Cli {
    /// Worker threads for classification runs.
    #[arg(long, global = true, env = "EVOCLASS_THREADS")]
    pub threads: Option<usize>,

    /// Override a cap, e.g. `--cap isotopism-max-q=5`. Repeatable.
    #[arg(long = "cap", global = true, value_name = "KEY=VALUE")]
    pub caps: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Field order (a prime power).
    #[arg(long, conflicts_with_all = ["p", "k"])]
    pub q: Option<u64>,
    /// Field characteristic.
    #[arg(long)]
    pub p: Option<u64>,
    /// Extension degree, used with `--p`.
    #[arg(long, requires = "p")]
    pub k: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Left algebra as an inline literal, e.g. "1,0;0,0".
    #[arg(long, required_unless_present = "left_file", conflicts_with = "left_file")]
    pub left: Option<String>,
    /// Left algebra from a JSON document.
    #[arg(long)]
    pub left_file: Option<PathBuf>,
    /// Right algebra as an inline literal.
    #[arg(long, required_unless_present = "right_file", conflicts_with = "right_file")]
    pub right: Option<String>,
    /// Right algebra from a JSON document.
    #[arg(long)]
    pub right_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List every algebra of the given dimension in enumeration order.
    Enumerate {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Search for a witness relating two algebras.
    Check {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "isomorphism")]
        relation: Relation,
    },
    /// Partition all algebras of a dimension into classes.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "isomorphism")]
        relation: Relation,
        #[arg(long, default_value = "bruteforce")]
        method: Method,
        #[arg(long, default_value = "grevlex")]
        order: MonomialOrder,
        /// Include full member lists.
        #[arg(long)]
        members: bool,
        /// Include wall-clock time (makes output run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Consolidated report over GF(2), GF(3), GF(5) and GF(7).
    Tables {
        /// Restrict to these field orders.
        #[arg(long = "only", value_delimiter = ',')]
        only: Vec<u64>,
        #[arg(long)]
        timing: bool,
    },
    /// Count the maps relating two algebras as points of a polynomial ideal.
    CountMaps {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "isomorphism")]
        relation: Relation,
        #[arg(long, default_value = "groebner")]
        method: CountMethod,
        #[arg(long, default_value = "grevlex")]
        order: MonomialOrder,
        /// Encode invertibility with an auxiliary variable instead of a power of the determinant.
        #[arg(long)]
        rabinowitsch: bool,
    },
    /// Reduced Gröbner basis of the ideal generated by the given polynomials.
    Groebner {
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated variable names, greatest first.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        #[arg(long, default_value = "grevlex")]
        order: MonomialOrder,
        /// Generators such as "x^2*y - 1". Repeatable.
        #[arg(required = true)]
        polys: Vec<String>,
    },
}
