//! `jmotive`: command-line access to the J-invariant and motive calculators.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jmotive::GroupForm;

/// Environment variable holding the default output mode (`text` or `json`).
pub const OUTPUT_ENV: &str = "JMOTIVE_OUTPUT";

#[derive(Parser, Debug)]
#[command(name = "jmotive", version, about = "J-invariants, Rost motives and idempotent lifting")]
pub struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Emit text even when JMOTIVE_OUTPUT=json.
    #[arg(long, global = true)]
    pub text: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Torsion data and J-invariant restrictions per group form and prime.
    #[command(subcommand, alias = "kac-table")]
    Table(TableCmd),
    /// Admissible J-invariant values.
    #[command(subcommand)]
    Jinv(JinvCmd),
    /// Computations in the truncated Chow ring of the classifying space.
    #[command(subcommand)]
    Ring(RingCmd),
    /// Rost summands and motivic decompositions.
    #[command(subcommand)]
    Motive(MotiveCmd),
    /// Lifting idempotents, isomorphisms and SL matrices.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Poincaré polynomials and generic splitting of flag varieties.
    #[command(subcommand)]
    Flag(FlagCmd),
}

#[derive(Subcommand, Debug)]
pub enum TableCmd {
    /// Rows of the table: one row with --form and --p, else every row up to --max-rank.
    Dump {
        #[arg(long)]
        form: Option<GroupForm>,
        #[arg(long, requires = "form")]
        p: Option<u64>,
        #[arg(long, default_value_t = 8)]
        max_rank: usize,
    },
}

/// A torsion-data row given either by a group form or explicitly.
#[derive(Args, Debug, Clone)]
pub struct RowArgs {
    /// Group form, e.g. F4, E7sc, Spin11, PGL4.
    #[arg(long, conflicts_with_all = ["d", "k"])]
    pub form: Option<GroupForm>,
    /// Torsion prime.
    #[arg(long)]
    pub p: u64,
    /// Generator codimensions d_1,...,d_r (instead of --form).
    #[arg(long, value_delimiter = ',', requires = "k")]
    pub d: Vec<u64>,
    /// Truncation exponents k_1,...,k_r (instead of --form).
    #[arg(long, value_delimiter = ',', requires = "d")]
    pub k: Vec<u32>,
}

#[derive(Subcommand, Debug)]
pub enum JinvCmd {
    /// List every admissible J in lexicographic order.
    Enumerate {
        #[arg(long)]
        form: GroupForm,
        #[arg(long)]
        p: u64,
        /// Largest box size scanned.
        #[arg(long, default_value_t = jmotive::jinvariant::DEFAULT_ENUMERATION_BUDGET)]
        budget: u128,
    },
    /// Test one J against the rules of its row.
    Check {
        #[arg(long)]
        form: GroupForm,
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
pub enum RingCmd {
    /// J-invariant of the subring generated by the given elements.
    JFromGens {
        #[command(flatten)]
        row: RowArgs,
        /// A ring element such as `x1^2 + 2*x2`; repeat for several generators.
        #[arg(long = "gen")]
        gens: Vec<String>,
    },
}

/// Vertices of the Levi part of a standard parabolic.
#[derive(Args, Debug, Clone, Default)]
pub struct ThetaArgs {
    /// Levi vertices theta (Bourbaki numbering); empty for the Borel.
    #[arg(long, value_delimiter = ',', conflicts_with = "outside")]
    pub theta: Vec<usize>,
    /// Vertices outside theta, e.g. `--outside 1` for the parabolic P_1.
    #[arg(long, value_delimiter = ',')]
    pub outside: Vec<usize>,
}

/// Tits data for the generic splitting predicate.
#[derive(Args, Debug, Clone)]
pub struct TitsArgs {
    /// Index of the Tits algebra.
    #[arg(long, requires = "splitting_degree")]
    pub tits_index: Option<u64>,
    /// Degree of a splitting field.
    #[arg(long, requires = "tits_index")]
    pub splitting_degree: Option<u64>,
    /// Declare whether the form is a Pfister form or a maximal neighbour.
    #[arg(long)]
    pub pfister: Option<bool>,
}

#[derive(Subcommand, Debug)]
pub enum MotiveCmd {
    /// Twist multiplicities of the generalized Rost summand in X_theta.
    Decompose {
        #[arg(long)]
        form: GroupForm,
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
        #[command(flatten)]
        theta: ThetaArgs,
        #[command(flatten)]
        tits: TitsArgs,
        /// Accept varieties whose generic splitting is undecided.
        #[arg(long, requires = "tits_index")]
        allow_unknown: bool,
    },
    /// Poincaré polynomial of the generalized Rost summand.
    RostPoincare {
        #[command(flatten)]
        row: RowArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
    },
    /// Canonical p-dimension sum d_i (p^{j_i} - 1).
    Candim {
        #[command(flatten)]
        row: RowArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
    },
    /// Upper bound p^{sum j_i} for the p-part of the torsion index.
    TorsionBound {
        #[command(flatten)]
        row: RowArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
    },
    /// Ranks of rational cycles on the complete flag variety and its square.
    RationalCounts {
        #[arg(long)]
        form: GroupForm,
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
    },
    /// Indecomposable m-positive summands with integral coefficients.
    Integral {
        /// m, a product of torsion primes.
        #[arg(long)]
        m: u64,
        /// Group form; the total is the Poincaré polynomial of X_theta.
        #[arg(long, conflicts_with_all = ["total", "summand"])]
        form: Option<GroupForm>,
        #[command(flatten)]
        theta: ThetaArgs,
        /// `p:j_1,...,j_r` per prime of m; defaults to the maximal J.
        #[arg(long = "j", value_parser = commands::parse_prime_list::<u32>)]
        js: Vec<(u64, Vec<u32>)>,
        /// Total polynomial as ascending coefficients.
        #[arg(long, value_delimiter = ',', requires = "summand")]
        total: Vec<i64>,
        /// `p:c_0,c_1,...`, the summand polynomial for a prime of m.
        #[arg(long, value_parser = commands::parse_prime_list::<i64>)]
        summand: Vec<(u64, Vec<i64>)>,
        /// List every candidate instead of the tie-broken one.
        #[arg(long)]
        all: bool,
    },
}

/// A matrix given as `--modulus m --rows "a,b;c,d"`.
#[derive(Args, Debug, Clone)]
pub struct MatrixArgs {
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Rows separated by `;`, entries by `,`.
    #[arg(long, requires = "modulus", allow_hyphen_values = true)]
    pub rows: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum LiftCmd {
    /// Lift an idempotent mod p to one mod p^n.
    Idempotent {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        random: RandomArgs,
    },
    /// Lift a complete orthogonal family of idempotents.
    Family {
        #[arg(long)]
        modulus: Option<u64>,
        /// One member as `a,b;c,d`; repeat for each member.
        #[arg(long = "member", requires = "modulus", allow_hyphen_values = true)]
        members: Vec<String>,
        #[command(flatten)]
        random: RandomArgs,
        /// Number of members of a random family.
        #[arg(long, default_value_t = 2)]
        parts: usize,
    },
    /// Lift an isomorphism between graded idempotents.
    Izvrat {
        /// JSON file holding phi1, phi2, psi12, psi21.
        #[arg(long)]
        instance: Option<std::path::PathBuf>,
        #[command(flatten)]
        random: RandomArgs,
    },
    /// Lift a matrix of determinant 1 mod m to one of determinant 1 over Z.
    Sl {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Modulus of a random matrix.
        #[arg(long, conflicts_with = "modulus")]
        random_modulus: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
}

/// Parameters of a random demo instance over Z/p^n.
#[derive(Args, Debug, Clone)]
pub struct RandomArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "p", default_value_t = 2)]
    pub prime: u64,
    #[arg(long = "n", default_value_t = 3)]
    pub exponent: u32,
    #[arg(long, default_value_t = 3)]
    pub size: usize,
}

#[derive(Subcommand, Debug)]
pub enum FlagCmd {
    /// Poincaré polynomial of G/P_theta.
    Poincare {
        /// Dynkin type such as F4, or a group form.
        #[arg(long = "type")]
        ty: String,
        #[command(flatten)]
        theta: ThetaArgs,
    },
    /// Whether G splits over the function field of X_theta.
    Split {
        #[arg(long)]
        form: GroupForm,
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long)]
        tits_index: u64,
        #[arg(long)]
        splitting_degree: u64,
        #[arg(long)]
        pfister: Option<bool>,
    },
}

fn main() -> ExitCode {
    let env_json = std::env::var(OUTPUT_ENV).is_ok_and(|v| v.eq_ignore_ascii_case("json"));
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let json = cli.json || (env_json && !cli.text);
    match commands::run(&cli.command) {
        Ok(report) => {
            if json {
                println!("{}", report.json);
            } else {
                println!("{}", report.text.trim_end());
            }
            ExitCode::SUCCESS
        }
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(commands::Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
