use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use mackey_cli::{catalog, compute, render, verify, CliError, ComputeRequest, Construction, GroupSpec, VerifyRequest};

#[derive(Parser)]
#[command(name = "mackey", version, about = "Exact computations with Mackey and Tambara functors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[command(group(ArgGroup::new("grp").args(["group", "group_json"])))]
struct GroupArgs {
    /// Catalog group name (C1, C2, C3, C4, V4, S3, D8, Q8, Cn).
    #[arg(long, default_value = "C2")]
    group: String,
    /// Path to a group given as {"order": n, "mult": table}.
    #[arg(long)]
    group_json: Option<String>,
}

impl GroupArgs {
    fn spec(&self) -> GroupSpec {
        match &self.group_json {
            Some(p) => GroupSpec::Json(p.clone()),
            None => GroupSpec::Catalog(self.group.clone()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute levels of a Mackey functor or of a construction on it.
    #[command(group(ArgGroup::new("construction").args(["sym", "power", "norm"])))]
    Compute {
        #[command(flatten)]
        group: GroupArgs,
        /// burnside | representable:<gset> | fixedpoint[:<gset>]
        #[arg(long, default_value = "burnside")]
        mackey: String,
        /// Symmetric power degree.
        #[arg(long)]
        sym: Option<usize>,
        /// Indexing G-set T of the power F(T, M).
        #[arg(long)]
        power: Option<String>,
        /// Subgroup class for the norm of the restriction.
        #[arg(long)]
        norm: Option<String>,
        /// Report geometric fixed points instead of values.
        #[arg(long)]
        phi: bool,
        /// Single level G/H; all levels by default.
        #[arg(long)]
        level: Option<String>,
        /// Cross-check against an independent oracle (`oracle`).
        #[arg(long)]
        verify: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        /// One of the suites listed by `catalog`.
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        group: GroupArgs,
        /// Restrict Mackey-functor suites to one functor.
        #[arg(long)]
        mackey: Option<String>,
        /// Size bound on the G-sets enumerated by the suite.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// List built-in groups, example functors and suites.
    Catalog {
        #[arg(long)]
        out: Option<String>,
    },
}

fn emit(text: &str, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Compute { group, mackey, sym, power, norm, phi, level, verify, out } => {
            let construction = match (sym, power, norm) {
                (Some(n), _, _) => Construction::Sym(n),
                (_, Some(t), _) => Construction::Power(t),
                (_, _, Some(h)) => Construction::Norm(h),
                _ => Construction::Value,
            };
            let req = ComputeRequest { group: group.spec(), mackey, construction, phi, level, verify };
            emit(&render(&compute(&req)?), out.as_deref())?;
            Ok(true)
        }
        Command::Verify { suite, group, mackey, bound, out } => {
            let (v, passed) = verify(&VerifyRequest { suite, group: group.spec(), mackey, bound })?;
            emit(&render(&v), out.as_deref())?;
            Ok(passed)
        }
        Command::Catalog { out } => {
            emit(&render(&catalog()), out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprint!("{}", render(&e.to_json()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
