use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdd_cli::{run_config_file, schema::SCHEMA, Written};

#[derive(Parser)]
#[command(
    name = "qdd",
    version,
    about = "Dynamical-decoupling experiments on dilated quantum semigroups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        #[arg(required_unless_present = "print_schema")]
        config: Option<PathBuf>,
        /// Directory for the output file (overrides the directory in the config).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Print the config format and exit.
        #[arg(long)]
        print_schema: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run {
        config,
        out,
        print_schema,
    } = cli.command;
    if print_schema {
        print!("{SCHEMA}");
        return ExitCode::SUCCESS;
    }
    let config = config.expect("clap enforces the config argument");
    match run_config_file(&config, out.as_deref()) {
        Ok(Written::File(path)) => {
            eprintln!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Ok(Written::Stdout(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qdd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
