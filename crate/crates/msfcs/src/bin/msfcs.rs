use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use msfcs::cli::{self, CommandKind, Format, RunConfig};
use msfcs::Result;

#[derive(Parser)]
#[command(name = "msfcs", version, about = "Coherent-state observables in a magnetic-solenoid field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Means and spreads, one row per state in the sweep.
    ///
    /// Columns: re_z1, im_z1, re_z2, im_z2, j, norm, norm_err, n1_mean, n2_mean, re_a1, im_a1,
    /// re_a2, im_a2, x_mean, y_mean, r2_mean, rc2_mean, r_mean, rc_mean, jz_mean, var_n1,
    /// var_n2, var_xy, d_offset, cross_kernel.
    Means(IoArgs),
    /// Mean trajectory of one state over time (or x- on the light cone).
    ///
    /// Columns: time, x_mean, y_mean, |a1|, arg(a1), norm, R2_mean, circle_residual.
    Evolve(IoArgs),
    /// Closed-form classical orbit checked against an RK4 integration.
    ///
    /// Columns: t, x, y, z, P1, P2, P3, |a1|, |a2|, Lz, rk4_error.
    Classical(IoArgs),
    /// Probability density on a polar grid (midpoints in rho).
    ///
    /// Columns: rho, phi, x, y, density.
    Density(IoArgs),
    /// Exact values against the asymptotic forms; JSON output is keyed by claim.
    ///
    /// Columns: claim, re_z1, im_z1, re_z2, im_z2, j, u, v, regime, status, exact, asymptotic,
    /// abs_diff, predicted_order.
    Regimes(IoArgs),
    /// Run the acceptance checks and print PASS/FAIL per criterion.
    ///
    /// Columns: id, name, passed, seconds, detail.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct IoArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides `output.path`. Standard output when neither is given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Criterion ids to run (repeatable); all when omitted.
    #[arg(long)]
    only: Vec<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn emit(table: &cli::Table, kind: CommandKind, cfg: Option<&RunConfig>, out: Option<PathBuf>, format: Format) -> Result<()> {
    match out {
        Some(path) => cli::write_outputs(table, kind, cfg, &path, format),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let (kind, io) = match cli.command {
        Command::Means(a) => (CommandKind::Means, a),
        Command::Evolve(a) => (CommandKind::Evolve, a),
        Command::Classical(a) => (CommandKind::Classical, a),
        Command::Density(a) => (CommandKind::Density, a),
        Command::Regimes(a) => (CommandKind::Regimes, a),
        Command::Verify(v) => {
            let (results, table) = cli::cmd_verify(&v.only);
            for r in &results {
                println!(
                    "{:>2} {:<30} {} ({:.2}s) {}",
                    r.id,
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.seconds,
                    r.detail
                );
            }
            if let Some(path) = v.out {
                let format = v.format.map(Format::from).unwrap_or_default();
                cli::write_outputs(&table, CommandKind::Verify, None, &path, format)?;
            }
            return Ok(if results.iter().all(|r| r.passed) { 0 } else { 3 });
        }
    };
    let cfg = RunConfig::load(&io.config)?;
    let format = io.format.map(Format::from).unwrap_or(cfg.output.format);
    let out = io.out.or_else(|| cfg.output.path.clone());
    let table = cli::run_command(kind, &cfg)?;
    emit(&table, kind, Some(&cfg), out, format)?;
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("msfcs: error[{}]: {e}", e.key());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
