use std::fs::File;
use std::io::{self, BufWriter, Read};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use homotopy_roots::cli::{dump_paths, parse_input, render_response, run, Status};
use homotopy_roots::{PathChoice, StartSystem};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StartArg {
    Unit,
    Gamma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PathArg {
    Line,
    Parabola,
}

/// Find all complex roots of a polynomial by homotopy continuation.
///
/// INPUT is either comma-separated real coefficients in ascending order
/// ("-1,0,1" is x^2 - 1) or a JSON document
/// {"coefficients": [[re, im], ...], ...}. It is read from standard input
/// when omitted. Flags override fields of the document.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(allow_hyphen_values = true)]
    input: Option<String>,
    /// Initial number of parameter steps; doubled on each restart.
    #[arg(long)]
    steps: Option<usize>,
    /// Backward-error tolerance every tracked sample must meet.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the α-test on simple roots.
    #[arg(long)]
    no_certify: bool,
    /// Write every tracked sample as CSV to FILE.
    #[arg(long, value_name = "FILE")]
    dump_paths: Option<String>,
    #[arg(long, value_enum)]
    start: Option<StartArg>,
    /// Path shape for targets with simple roots.
    #[arg(long, value_enum)]
    path: Option<PathArg>,
    #[arg(long)]
    max_restarts: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.input {
        Some(s) => s.clone(),
        None => {
            let mut s = String::new();
            if let Err(e) = io::stdin().read_to_string(&mut s) {
                eprintln!("error: reading standard input: {e}");
                return ExitCode::from(2);
            }
            s
        }
    };
    let mut request = match parse_input(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if args.steps.is_some() {
        request.steps = args.steps;
    }
    if args.tol.is_some() {
        request.tol = args.tol;
    }
    if args.seed.is_some() {
        request.seed = args.seed;
    }
    if args.no_certify {
        request.certify = Some(false);
    }
    if args.dump_paths.is_some() {
        request.dump_paths = args.dump_paths.clone();
    }
    if let Some(s) = args.start {
        request.start = Some(match s {
            StartArg::Unit => StartSystem::Unit,
            StartArg::Gamma => StartSystem::Gamma,
        });
    }
    if let Some(p) = args.path {
        request.path = Some(match p {
            PathArg::Line => PathChoice::Line,
            PathArg::Parabola => PathChoice::Parabola,
        });
    }
    if args.max_restarts.is_some() {
        request.max_restarts = args.max_restarts;
    }
    if let Err(e) = request.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    let output = run(&request);
    print!("{}", render_response(&output.response));
    if let Some(d) = &output.response.diagnostics {
        eprintln!(
            "route {:?}, {} restarts, {} Newton steps, escape radius {:e}",
            d.route, d.restarts_used, d.total_newton_steps, d.escape_radius
        );
    }
    if let Some(target) = &request.dump_paths {
        let written = File::create(target).and_then(|f| dump_paths(&output.paths, BufWriter::new(f)));
        if let Err(e) = written {
            eprintln!("error: writing {target}: {e}");
            return ExitCode::from(3);
        }
    }
    match output.response.status {
        Status::Success => ExitCode::SUCCESS,
        Status::Failure => {
            if let Some(e) = &output.response.error {
                eprintln!("error: {e}");
            }
            ExitCode::from(3)
        }
    }
}
