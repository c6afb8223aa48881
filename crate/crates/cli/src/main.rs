use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let inv = floorlog_cli::run_args(std::env::args_os());
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().lock().write_all(inv.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(inv.stderr.as_bytes());
    ExitCode::from(inv.code)
}
