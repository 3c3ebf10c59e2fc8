use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = randassign::cli::run(&args, &mut out, &mut std::io::stderr());
    let _ = out.flush();
    ExitCode::from(code)
}
