use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (code, out) = pietsch::cli::run(&args);
    println!("{out}");
    ExitCode::from(code as u8)
}
