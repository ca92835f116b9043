use std::process::ExitCode;

fn main() -> ExitCode {
    match kpz_lab_cli::run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kpz-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
