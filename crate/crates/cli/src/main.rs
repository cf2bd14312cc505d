use std::process::ExitCode;

use spectral_lab_cli::{parse_config, run_and_emit};

fn main() -> ExitCode {
    let config = match parse_config(std::env::args_os()) {
        Ok(config) => config,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                print!("{e}");
            } else {
                eprint!("{e}");
                if !e.to_string().ends_with('\n') {
                    eprintln!();
                }
            }
            return ExitCode::from(code);
        }
    };
    let code = run_and_emit(&config, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code)
}
