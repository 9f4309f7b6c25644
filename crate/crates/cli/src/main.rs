use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = packet_purity_cli::run(std::env::args_os()).and_then(|out| {
        let code = out.exit_code;
        out.deliver().map(|body| (body, code))
    });
    match result {
        Ok((body, code)) => {
            if let Some(body) = body {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                    return ExitCode::from(packet_purity_cli::EXIT_USAGE);
                }
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("packet-purity: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
