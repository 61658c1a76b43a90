use std::process::ExitCode;

fn main() -> ExitCode {
    ncmin::app::run()
}
