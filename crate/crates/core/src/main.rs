use std::io;
use std::process::ExitCode;

use pct_impact::report::cli::execute;
use pct_impact::report::config::SEED_ENV;

fn main() -> ExitCode {
    let env_seed = std::env::var(SEED_ENV).ok();
    let code = execute(
        std::env::args_os(),
        env_seed.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
