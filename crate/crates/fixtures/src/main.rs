use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    match bailin_fixtures::write_fixtures(&dir) {
        Ok(()) => {
            for plan in bailin_fixtures::status_plans() {
                println!(
                    "{:<14} size {:>9.1}bn  loss {:>6.1}bn  ratio {:.4}",
                    plan.status.to_string(),
                    plan.size_bn,
                    plan.loss_bn(),
                    plan.loss_ratio
                );
            }
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
