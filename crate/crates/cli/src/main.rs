use clap::Parser;
use potlab::commands::{run, Cli};

fn main() {
    if let Ok(threads) = std::env::var("POTLAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                // ignore the error when a global pool already exists
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
