use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus")));
    if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| infodelta_corpus::generate(&dir)) {
        eprintln!("make-corpus: {}: {e}", dir.display());
        return ExitCode::FAILURE;
    }
    println!("wrote corpus to {}", dir.display());
    ExitCode::SUCCESS
}
