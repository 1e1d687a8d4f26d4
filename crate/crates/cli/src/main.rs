use std::path::PathBuf;

fn main() {
    let out_dir = std::env::var_os(birkhoff_cli::OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    std::process::exit(birkhoff_cli::run(std::env::args_os(), out_dir.as_deref()));
}
