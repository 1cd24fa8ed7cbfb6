fn main() {
    std::process::exit(graph_poincare::cli::run_command(std::env::args_os()));
}
