use gmrf_pathsum::cli;

fn main() {
    cli::init_logging();
    let code = cli::main_with_args(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
