fn main() {
    // XUBE_LOG controls stderr log verbosity (error|warn|info|debug|trace).
    env_logger::Builder::from_env(env_logger::Env::new().filter("XUBE_LOG")).init();
    std::process::exit(xube::cli::run());
}
