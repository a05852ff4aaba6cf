use env_logger::Env;

fn main() {
    env_logger::Builder::from_env(Env::new().filter_or("CSOS_LOG", "warn")).init();
    let (code, _) = csos_cli::run(std::env::args_os());
    std::process::exit(code);
}
