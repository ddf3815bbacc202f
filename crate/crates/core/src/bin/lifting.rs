fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(lifting_layers::cli::parse_and_dispatch(std::env::args_os()));
}
