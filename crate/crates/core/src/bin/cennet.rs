fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CENNET_LOG", "info")).init();
    let code = cennet::cli::dispatch(std::env::args_os());
    std::process::ExitCode::from(code as u8)
}
