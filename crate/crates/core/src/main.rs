fn main() {
    std::process::exit(padic_volkenborn::cli::run(std::env::args_os()));
}
