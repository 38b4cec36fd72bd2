fn main() {
    std::process::exit(lambda_mixer::run(std::env::args_os()));
}
