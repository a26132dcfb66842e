fn main() {
    std::process::exit(fwreduce::cli::run_from_env());
}
