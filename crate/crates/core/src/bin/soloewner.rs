fn main() -> std::process::ExitCode {
    soloewner::cli::main()
}
