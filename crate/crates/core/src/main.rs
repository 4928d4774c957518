fn main() -> std::process::ExitCode {
    nonlocal_heat::cli::main()
}
