fn main() -> std::process::ExitCode {
    muscl::bench::cli::main()
}
