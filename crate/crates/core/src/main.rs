fn main() {
    std::process::exit(fullgroup_lab::cli::main_with_args(std::env::args_os()));
}
