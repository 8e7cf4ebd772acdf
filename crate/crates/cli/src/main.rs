fn main() {
    std::process::exit(curvlab::main_with_args(std::env::args_os()));
}
