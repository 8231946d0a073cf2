fn main() {
    std::process::exit(qlink_tool::run(std::env::args_os()));
}
