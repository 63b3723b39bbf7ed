fn main() {
    std::process::exit(clarr::run_cli());
}
