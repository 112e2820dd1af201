fn main() {
    std::process::exit(dicke_gmc::cli::run());
}
