fn main() {
    let outcome = branch_lab::run(std::env::args().skip(1));
    std::process::exit(outcome.code);
}
