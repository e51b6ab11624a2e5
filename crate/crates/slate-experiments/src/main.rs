fn main() {
    // CLI wiring lands after the pipeline crates; placeholder keeps the
    // binary target building.
    eprintln!("slate CLI: not yet wired");
    std::process::exit(2);
}
