fn main() {
    // Placeholder while the library surface lands; replaced by the real
    // command-line driver.
    eprintln!("polaron: not yet wired");
    std::process::exit(2);
}
