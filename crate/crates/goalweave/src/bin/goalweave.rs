fn main() { std::process::exit(goalweave::cli::run()); }
