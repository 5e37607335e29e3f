fn main() {
    // Config is read once at startup; everything else is injected.
    let settings = core::load_settings();
    println!("workspace: {}", settings.workspace);
}
