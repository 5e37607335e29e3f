pub struct Settings {
    pub workspace: String,
    pub provider_url: String,
}

pub fn load_settings() -> Settings {
    // config values come from the environment in the real binary
    Settings {
        workspace: "/work".into(),
        provider_url: "https://api.example.org".into(),
    }
}
