#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::workbench::ProjectConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = ProjectConfig::from_toml(text) {
        assert_eq!(ProjectConfig::from_toml(&config.to_toml()).unwrap(), config);
        let _ = config.blocking.signature_mode();
    }
});
