#![no_main]

use libfuzzer_sys::fuzz_target;
use meson_eff_cli::parse_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(layer) = parse_config(text) {
            let _ = layer.resolve();
        }
    }
});
