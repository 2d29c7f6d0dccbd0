#![no_main]

use libfuzzer_sys::fuzz_target;
use meson_eff_cli::{parse_basis, parse_policy, Figure, SystemPreset, TimeUnit};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_basis(text);
        let _ = parse_policy(text);
        let _ = text.parse::<Figure>();
        let _ = text.parse::<SystemPreset>();
        let _ = text.parse::<TimeUnit>();
    }
});
