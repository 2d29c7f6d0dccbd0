#![no_main]

use libfuzzer_sys::fuzz_target;
use meson_eff_cli::{parse_angle, parse_observable, parse_quasispin};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_angle(text);
        let _ = parse_quasispin(text);
        let _ = parse_observable(text);
    }
});
