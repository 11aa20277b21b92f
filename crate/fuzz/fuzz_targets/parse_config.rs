#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = qdot::io::parse_config(text) {
        if let Ok(p) = cfg.resolve() {
            assert!(p.validate().is_ok());
        }
    }
});
