#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = qdot::io::parse_grid(text) {
        assert!(!grid.is_empty() && grid.len() <= qdot::io::MAX_GRID_POINTS);
        assert!(grid.iter().all(|x| x.is_finite()));
    }
});
