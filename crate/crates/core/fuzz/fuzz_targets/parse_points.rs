#![no_main]

use augsurf::curve::parse_points;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(pts) = parse_points(text) {
            assert!(pts.iter().all(|p| p.iter().all(|c| c.is_finite())));
        }
    }
});
