#![no_main]

use augsurf::surface::read_ply;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ply) = read_ply(text) {
            let n = ply.positions.len();
            assert!(ply.triangles.iter().flatten().all(|&i| i < n));
            assert!(ply.channels.iter().all(|(_, v)| v.len() == n));
        }
    }
});
