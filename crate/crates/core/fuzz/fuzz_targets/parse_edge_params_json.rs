#![no_main]

use augsurf::mesh::parse_edge_params_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_edge_params_json(text);
    }
});
