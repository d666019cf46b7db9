#![no_main]

use augsurf::mesh::{parse_obj, HalfEdgeMesh};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((mesh, _)) = parse_obj(text) {
            let _ = HalfEdgeMesh::new(mesh);
        }
    }
});
