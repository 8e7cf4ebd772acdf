#![no_main]

use libfuzzer_sys::fuzz_target;
use curvlab_core::io::{parse_matrix_file, MatrixFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if parse_matrix_file(text).is_ok() {
        // accepted files survive a serialize/parse round trip
        let file = MatrixFile::parse(text).expect("parsed once");
        assert!(parse_matrix_file(&file.to_json()).is_ok());
    }
});
