#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Anything accepted must be a usable algebra.
    if let Ok(alg) = curvlab_core::io::parse_algebra(text) {
        let n = alg.dim();
        let e = alg.basis_vector(0);
        let f = alg.basis_vector(n - 1);
        let _ = alg.bracket(&e, &f);
    }
});
