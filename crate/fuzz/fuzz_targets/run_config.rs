#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = curvlab::RunConfig::from_json(text) {
        assert!(cfg.validate().is_ok());
        let _ = cfg.resolved().to_json();
    }
    // the same bytes as a command line
    let args = std::iter::once("curvlab").chain(text.split_whitespace());
    let _ = curvlab::parse_args(args);
});
