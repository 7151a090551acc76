#![no_main]

use intertwine::cli::scenario::compile_check;
use intertwine::cli::parse_scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scn) = parse_scenario(text) {
        let _ = compile_check(&scn);
    }
});
