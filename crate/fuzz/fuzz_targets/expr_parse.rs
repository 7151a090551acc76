#![no_main]

use intertwine::cli::parse_expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_expr(text) {
        // evaluation and differentiation must not panic on parsed input
        for x in [-5.0, 0.0, 2.5] {
            let _ = f.eval(x);
        }
        let _ = f.derive(1).eval(0.5);
    }
});
