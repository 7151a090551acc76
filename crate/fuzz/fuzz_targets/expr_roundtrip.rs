#![no_main]

use intertwine::cli::parse_expr;
use libfuzzer_sys::fuzz_target;

// Printing then reparsing is a fixed point of the printer.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(f) = parse_expr(text) else { return };
    let printed = f.to_string();
    let g = parse_expr(&printed).unwrap_or_else(|e| panic!("printed form {printed:?} does not parse: {e}"));
    assert_eq!(g.to_string(), printed);
});
