#![no_main]

use libfuzzer_sys::fuzz_target;
use selfsim::runio::{entropy_column, read_diagnostics_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(records) = read_diagnostics_csv(text) {
        let _ = entropy_column(&records, 1.0);
    }
});
