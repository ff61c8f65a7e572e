#![no_main]

use libfuzzer_sys::fuzz_target;
use selfsim::runio::read_profile_table;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = read_profile_table(text);
});
