#![no_main]

use libfuzzer_sys::fuzz_target;
use selfsim::certificates::gronwall_envelope;
use selfsim::runio::read_certificate_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cert) = read_certificate_json(text) {
        let _ = gronwall_envelope(&cert, 1.0, 1.0);
    }
});
