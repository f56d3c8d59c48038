#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::workbench::ModelState;

fuzz_target!(|data: &[u8]| {
    if let Ok(state) = ModelState::from_bytes(data) {
        let _ = ModelState::from_bytes(&state.to_bytes());
    }
});
