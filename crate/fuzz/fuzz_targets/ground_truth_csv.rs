#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::GroundTruth;

fuzz_target!(|data: &[u8]| {
    let Ok(gt) = GroundTruth::read(data) else { return };
    let mut out = Vec::new();
    gt.write(&mut out).unwrap();
    assert_eq!(GroundTruth::read(out.as_slice()).unwrap(), gt);
});
