#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::{RawTable, Side, TablePair};

// Whatever ingests must survive a write and re-read unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(left) = RawTable::from_reader(data, "id", "left") else { return };
    let Ok(tables) = TablePair::align(left.clone(), left) else { return };
    let mut out = Vec::new();
    tables.write_side(Side::Left, "id", &mut out).unwrap();
    let again = RawTable::from_reader(out.as_slice(), "id", "left").unwrap();
    let again = TablePair::align(again.clone(), again).unwrap();
    assert_eq!(again.left(), tables.left());
});
