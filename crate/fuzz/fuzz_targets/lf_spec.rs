#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::lf::{evaluate, validate, CorpusCache, LabelFunctionSpec};
use matchwork_core::{CandidatePair, RawTable, TablePair};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = LabelFunctionSpec::from_toml(text) else { return };
    let canonical = spec.to_toml();
    let reparsed = LabelFunctionSpec::from_toml(&canonical).expect("canonical form parses");
    assert_eq!(reparsed.version(), spec.version());

    let left = RawTable::from_reader("id,name,price\nl,Sony Bravia 40\" LCD,499.99\n".as_bytes(), "id", "left").unwrap();
    let right = RawTable::from_reader("id,name,price\nr,sony bravia 46 inch,\n".as_bytes(), "id", "right").unwrap();
    let tables = TablePair::align(left, right).unwrap();
    if validate(&spec, tables.schema()).is_empty() {
        let pair = CandidatePair {
            left_id: "l".into(),
            right_id: "r".into(),
            block_key: String::new(),
            similarity_hint: 0.0,
        };
        let _ = evaluate(&spec, &pair, &tables, &CorpusCache::new());
    }
});
