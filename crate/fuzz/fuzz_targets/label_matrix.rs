#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::LabelMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(matrix) = LabelMatrix::from_bytes(data) else { return };
    let bytes = matrix.to_bytes();
    assert_eq!(LabelMatrix::from_bytes(&bytes).unwrap(), matrix);
    for j in 0..matrix.lf_ids().len() {
        assert_eq!(matrix.column(j).len(), matrix.n_pairs());
    }
});
