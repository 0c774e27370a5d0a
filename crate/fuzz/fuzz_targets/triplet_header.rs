#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::corpus::triplet::parse_header;

fuzz_target!(|data: &[u8]| {
    if let Ok(h) = parse_header(data) {
        assert_eq!(h.row_labels.len(), h.n_rows);
    }
});
