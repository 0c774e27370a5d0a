#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::diffusion::{decode_topic_csv, encode_topic_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok((u, terms)) = decode_topic_csv(data, "w") {
        let csv = encode_topic_csv(&u, &terms).unwrap();
        let (back, back_terms) = decode_topic_csv(csv.as_bytes(), "w").unwrap();
        assert_eq!(back, u);
        assert_eq!(back_terms, terms);
    }
});
