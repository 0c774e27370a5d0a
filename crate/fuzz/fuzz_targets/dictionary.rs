#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::corpus::{build_vocabulary, parse_dictionary};

fuzz_target!(|data: &[u8]| {
    let terms = parse_dictionary(&String::from_utf8_lossy(data));
    if let Ok(vocab) = build_vocabulary(&terms, &Vec::<(String, String)>::new()) {
        for (i, t) in vocab.terms().iter().enumerate() {
            assert_eq!(vocab.index_of(t), Some(i));
        }
    }
});
