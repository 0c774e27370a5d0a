#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::corpus::{build_vocabulary, tokenize};

fuzz_target!(|data: &[u8]| {
    let vocab = build_vocabulary(
        ["neural network", "deep learning", "topic model", "text mining", "time"],
        &[("nn", "neural network"), ("topic models", "topic model")],
    )
    .unwrap();
    let text = String::from_utf8_lossy(data);
    let tokens = tokenize(&text);
    let mut end = 0;
    for m in vocab.match_text(&text) {
        assert!(m.start >= end && m.len > 0 && m.start + m.len <= tokens.len());
        assert!(m.term < vocab.len());
        end = m.start + m.len;
    }
});
