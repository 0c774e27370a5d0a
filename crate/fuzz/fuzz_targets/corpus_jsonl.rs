#![no_main]
use std::collections::HashSet;

use libfuzzer_sys::fuzz_target;
use topic_drift_core::corpus::parse_corpus;

fuzz_target!(|data: &[u8]| {
    let (corpus, _report) = parse_corpus(data);
    let ids: HashSet<&str> = corpus.documents.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids.len(), corpus.len());
});
