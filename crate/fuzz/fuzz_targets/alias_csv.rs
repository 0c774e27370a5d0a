#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::corpus::{build_vocabulary, parse_alias_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(rules) = parse_alias_csv(data) {
        let targets: Vec<&String> = rules.iter().map(|(_, c)| c).collect();
        let _ = build_vocabulary(targets, &rules);
    }
});
