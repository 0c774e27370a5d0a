#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::diffusion::{decode_topic_binary, encode_topic_binary};

fuzz_target!(|data: &[u8]| {
    if let Ok(u) = decode_topic_binary(data) {
        assert_eq!(encode_topic_binary(&u), data);
    }
});
