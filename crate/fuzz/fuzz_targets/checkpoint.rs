#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::dnae::{load_checkpoint, save_checkpoint};

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = load_checkpoint(data) {
        assert!(model.min_weight() >= 0.0);
        let again = load_checkpoint(&save_checkpoint(&model)).unwrap();
        assert_eq!(again, model);
    }
});
