#![no_main]
use std::path::Path;

use libfuzzer_sys::fuzz_target;
use topic_drift::PipelineConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = PipelineConfig::from_json(data, Path::new("/fuzz")) {
        assert!(!cfg.window_labels().is_empty());
    }
});
