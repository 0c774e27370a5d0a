#![no_main]
use libfuzzer_sys::fuzz_target;
use topic_drift_core::corpus::triplet::{decode_triplets, encode_triplets, TripletHeader};
use topic_drift_core::corpus::SparseMatrix;

fn header(value_type: &str) -> TripletHeader {
    TripletHeader {
        format: "sparse-triplet".into(),
        version: 1,
        value_type: value_type.into(),
        n_rows: 4,
        n_cols: 6,
        row_labels: (0..4).map(|i| format!("d{i}")).collect(),
        col_labels: Vec::new(),
    }
}

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = decode_triplets::<u32>(data, &header("count")) {
        let (csv, h) = encode_triplets(&m, &[]);
        let back: SparseMatrix<u32> = decode_triplets(csv.as_bytes(), &h).unwrap();
        assert_eq!(back, m);
    }
    let _ = decode_triplets::<f64>(data, &header("weight"));
});
