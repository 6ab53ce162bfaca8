//! The shipped code files are reproducible from the library.

use std::path::Path;

use nlturbo_core::designer::design_trellis;
use nlturbo_core::superposition::{linear_table, USER2_TAPS};
use nlturbo_core::trellis::reference_trellis;
use nlturbo_core::{CodeFile, DesignParams, DistanceMetric, TrellisTopology};

fn load(name: &str) -> CodeFile {
    CodeFile::from_path(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../codes").join(name)).unwrap()
}

#[test]
fn reference_file_holds_the_reference_labels() {
    let f = load("reference.toml");
    assert_eq!(f.trellis().unwrap(), reference_trellis());
    let spec = f.code_spec().unwrap();
    assert_eq!((spec.info_bits(), spec.interleaver().len(), spec.interleaver().requested_spread()), (20000, 10000, 70));
    assert!(spec.systematic());
}

#[test]
fn user2_file_is_the_linear_code() {
    let f = load("bbsc_user2.toml");
    assert_eq!(f.trellis().unwrap(), linear_table(TrellisTopology::duo_binary_16(), &USER2_TAPS).unwrap());
}

#[test]
fn user1_file_is_reproduced_by_the_designer() {
    let f = load("bbsc_user1.toml");
    let params = DesignParams {
        d_b: 1,
        d_m: 1,
        max_merge_retries: 2000,
        num_candidates: 8,
        rng_seed: 5,
        systematic: false,
        ..DesignParams::new(0.1386, 10, DistanceMetric::Hamming)
    };
    let r = design_trellis(&params, &TrellisTopology::duo_binary_16()).unwrap();
    assert_eq!(f.trellis().unwrap(), r.trellis);
    assert_eq!(f.declared.effective_free_distance, Some(r.effective_free_distance));
    assert_eq!(f.systematic, Some(false));
}

#[test]
fn round_trip_through_text() {
    for name in ["reference.toml", "bbsc_user1.toml", "bbsc_user2.toml"] {
        let f = load(name);
        assert_eq!(CodeFile::parse(&f.to_toml_string().unwrap()).unwrap(), f, "{name}");
    }
}
