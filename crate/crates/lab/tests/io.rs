use krein_core::algebra::rel_diff;
use krein_core::models::{friedrichs_family, FriedrichsParams};
use krein_core::{c64, FreeHamiltonian, OpAlgebra};
use krein_lab::gen::singular_model;
use krein_lab::io::{read_bundle, read_family, read_matrix, write_bundle, write_family, write_matrix};
use krein_lab::LabError;

#[test]
fn bundle_round_trip_preserves_the_resolvent() {
    let tmp = tempfile::tempdir().unwrap();
    let sm = singular_model(3, 7).unwrap();
    let p = tmp.path().join("model.json");
    write_bundle(&p, &sm).unwrap();
    let back = read_bundle(&p).unwrap();
    assert_eq!(back.a(), sm.a());
    assert_eq!(back.lambda_circ(), sm.lambda_circ());
    let z = c64::new(0.5, 2.0);
    assert!(rel_diff(&back.krein_resolvent(z).unwrap(), &sm.krein_resolvent(z).unwrap()) < 1e-13);
}

#[test]
fn family_manifest_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let p = FriedrichsParams { dim_max: 32, ..FriedrichsParams::default() };
    let fam = friedrichs_family(&p, &[4, 8, 32], None).unwrap();
    let files = write_family(tmp.path(), "friedrichs", &fam).unwrap();
    assert_eq!(files.len(), 3 + 2 * 3 + 1);
    let (name, back) = read_family(&tmp.path().join("manifest.json")).unwrap();
    assert_eq!(name, "friedrichs");
    assert_eq!(back.level_indices(), vec![4, 8, 32]);
    assert_eq!(back.lambda_circ(), fam.lambda_circ());
    assert_eq!(back.levels()[1].a_n, fam.levels()[1].a_n.to_dense());
    assert_eq!(back.model().dim(), 32);
}

#[test]
fn malformed_matrix_file_is_a_format_error() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("m.json");
    std::fs::write(&p, r#"{"dim": 2, "re": [[1, 2]], "im": [[0, 0], [0, 0]]}"#).unwrap();
    assert!(matches!(read_matrix(&p), Err(LabError::Format { .. })));
    write_matrix(&p, &krein_core::algebra::eye(3)).unwrap();
    assert_eq!(read_matrix(&p).unwrap(), krein_core::algebra::eye(3));
}
