use std::fs;

use nalgebra::DMatrix;
use subho_core::data_io::{read_edge_list, read_matrix_csv, write_dataset_csv, write_edge_list};
use subho_core::{load_csv, Error, RawDataset};

#[test]
fn dataset_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let values = DMatrix::from_row_slice(3, 2, &[0.1, -2.5e-17, 1.0 / 3.0, 7.0, f64::MIN_POSITIVE, -0.0]);
    let raw = RawDataset::new(values.clone(), vec!["BRCA1".into(), "TP53".into()]).unwrap();
    write_dataset_csv(&path, &raw).unwrap();
    let back = load_csv(&path).unwrap();
    assert_eq!(back.column_names(), raw.column_names());
    assert!(back.values().iter().zip(values.iter()).all(|(a, b)| a == b));
    let (names, m) = read_matrix_csv(&path).unwrap();
    assert_eq!(names, vec!["BRCA1", "TP53"]);
    assert_eq!(m.shape(), (3, 2));
}

#[test]
fn edge_lists_use_names() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    write_edge_list(&path, &names, [(0, 2), (1, 2)]).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "node_a,node_b\na,c\nb,c\n");
    assert_eq!(read_edge_list(&path, &names).unwrap(), vec![(0, 2), (1, 2)]);
    fs::write(&path, "node_a,node_b\na,z\n").unwrap();
    assert!(read_edge_list(&path, &names).is_err());
}

#[test]
fn loader_errors_carry_locations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "x,y\n1,2\n3,NA\n").unwrap();
    match load_csv(&path) {
        Err(Error::NonNumeric { row, column, .. }) => assert_eq!((row, column), (3, 2)),
        other => panic!("{other:?}"),
    }
    fs::write(&path, "x,y\n1,2,3\n").unwrap();
    assert!(matches!(load_csv(&path), Err(Error::RaggedRow { row: 2, .. })));
    assert!(matches!(load_csv(dir.path().join("none.csv")), Err(Error::Io { .. })));
}
