use std::path::{Path, PathBuf};

use bregnmf::io::{self, CsvOptions, SONAR_FEATURES};
use bregnmf::Error;

fn standin() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/sonar_standin.csv")
}

#[test]
fn bundled_sonar_file_loads() {
    let ds = io::load_sonar(standin()).unwrap();
    assert_eq!(ds.matrix.shape(), (20, SONAR_FEATURES));
    assert!(ds.warnings.is_empty());
    assert_eq!(ds.provenance.source.as_deref(), Some(standin().as_path()));
    let labels = ds.row_labels.unwrap();
    assert_eq!(labels.len(), 20);
    assert!(labels.iter().all(|l| l == "2" || l == "3"));
    assert!(ds.matrix.max_entry() <= 1.0);
}

#[test]
fn sonar_file_transposes_to_features_by_patterns() {
    let ds = io::load_sonar(standin()).unwrap().transpose();
    assert_eq!(ds.matrix.shape(), (SONAR_FEATURES, 20));
    assert!(ds.row_labels.is_none());
    assert_eq!(ds.col_labels.map(|l| l.len()), Some(20));
}

#[test]
fn sonar_out_of_range_features_warn_and_floor() {
    let mut row: Vec<String> = (0..SONAR_FEATURES).map(|_| "0.5".to_string()).collect();
    row[3] = "1.25".into();
    row[7] = "-0.01".into();
    row.push("M".into());
    let ds = io::read_sonar(row.join(",").as_bytes()).unwrap();
    assert_eq!(ds.warnings.len(), 2);
    assert_eq!(ds.provenance.floor_count, 1);
    assert_eq!(ds.matrix.get(0, 7), bregnmf::DEFAULT_EPS_FLOOR);
    assert_eq!(ds.matrix.get(0, 3), 1.25);
}

#[test]
fn sonar_rejects_wrong_width_and_labels() {
    let short = "0.1,0.2,R";
    assert!(matches!(
        io::read_sonar(short.as_bytes()),
        Err(Error::ColumnCount { row: 1, .. })
    ));
    let mut row: Vec<&str> = vec!["0.1"; SONAR_FEATURES];
    row.push("X");
    assert!(matches!(
        io::read_sonar(row.join(",").as_bytes()),
        Err(Error::UnknownLabel { row: 1, .. })
    ));
}

#[test]
fn csv_errors_carry_positions() {
    let opts = CsvOptions::default();
    let err = io::read_csv("1,2\n3\n".as_bytes(), &opts).unwrap_err();
    assert!(
        matches!(
            err,
            Error::Ragged {
                row: 2,
                expected: 2,
                found: 1
            }
        ),
        "{err}"
    );
    let err = io::read_csv("1,2\n3,x\n".as_bytes(), &opts).unwrap_err();
    assert!(
        matches!(
            err,
            Error::Parse {
                line: 2,
                column: 2,
                ..
            }
        ),
        "{err}"
    );
    assert!(io::read_csv("1,-2\n".as_bytes(), &opts).is_err());
}

#[test]
fn missing_file_error_names_path() {
    let err = io::load_csv("/definitely/not/here.csv", &CsvOptions::default()).unwrap_err();
    assert!(err.to_string().contains("/definitely/not/here.csv"));
}

#[test]
fn csv_header_and_zero_flooring() {
    let opts = CsvOptions {
        has_header: true,
        ..CsvOptions::default()
    };
    let ds = io::read_csv("a,b\n0,1\n2,3\n".as_bytes(), &opts).unwrap();
    assert_eq!(ds.col_labels, Some(vec!["a".to_string(), "b".to_string()]));
    assert_eq!(ds.provenance.floor_count, 1);
    assert_eq!(ds.matrix.get(0, 0), opts.floor);
}
