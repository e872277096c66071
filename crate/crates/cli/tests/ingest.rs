use robord_cli::{read_pairs, read_ratings, write_ratings, CliError};
use robord_core::Subset;

#[test]
fn two_rows() {
    let data = read_ratings("f_1,f_2,f_3,rating\n1,0,1,3\n0,1,0,5\n".as_bytes(), "t").unwrap();
    assert_eq!(data.len(), 2);
    assert_eq!(data.n(), 3);
    assert_eq!(data.scale(), 5);
    assert_eq!(data.items()[0], (Subset::of(&[1, 3]), 3));
}

#[test]
fn non_binary_cell_is_named() {
    let err = read_ratings("f_1,f_2,rating\n1,0,3\n0,2,5\n".as_bytes(), "t").unwrap_err();
    match err {
        CliError::Cell { row, column, .. } => assert_eq!((row, column.as_str()), (3, "f_2")),
        e => panic!("{e}"),
    }
}

#[test]
fn bad_ratings_are_rejected() {
    for text in ["f_1,rating\n1,0\n", "f_1,rating\n1,x\n", "f_1,rating\n1,-2\n"] {
        let err = read_ratings(text.as_bytes(), "t").unwrap_err();
        assert!(matches!(err, CliError::Cell { ref column, .. } if column == "rating"), "{err}");
    }
}

#[test]
fn empty_and_headless_files() {
    assert!(matches!(read_ratings("".as_bytes(), "t"), Err(CliError::EmptyFile(_))));
    assert!(matches!(read_ratings("f_1,rating\n".as_bytes(), "t"), Err(CliError::EmptyFile(_))));
    assert!(matches!(read_ratings("f_1,score\n1,2\n".as_bytes(), "t"), Err(CliError::Header(_))));
}

#[test]
fn genre_export_with_ten_point_ratings() {
    let mut text = String::from("action,comedy,drama,horror,romance,scifi,thriller,war,rating\n");
    for i in 0..40u32 {
        let bits: Vec<String> = (0..8).map(|j| ((i * 37 + j * 11) % 3 == 0) as u8).map(|b| b.to_string()).collect();
        text += &format!("{},{}\n", bits.join(","), 1 + i % 10);
    }
    let data = read_ratings(text.as_bytes(), "t").unwrap();
    assert_eq!((data.n(), data.scale(), data.len()), (8, 10, 40));
}

#[test]
fn ratings_round_trip() {
    let data = read_ratings("f_1,f_2,rating\n1,1,2\n0,1,1\n".as_bytes(), "t").unwrap();
    let mut buf = Vec::new();
    write_ratings(&data, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf.clone()).unwrap(), "f_1,f_2,rating\n1,1,2\n0,1,1\n");
    assert_eq!(read_ratings(&buf[..], "t").unwrap(), data);
}

#[test]
fn pair_files() {
    let pairs = read_pairs("a,b\n1010,0001\n0000,1111\n".as_bytes(), 4).unwrap();
    assert_eq!(pairs, vec![(Subset::of(&[1, 3]), Subset::of(&[4])), (Subset::EMPTY, Subset::full(4))]);
    assert!(matches!(read_pairs("a,b\n101,0001\n".as_bytes(), 4), Err(CliError::Cell { .. })));
}
