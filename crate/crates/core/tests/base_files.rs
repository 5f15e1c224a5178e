use std::path::Path;

use bhbound::bounds::{check_table_row, printed_tables};
use bhbound::precision::FieldTag;
use bhbound::sequences::BaseConstants;

fn shipped(name: &str) -> BaseConstants {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/bases").join(name);
    BaseConstants::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn shipped_implied_bases_reproduce_their_rows() {
    for row in printed_tables() {
        let base = shipped(&format!("{}_k{}_implied.toml", row.field(), row.k0));
        assert_eq!(base.k0(), row.k0);
        let c = check_table_row(&row, Some(&base), 128).unwrap();
        assert!(c.passed(), "{c:?}");
    }
}

#[test]
fn shipped_bound_base_is_four() {
    let b = shipped("real_k4_bound.toml");
    assert_eq!((b.field(), b.k0()), (FieldTag::Real, 4));
    assert_eq!(b.top().unwrap().value.to_string(), "4");
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.toml");
    let b = BaseConstants::constant(FieldTag::Complex, 3, "1.0625".parse().unwrap(), "round trip").unwrap();
    b.save(&path).unwrap();
    let back = BaseConstants::load(&path).unwrap();
    assert_eq!(back.fingerprint(), b.fingerprint());
    assert_eq!(back.len(), 8);
}

#[test]
fn malformed_files_are_rejected() {
    let good = BaseConstants::top_only(FieldTag::Real, 2, "2".parse().unwrap(), "p", "d").unwrap().to_toml_string();
    assert!(BaseConstants::from_toml_str(&good).is_ok());
    for bad in [
        good.replace("bhbound-base/1", "bhbound-base/9"),
        good.replace("value = \"2\"", "value = 2.0"),
        good.replace("value = \"2\"", "value = \"-2\""),
        good.replace("k0 = 2", "k0 = 99"),
        format!("{good}\n[[entries]]\nn = 4\nvalue = \"3\"\nprovenance = \"dup\"\n"),
    ] {
        assert!(BaseConstants::from_toml_str(&bad).is_err(), "{bad}");
    }
}
