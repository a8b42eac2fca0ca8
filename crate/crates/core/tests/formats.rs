//! Text, JSON and binary formats through the public API.

use proptest::prelude::*;
use ptf_fool::krand::{sample_iid, sample_kwise, FieldSpec, KWiseSpec, SampleBatch, Target};
use ptf_fool::poly::{GeneralPolynomial, Monomial, PolyJson};
use ptf_fool::{Error, ExactPoly, Poly, Rational, Scalar};

fn poly_strategy() -> impl Strategy<Value = ExactPoly> {
    (1usize..=8).prop_flat_map(|n| {
        proptest::collection::vec((1u32..(1 << n), -50i64..=50, 1i64..=12), 0..=6).prop_map(move |terms| {
            let mut p = ExactPoly::zero(n);
            for (mask, num, den) in terms {
                let m = Monomial::new((0..n as u32).filter(|b| mask >> b & 1 == 1)).unwrap();
                p.add_term(m, Rational::from_ratio(num, den));
            }
            p
        })
    })
}

proptest! {
    #[test]
    fn text_round_trip(p in poly_strategy()) {
        prop_assert_eq!(ExactPoly::parse_any(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn json_round_trip(p in poly_strategy()) {
        let s = serde_json::to_string(&p.to_json()).unwrap();
        let j: PolyJson = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&j, &p.to_json());
        prop_assert_eq!(ExactPoly::parse_any(&s).unwrap(), p);
    }

    #[test]
    fn float_text_round_trip(p in poly_strategy()) {
        let f = p.to_f64();
        prop_assert_eq!(Poly::parse_any(&f.to_text()).unwrap(), f);
    }
}

#[test]
fn decimal_literals_are_exact() {
    let p = ExactPoly::parse_any(r#"{"nvars": 2, "terms": [{"vars": [0, 1], "coeff": 0.1}]}"#).unwrap();
    let (_, c) = p.terms().next().unwrap();
    assert_eq!(*c, Rational::from_ratio(1, 10));
}

#[test]
fn parse_errors() {
    assert!(matches!(ExactPoly::parse_any("1 * x0 * x0\n"), Err(Error::Parse { line: 1, .. })));
    assert!(matches!(ExactPoly::parse_any("# c\n2 * x1\nfoo\n"), Err(Error::Parse { line: 3, .. })));
    assert!(ExactPoly::parse_any(r#"{"nvars": 1, "terms": [{"vars": [3], "coeff": "1"}]}"#).is_err());
    assert!(ExactPoly::parse_any(r#"{"nvars": 1, "terms": [{"vars": [0], "coeff": "x"}]}"#).is_err());
}

#[test]
fn general_text_accepts_powers() {
    let g: GeneralPolynomial<Rational> = GeneralPolynomial::parse_any("nvars 2\n1/2 * x0^3 * x1\n-1\n").unwrap();
    assert_eq!(g.degree(), 4);
    assert_eq!(g.max_exponent(), 3);
    let v = g.evaluate(&[Rational::from_int(2), Rational::from_int(3)]).unwrap();
    assert_eq!(v, Rational::from_int(11));
    assert!(g.to_multilinear().is_none());
}

#[test]
fn binary_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = KWiseSpec { k: 3, field: FieldSpec::Binary(4), n: 5, target: Target::Sign };
    for (name, batch) in [("iid.bin", sample_iid(3, 9, 17)), ("kwise.bin", sample_kwise(spec, 9, 40).unwrap())] {
        let path = dir.path().join(name);
        batch.write_binary(&path).unwrap();
        let raw = std::fs::read(&path).unwrap();
        assert_eq!(raw.len(), batch.rows * batch.cols * 8);
        assert_eq!(f64::from_le_bytes(raw[8..16].try_into().unwrap()), batch.data[1]);
        let side: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(SampleBatch::sidecar_path(&path)).unwrap()).unwrap();
        assert_eq!(side["shape"], serde_json::json!([batch.rows, batch.cols]));
        assert_eq!(side["format"], "f64-le");
        assert_eq!(SampleBatch::read_binary(&path).unwrap(), batch);
    }
}

#[test]
fn truncated_binary_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.bin");
    sample_iid(2, 1, 4).write_binary(&path).unwrap();
    let raw = std::fs::read(&path).unwrap();
    std::fs::write(&path, &raw[..raw.len() - 8]).unwrap();
    assert!(SampleBatch::read_binary(&path).is_err());
}

#[test]
fn csv_export_round_trips_floats() {
    let batch = sample_iid(2, 4, 6);
    let mut buf = Vec::new();
    batch.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x0,x1"));
    let values: Vec<f64> = lines.flat_map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>()).collect();
    assert_eq!(values, batch.data);
}
