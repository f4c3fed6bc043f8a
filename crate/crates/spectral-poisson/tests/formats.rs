use spectral_poisson::core::bracket::{structure_matrix, BracketSpec, SecondKindWeight};
use spectral_poisson::core::peakon::PeakonState;
use spectral_poisson::core::toda::TodaState;
use spectral_poisson::core::{QuadratureConfig, WeylRational, C64};
use spectral_poisson::formats::*;

#[test]
fn weyl_json_shape_and_round_trip() {
    let chi = WeylRational::from_pole_residue(
        vec![C64::new(1.0, 0.0), C64::new(2.5, -0.5)],
        vec![C64::new(0.5, 0.0), C64::new(0.25, 0.1)],
        C64::new(-0.25, 0.0),
    )
    .unwrap();
    let text = serde_json::to_string(&WeylJson::from(&chi)).unwrap();
    assert_eq!(text, r#"{"poles":[[1.0,0.0],[2.5,-0.5]],"residues":[[0.5,0.0],[0.25,0.1]],"const":[-0.25,0.0]}"#);
    let back: WeylRational = serde_json::from_str::<WeylJson>(&text).unwrap().try_into().unwrap();
    assert_eq!(back, chi);
    let no_const: WeylJson = serde_json::from_str(r#"{"poles":[[1,0]],"residues":[[2,0]]}"#).unwrap();
    assert_eq!(no_const.const_term, [0.0, 0.0]);
    let dup = r#"{"poles":[[1,0],[1,0]],"residues":[[1,0],[1,0]]}"#;
    assert!(WeylRational::try_from(serde_json::from_str::<WeylJson>(dup).unwrap()).is_err());
}

#[test]
fn state_json_shapes() {
    let s = PeakonState::new(vec![-1.0, 0.5], vec![1.5, 0.7]).unwrap();
    let text = serde_json::to_string(&PeakonJson::from(&s)).unwrap();
    assert_eq!(text, r#"{"x":[-1.0,0.5],"p":[1.5,0.7]}"#);
    assert!(PeakonState::try_from(PeakonJson { x: vec![1.0, 0.0], p: vec![1.0, 1.0] }).is_err());

    let t = TodaState::new(vec![0.1, 0.2], vec![0.0, -1.0]).unwrap();
    let text = serde_json::to_string(&TodaJson::from(&t)).unwrap();
    assert_eq!(text, r#"{"q":[0.1,0.2],"p":[0.0,-1.0]}"#);
    let back: TodaState = serde_json::from_str::<TodaJson>(&text).unwrap().try_into().unwrap();
    assert_eq!(back, t);
}

#[test]
fn potential_json() {
    let p: PotentialJson = serde_json::from_str(r#"{"l": 3.0, "fourier": [[1, 0.15, 0], [2, 0.0, 0.05]]}"#).unwrap();
    let u = p.to_potential(64).unwrap();
    assert_eq!(PotentialJson::from(&u), p);
    let x = 0.7;
    let exact = 0.3 * (std::f64::consts::PI * x / 3.0).cos() - 0.1 * (2.0 * std::f64::consts::PI * x / 3.0).sin();
    assert!((u.value(x) - exact).abs() < 1e-14);
    assert!(PotentialJson { l: 1.0, fourier: vec![(0, 1.0, 1.0)] }.to_potential(64).is_err());
}

#[test]
fn bracket_spec_json_and_short_form() {
    let specs = [
        BracketSpec::ThirdKind { n: 2 },
        BracketSpec::SecondKind { weight: SecondKindWeight::One },
        BracketSpec::SecondKind { weight: SecondKindWeight::Z },
        BracketSpec::TodaRestricted { n: 1, c2: 0.5 },
    ];
    for s in specs {
        let text = serde_json::to_string(&BracketSpecJson::from(s)).unwrap();
        assert_eq!(BracketSpec::from(serde_json::from_str::<BracketSpecJson>(&text).unwrap()), s);
    }
    assert_eq!(
        serde_json::to_string(&BracketSpecJson::from(specs[3])).unwrap(),
        r#"{"family":"TodaRestricted","n":1,"c2":0.5}"#
    );
    assert_eq!(parse_spec("third:2").unwrap(), specs[0]);
    assert_eq!(parse_spec("second:one").unwrap(), specs[1]);
    assert_eq!(parse_spec("second:z").unwrap(), specs[2]);
    assert_eq!(parse_spec("toda:1:0.5").unwrap(), specs[3]);
    for bad in ["third", "third:x", "third:9", "fourth:1", "second:w"] {
        assert!(parse_spec(bad).is_err(), "{bad}");
    }
}

#[test]
fn structure_matrix_exports() {
    let chi = WeylRational::from_real(&[1.0, 2.0], &[1.0, 0.5]).unwrap();
    let m = structure_matrix(&chi, BracketSpec::ThirdKind { n: 0 }, &QuadratureConfig::default()).unwrap();
    let json = StructureMatrixJson::from(&m);
    assert_eq!(json.dim, 4);
    assert_eq!(json.entries.len(), 4);
    assert_eq!(json.entries[1][2], [m.entries[(1, 2)].re, m.entries[(1, 2)].im]);

    let mut buf = Vec::new();
    write_matrix_csv(&m.entries, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 4);
        for (j, cell) in row.iter().enumerate() {
            let (re, im) = cell.split_once(',').unwrap();
            assert_eq!(re.parse::<f64>().unwrap(), m.entries[(i, j)].re);
            assert_eq!(im.parse::<f64>().unwrap(), m.entries[(i, j)].im);
        }
    }
}

#[test]
fn list_parsers() {
    assert_eq!(parse_list::<u32>("0,1, 2").unwrap(), vec![0, 1, 2]);
    assert!(parse_list::<u32>("0,a").is_err());
    assert_eq!(parse_list::<f64>("-1.5,2").unwrap(), vec![-1.5, 2.0]);
    assert_eq!(parse_fourier("1:0.15,2:0:-0.05").unwrap(), vec![(1, 0.15, 0.0), (2, 0.0, -0.05)]);
    assert!(parse_fourier("1").is_err());
}
