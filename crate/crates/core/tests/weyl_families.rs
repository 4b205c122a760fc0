use muord::cm::families;
use muord::weyl::{check_family, weyl_data};

#[test]
fn every_simple_family_has_nonconstant_component_traces() {
    let mut checked = 0;
    for fam in families() {
        let Ok((m, n, d)) = weyl_data(&fam.datum) else {
            eprintln!("{}: signature not simple, skipped", fam.name);
            continue;
        };
        let reports = check_family(&fam.datum, None, true).unwrap();
        let bad: Vec<_> = reports.iter().filter(|r| !r.verdict.nonconstant || !r.verdict.uniform_in_twist).collect();
        eprintln!("{}: m={m} n={n} d={d}, {} components, {} failing", fam.name, reports.len(), bad.len());
        assert!(bad.is_empty(), "{}: {:?}", fam.name, bad);
        checked += 1;
    }
    assert!(checked >= 1);
}
