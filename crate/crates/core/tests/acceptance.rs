use std::io::Write;

use northcott_core::selftest;

#[test]
fn acceptance() {
    let results = selftest::run(&selftest::all_ids());
    // written to the raw handle so the lines show up without --nocapture
    let mut err = std::io::stderr().lock();
    for r in &results {
        writeln!(err, "{}", r.line()).unwrap();
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
