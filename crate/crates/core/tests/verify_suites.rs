use splitloci::splitting::ClassOptions;
use splitloci::verify::{run, Suite};

#[test]
fn every_suite_passes() {
    let checks = run(Suite::All, &ClassOptions::default());
    for c in &checks {
        println!("{c}");
    }
    assert!(checks.len() >= 12);
    assert!(checks.iter().all(|c| c.ok));
}
