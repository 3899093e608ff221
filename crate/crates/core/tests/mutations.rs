use num_rational::BigRational;
use weierstrass::symbolic::RuleTable;
use weierstrass::verify::{run_identity_suite_with, SuiteOptions, DEFAULT_SEED, RULE_CASES};
use weierstrass::TolerancePolicy;

#[test]
fn every_single_coefficient_mutation_is_caught() {
    let names: Vec<&str> = RuleTable::default().names().collect();
    let mut missed = Vec::new();
    for name in &names {
        let mut rules = RuleTable::default();
        let original = rules.get(name).unwrap().clone();
        let bumped = &original + BigRational::new(1.into(), 7.into());
        rules.set(name, bumped).unwrap();
        let options = SuiteOptions {
            rules,
            only: Some(RULE_CASES.iter().map(|s| s.to_string()).collect()),
        };
        let report = run_identity_suite_with(DEFAULT_SEED, &TolerancePolicy::default(), &options).unwrap();
        if report.all_passed() {
            missed.push(*name);
        }
    }
    assert!(missed.is_empty(), "undetected mutations: {missed:?}");
}

#[test]
fn ramanujan_mutation_fails_with_a_large_residual() {
    let mut rules = RuleTable::default();
    rules.set("ramanujan.e2", BigRational::new(1.into(), 13.into())).unwrap();
    let options = SuiteOptions { rules, only: Some(vec!["ramanujan".into()]) };
    let report = run_identity_suite_with(DEFAULT_SEED, &TolerancePolicy::default(), &options).unwrap();
    let case = report.case("ramanujan").unwrap();
    assert!(!case.passed && case.max_residual > 1e-2, "{case:?}");
}
