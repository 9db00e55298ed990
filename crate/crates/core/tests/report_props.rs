use std::collections::BTreeMap;

use proptest::prelude::*;

use cyglue::scenario::{presets::preset, run, Report, Scenario, Stage};

fn stages() -> impl Strategy<Value = Vec<Stage>> {
    proptest::sample::subsequence(Stage::ALL.to_vec(), 0..=4)
}

fn pick(which: usize, a: i64) -> Scenario {
    let p = |kv: &[(&str, i64)]| kv.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>();
    match which {
        0 => preset("main", &p(&[("a", a)])),
        1 => preset("arbitrary_b2", &p(&[("a", a), ("c", 2 * a)])),
        2 => preset("oguiso", &p(&[("a", a)])),
        3 => preset("quartic_rho3", &p(&[])),
        _ => preset("identity_control", &p(&[])),
    }
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn report_json_round_trips(which in 0usize..5, a in 1i64..=6, checks in stages()) {
        let r = run(&pick(which, a), &checks).unwrap();
        let text = r.to_json();
        let back = Report::from_json(&text).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn runs_are_deterministic(which in 0usize..5, a in 1i64..=6, checks in stages()) {
        let s = pick(which, a);
        prop_assert_eq!(run(&s, &checks).unwrap().to_json(), run(&s, &checks).unwrap().to_json());
    }

    #[test]
    fn scenario_toml_round_trips(which in 0usize..5, a in 1i64..=6) {
        let s = pick(which, a);
        let text = s.to_toml().unwrap();
        let back = Scenario::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }

    #[test]
    fn check_order_is_irrelevant(which in 0usize..5, a in 1i64..=4, checks in stages()) {
        let s = pick(which, a);
        let mut rev = checks.clone();
        rev.reverse();
        prop_assert_eq!(run(&s, &checks).unwrap(), run(&s, &rev).unwrap());
    }
}

#[test]
fn scenario_file_loads_like_the_preset() {
    let s = pick(0, 2);
    let dir = std::env::temp_dir().join(format!("cyglue-scenario-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("main.toml");
    std::fs::write(&path, s.to_toml().unwrap()).unwrap();
    let loaded = cyglue::scenario::load_scenario(path.to_str().unwrap(), &BTreeMap::new()).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(run(&loaded, &Stage::ALL).unwrap(), run(&s, &Stage::ALL).unwrap());
}
