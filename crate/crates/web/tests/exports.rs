use evoclass_web::{check_json, classify_json, label_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn classify_explorer() {
    let v = parse(classify_json(3, "isomorphism", "invariant").unwrap());
    assert_eq!(v["class_count"], 13);
    let total: usize = v["classes"].as_array().unwrap().iter().map(|c| c["members"].as_array().unwrap().len()).sum();
    assert_eq!(total, 81);
    assert_eq!(parse(classify_json(4, "isotopism", "invariant").unwrap())["class_count"], 4);
    assert!(classify_json(9, "isomorphism", "bruteforce").unwrap_err().contains("q <= 7"));
    assert!(classify_json(3, "strong-isotopism", "invariant").is_err());
    assert!(classify_json(6, "isomorphism", "invariant").is_err());
}

#[test]
fn pair_check() {
    let v = parse(check_json(7, "1,0;1,0", "1,0;2,0", "isomorphism").unwrap());
    assert_eq!(v["related"], true);
    assert_eq!(v["witness"]["F"], "1,0;0,2");
    assert_eq!(v["left_label"], v["right_label"]);
    let v = parse(check_json(2, "0,0;0,0", "1,0;0,0", "isotopism").unwrap());
    assert_eq!(v["related"], false);
    assert!(check_json(3, "1,0;0", "1,0;0,0", "isomorphism").is_err());
    assert!(check_json(3, "1,0,0;0,0,0;0,0,0", "1,0,0;0,0,0;0,0,0", "isomorphism").is_err());
}

#[test]
fn label() {
    let v = parse(label_json(5, "1,1;4,4").unwrap());
    assert_eq!(v["label"], "R1_EXCEPTIONAL");
    assert_eq!(v["isotopism_class"], "E2");
    let v = parse(label_json(7, "1,0;2,0").unwrap());
    assert_eq!(v["label"], "R1_SQCLASS(1)");
    assert_eq!(v["annihilator_dim"], 0);
}
