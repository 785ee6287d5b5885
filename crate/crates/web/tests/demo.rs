use cqa_web::{block_json, example4_json, hypergraph_json};

#[test]
fn example4_slider_values() {
    for n in [2, 3, 50] {
        let v = example4_json(n).unwrap();
        assert_eq!(v["s_repairs"].as_array().unwrap().len(), 2);
        assert_eq!(v["c_repairs"].as_array().unwrap().len(), 1);
        assert_eq!(v["c_distance"], 1);
        assert_eq!(v["certain_r1_c"], true);
        assert_eq!(v["certain_r1_s"], false);
        let far = v["s_repairs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["deleted_count"].as_u64().unwrap())
            .max();
        assert_eq!(far, Some(n as u64));
    }
    // with a single R tuple the two sides tie
    let v = example4_json(1).unwrap();
    assert_eq!(v["c_repairs"].as_array().unwrap().len(), 2);
    assert!(example4_json(0).is_err());
}

#[test]
fn block_of_five_cycle() {
    let c5 = "5\n0 1\n1 2\n2 3\n3 4\n0 4\n";
    for k in 1..=4 {
        let v = block_json(c5, k).unwrap();
        assert_eq!(v["alpha"], 2);
        assert_eq!(v["t_in_all_maximum"], k == 2, "k = {k}");
        assert!(v["file"].as_str().unwrap().contains("\nt "));
    }
    assert!(block_json("x", 2).is_err());
}

#[test]
fn hypergraph_of_example_one() {
    let v = hypergraph_json(
        "P(a,b,c)\nP(a,c,d)\nP(a,c,e)",
        ":- P(x,y,z), P(x,u,w), y != u.",
    )
    .unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
    assert_eq!(v["c_repairs"], 1);
    let kept: Vec<bool> = v["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["in_repair"].as_bool().unwrap())
        .collect();
    assert_eq!(kept, vec![false, true, true]);
    assert!(hypergraph_json("P(a", ":- P(x).").is_err());
}
