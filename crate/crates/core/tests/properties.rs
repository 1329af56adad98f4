use proptest::prelude::*;

use sml_assortment::choice::{expected_revenue, expected_revenue_decomposed, palm_expected_revenue};
use sml_assortment::experiments::{generate_instance, optimality_gap, FamilyConfig};
use sml_assortment::io::{instance_to_json, parse_instance};
use sml_assortment::optimizer::{
    enumerate_rol_candidates, first_gap, solve_brute_force, solve_revenue_ordered, solve_rol,
    verify_optimality_bounds,
};
use sml_assortment::{Instance, Product};

fn arb_instance() -> impl Strategy<Value = Instance> {
    let product = (1u32..=2, 0.0f64..10.0, 0.01f64..10.0);
    (proptest::collection::vec(product, 0..9), 0.0f64..10.0).prop_map(|(ps, u0)| {
        let products = ps
            .into_iter()
            .enumerate()
            .map(|(i, (level, r, u))| Product::new(format!("p{i}"), level, r, u).unwrap())
            .collect();
        Instance::new(products, u0).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rol_is_optimal_and_dominates_ro(inst in arb_instance()) {
        let rol = solve_rol(&inst).unwrap();
        let brute = solve_brute_force(&inst).unwrap();
        let ro = solve_revenue_ordered(&inst).unwrap();
        prop_assert!((rol.revenue - brute.revenue).abs() <= 1e-9);
        prop_assert!(ro.revenue <= rol.revenue);
        prop_assert!(optimality_gap(&inst).unwrap() >= 0.0);
        prop_assert_eq!(
            enumerate_rol_candidates(&inst).unwrap().len() as u64,
            rol.evaluations
        );
    }

    #[test]
    fn optimum_has_no_gap_and_meets_bounds(inst in arb_instance()) {
        let brute = solve_brute_force(&inst).unwrap();
        prop_assert!(!first_gap(&inst, &brute.assortment).unwrap().has_gap);
        prop_assert!(verify_optimality_bounds(&inst, &brute).unwrap().all_passed());
    }

    #[test]
    fn revenue_forms_agree(inst in arb_instance(), mask in any::<u16>()) {
        let s = (0..inst.len()).filter(|i| mask >> i & 1 == 1).collect();
        let r = expected_revenue(&inst, &s).unwrap();
        prop_assert!((r - expected_revenue_decomposed(&inst, &s).unwrap()).abs() <= 1e-9);
        prop_assert!((r - palm_expected_revenue(&inst, &s).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn instance_json_round_trips(inst in arb_instance()) {
        prop_assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn generator_is_deterministic(n1 in 0usize..6, n2 in 0usize..6, seed in any::<u64>(), index in 0usize..4) {
        let config = FamilyConfig::new(n1, n2, 1.0).with_seed(seed).with_instances(index + 1);
        let a = generate_instance(&config, index).unwrap();
        prop_assert_eq!(a.len(), n1 + n2);
        prop_assert_eq!(generate_instance(&config, index).unwrap(), a);
    }
}

#[test]
fn zero_outside_utility_has_zero_gap() {
    for index in 0..50 {
        let config = FamilyConfig::new(6, 6, 0.0).with_seed(77).with_instances(50);
        let inst = generate_instance(&config, index).unwrap();
        assert_eq!(optimality_gap(&inst).unwrap(), 0.0);
    }
}
