//! The five worked examples from the SML literature, shipped as golden
//! instance files.
//!
//! | example | what it shows                                             |
//! |---------|-----------------------------------------------------------|
//! | 1       | attraction effect: regularity violation for `b1`          |
//! | 2       | choice overload: no-purchase probability grows            |
//! | 3       | full revenue table; level-2 per-product bound fails       |
//! | 4       | a product with `r >= R*` left out of the optimum          |
//! | 5       | revenue-ordered assortments are not optimal               |
//!
//! Examples 1 and 2 do not specify revenues; every product carries
//! revenue 1.

use crate::io::parse_instance;
use crate::model::Instance;

pub const EXAMPLE_1: &str = include_str!("../fixtures/example1.json");
pub const EXAMPLE_2: &str = include_str!("../fixtures/example2.json");
pub const EXAMPLE_3: &str = include_str!("../fixtures/example3.json");
pub const EXAMPLE_4: &str = include_str!("../fixtures/example4.json");
pub const EXAMPLE_5: &str = include_str!("../fixtures/example5.json");

/// Parsed example `n` (1 to 5).
pub fn example(n: usize) -> Instance {
    let text = match n {
        1 => EXAMPLE_1,
        2 => EXAMPLE_2,
        3 => EXAMPLE_3,
        4 => EXAMPLE_4,
        5 => EXAMPLE_5,
        _ => panic!("no example {n}"),
    };
    parse_instance(text).expect("bundled fixture is valid")
}
