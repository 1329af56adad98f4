//! Choice probabilities and revenue under SML and PALM.
//!
//! Under SML a level-1 product `x` in `S` is chosen with the MNL
//! probability `u(x) / (U(S) + u0)`; a level-2 product additionally needs
//! the customer to have passed on every level-1 product, which happens with
//! probability `1 - U(S_1) / (U(S) + u0)`. PALM extends this to any number
//! of levels: each level present in `S` is a perception class, smaller
//! levels are perceived first, and a product's probability is its Luce
//! weight times the probability of passing on every earlier class.
//!
//! All sums run over assortment members in ascending product index, so the
//! same set always evaluates to the same bits no matter how it was built.

use crate::error::{Error, Result};
use crate::model::{Assortment, Instance, Probability};

/// `U(S)`: total utility of the members.
pub fn total_utility(instance: &Instance, subset: &Assortment) -> Result<f64> {
    instance.validate(subset)?;
    Ok(utility_sum(instance, subset.indices()))
}

/// `alpha(S)`: utility-weighted average revenue (the MNL revenue without an
/// outside option). Rejects the empty set.
pub fn alpha(instance: &Instance, subset: &Assortment) -> Result<f64> {
    instance.validate(subset)?;
    if subset.is_empty() {
        return Err(Error::Domain("alpha is undefined for the empty set".into()));
    }
    Ok(alpha_of(instance, subset.indices()))
}

/// `lambda(Z, S) = U(Z) / (U(S) + u0)`, the utility share of `Z` inside `S`
/// with the outside option. Requires `Z ⊆ S`.
pub fn lambda(instance: &Instance, z: &Assortment, s: &Assortment) -> Result<f64> {
    instance.validate(z)?;
    instance.validate(s)?;
    if !z.is_subset_of(s) {
        return Err(Error::Domain(format!("lambda requires Z ⊆ S, got Z={z} S={s}")));
    }
    let z_mass = utility_sum(instance, z.indices());
    if z_mass == 0.0 {
        return Ok(0.0);
    }
    Ok(z_mass / (utility_sum(instance, s.indices()) + instance.outside_utility()))
}

/// SML choice probability `rho(x, S)` of the product with index `product`.
pub fn choice_probability(
    instance: &Instance,
    assortment: &Assortment,
    product: usize,
) -> Result<Probability> {
    instance.require_two_level()?;
    instance.validate(assortment)?;
    require_member(assortment, product)?;
    let masses = SmlMasses::new(instance, assortment.indices());
    Ok(Probability::from_computed(masses.probability(instance, product)))
}

/// SML no-purchase probability `1 - sum_x rho(x, S)`.
pub fn no_choice_probability(instance: &Instance, assortment: &Assortment) -> Result<Probability> {
    instance.require_two_level()?;
    instance.validate(assortment)?;
    let masses = SmlMasses::new(instance, assortment.indices());
    let chosen: f64 = assortment
        .iter()
        .map(|x| masses.probability(instance, x))
        .sum();
    Ok(Probability::from_computed(1.0 - chosen))
}

/// Expected revenue `R(S) = sum_x rho(x, S) r(x)` under SML.
pub fn expected_revenue(instance: &Instance, assortment: &Assortment) -> Result<f64> {
    instance.require_two_level()?;
    instance.validate(assortment)?;
    Ok(sml_revenue(instance, assortment.indices()))
}

/// Expected revenue from the level decomposition
/// `R(S) = alpha(S1) U(S1) / D + alpha(S2) U(S2) / D * (1 - U(S1) / D)` with
/// `D = U(S) + u0`. Agrees with [`expected_revenue`] up to rounding; kept as
/// an independent evaluation route.
pub fn expected_revenue_decomposed(instance: &Instance, assortment: &Assortment) -> Result<f64> {
    instance.require_two_level()?;
    instance.validate(assortment)?;
    if assortment.is_empty() {
        return Ok(0.0);
    }
    let first = instance.level_slice(assortment, 1);
    let second = instance.level_slice(assortment, 2);
    let d = utility_sum(instance, assortment.indices()) + instance.outside_utility();
    let weighted = |slice: &Assortment| -> (f64, f64) {
        if slice.is_empty() {
            (0.0, 0.0)
        } else {
            let mass = utility_sum(instance, slice.indices());
            (alpha_of(instance, slice.indices()) * mass, mass)
        }
    };
    let (w1, u1) = weighted(&first);
    let (w2, _) = weighted(&second);
    Ok(w1 / d + w2 / d * (1.0 - u1 / d))
}

/// PALM choice probability: `mu(x, S) * prod (1 - mu(C, S))` over the
/// perception classes `C` of `S` perceived before `x` (smaller levels).
pub fn palm_choice_probability(
    instance: &Instance,
    assortment: &Assortment,
    product: usize,
) -> Result<Probability> {
    instance.validate(assortment)?;
    require_member(assortment, product)?;
    let masses = PalmMasses::new(instance, assortment.indices());
    Ok(Probability::from_computed(masses.probability(instance, product)))
}

/// PALM no-purchase probability in product form,
/// `prod over classes C of S of (1 - mu(C, S))`.
pub fn palm_no_choice_probability(
    instance: &Instance,
    assortment: &Assortment,
) -> Result<Probability> {
    instance.validate(assortment)?;
    let masses = PalmMasses::new(instance, assortment.indices());
    Ok(Probability::from_computed(masses.pass_all))
}

/// Expected revenue under PALM.
pub fn palm_expected_revenue(instance: &Instance, assortment: &Assortment) -> Result<f64> {
    instance.validate(assortment)?;
    Ok(palm_revenue(instance, assortment.indices()))
}

fn require_member(assortment: &Assortment, product: usize) -> Result<()> {
    if assortment.contains(product) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "product {product} is not offered in {assortment}"
        )))
    }
}

pub(crate) fn utility_sum(instance: &Instance, members: &[usize]) -> f64 {
    members.iter().map(|&i| instance.product(i).utility).sum()
}

pub(crate) fn alpha_of(instance: &Instance, members: &[usize]) -> f64 {
    let mut weighted = 0.0;
    let mut mass = 0.0;
    for &i in members {
        let p = instance.product(i);
        weighted += p.utility * p.revenue;
        mass += p.utility;
    }
    weighted / mass
}

struct SmlMasses {
    denominator: f64,
    pass_level1: f64,
}

impl SmlMasses {
    fn new(instance: &Instance, members: &[usize]) -> Self {
        let mut total = 0.0;
        let mut level1 = 0.0;
        for &i in members {
            let p = instance.product(i);
            total += p.utility;
            if p.level == 1 {
                level1 += p.utility;
            }
        }
        let denominator = total + instance.outside_utility();
        let pass_level1 = if denominator > 0.0 {
            1.0 - level1 / denominator
        } else {
            1.0
        };
        SmlMasses {
            denominator,
            pass_level1,
        }
    }

    fn probability(&self, instance: &Instance, x: usize) -> f64 {
        let p = instance.product(x);
        let luce = p.utility / self.denominator;
        if p.level == 1 {
            luce
        } else {
            self.pass_level1 * luce
        }
    }
}

/// Evaluates `R(S)` under SML for sorted, in-range member indices.
pub(crate) fn sml_revenue(instance: &Instance, members: &[usize]) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    let masses = SmlMasses::new(instance, members);
    members
        .iter()
        .map(|&x| masses.probability(instance, x) * instance.product(x).revenue)
        .sum()
}

struct PalmMasses {
    denominator: f64,
    // (level, probability of passing on every class perceived before it)
    reach: Vec<(u32, f64)>,
    pass_all: f64,
}

impl PalmMasses {
    fn new(instance: &Instance, members: &[usize]) -> Self {
        let mut classes: Vec<(u32, f64)> = Vec::new();
        let mut total = 0.0;
        for &i in members {
            let p = instance.product(i);
            total += p.utility;
            match classes.binary_search_by_key(&p.level, |&(level, _)| level) {
                Ok(pos) => classes[pos].1 += p.utility,
                Err(pos) => classes.insert(pos, (p.level, p.utility)),
            }
        }
        let denominator = total + instance.outside_utility();
        let mut running = 1.0;
        let reach = classes
            .into_iter()
            .map(|(level, mass)| {
                let here = running;
                running *= 1.0 - mass / denominator;
                (level, here)
            })
            .collect();
        PalmMasses {
            denominator,
            reach,
            pass_all: running,
        }
    }

    fn probability(&self, instance: &Instance, x: usize) -> f64 {
        let p = instance.product(x);
        let pos = self
            .reach
            .binary_search_by_key(&p.level, |&(level, _)| level)
            .expect("member level is a class of the assortment");
        self.reach[pos].1 * (p.utility / self.denominator)
    }
}

/// Evaluates `R(S)` under PALM for sorted, in-range member indices.
pub(crate) fn palm_revenue(instance: &Instance, members: &[usize]) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    let masses = PalmMasses::new(instance, members);
    members
        .iter()
        .map(|&x| masses.probability(instance, x) * instance.product(x).revenue)
        .sum()
}
