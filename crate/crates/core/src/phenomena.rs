//! Certificates for behaviour no random-utility model can produce:
//! regularity violations (offering more raises a product's choice
//! probability) and choice overload (offering more raises the probability
//! of buying nothing).
//!
//! Probabilities are evaluated under PALM, which is identical to SML on
//! two-level instances, so the checks also work for more levels.

use std::cmp::Ordering;

use crate::choice::{palm_choice_probability, palm_no_choice_probability};
use crate::error::{Error, Result};
use crate::model::{Assortment, Instance, Probability};
use crate::optimizer::DEFAULT_BRUTE_FORCE_CAP;

/// Minimum probability increase accepted as a genuine effect.
pub const STRICTNESS_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Effect {
    RegularityViolation,
    ChoiceOverload,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectWitness {
    pub effect: Effect,
    pub smaller_set: Assortment,
    pub larger_set: Assortment,
    /// The product whose probability rose, for regularity violations.
    pub focal_product: Option<usize>,
    pub prob_before: Probability,
    pub prob_after: Probability,
}

impl EffectWitness {
    fn sort_key(&self) -> (Effect, &Assortment, &Assortment, Option<usize>) {
        (
            self.effect,
            &self.larger_set,
            &self.smaller_set,
            self.focal_product,
        )
    }
}

/// Effect checks with a configurable strictness margin and scan cap.
#[derive(Debug, Clone, Copy)]
pub struct Detector {
    pub margin: f64,
    pub size_cap: usize,
}

impl Default for Detector {
    fn default() -> Self {
        Detector {
            margin: STRICTNESS_MARGIN,
            size_cap: DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

impl Detector {
    fn check_nesting(instance: &Instance, smaller: &Assortment, larger: &Assortment) -> Result<()> {
        instance.validate(smaller)?;
        instance.validate(larger)?;
        if !smaller.is_proper_subset_of(larger) {
            return Err(Error::Domain(format!(
                "{smaller} is not a proper subset of {larger}"
            )));
        }
        Ok(())
    }

    pub fn regularity_violation(
        &self,
        instance: &Instance,
        smaller: &Assortment,
        larger: &Assortment,
        product: usize,
    ) -> Result<Option<EffectWitness>> {
        Self::check_nesting(instance, smaller, larger)?;
        let before = palm_choice_probability(instance, smaller, product)?;
        let after = palm_choice_probability(instance, larger, product)?;
        Ok(
            (after.value() - before.value() > self.margin).then(|| EffectWitness {
                effect: Effect::RegularityViolation,
                smaller_set: smaller.clone(),
                larger_set: larger.clone(),
                focal_product: Some(product),
                prob_before: before,
                prob_after: after,
            }),
        )
    }

    pub fn choice_overload(
        &self,
        instance: &Instance,
        smaller: &Assortment,
        larger: &Assortment,
    ) -> Result<Option<EffectWitness>> {
        Self::check_nesting(instance, smaller, larger)?;
        let before = palm_no_choice_probability(instance, smaller)?;
        let after = palm_no_choice_probability(instance, larger)?;
        Ok(
            (after.value() - before.value() > self.margin).then(|| EffectWitness {
                effect: Effect::ChoiceOverload,
                smaller_set: smaller.clone(),
                larger_set: larger.clone(),
                focal_product: None,
                prob_before: before,
                prob_after: after,
            }),
        )
    }

    /// Checks every pair `smaller ⊂ larger` with `|larger| <= max_size`,
    /// every focal product of `smaller` for regularity and every pair for
    /// choice overload. Witnesses are sorted by effect, then larger set,
    /// then smaller set, then focal product.
    pub fn scan(&self, instance: &Instance, max_size: usize) -> Result<Vec<EffectWitness>> {
        let n = instance.len();
        if n > self.size_cap || n > 30 {
            return Err(Error::ResourceLimit(format!(
                "effect scan over {n} products exceeds the cap of {}",
                self.size_cap.min(30)
            )));
        }
        let mut witnesses = Vec::new();
        for large_mask in 1u64..(1 << n) {
            if large_mask.count_ones() as usize > max_size {
                continue;
            }
            let larger = Assortment::from_mask(large_mask);
            // proper submasks, the empty set included
            let mut small_mask = (large_mask - 1) & large_mask;
            loop {
                let smaller = Assortment::from_mask(small_mask);
                if let Some(w) = self.choice_overload(instance, &smaller, &larger)? {
                    witnesses.push(w);
                }
                for product in smaller.iter() {
                    if let Some(w) = self.regularity_violation(instance, &smaller, &larger, product)? {
                        witnesses.push(w);
                    }
                }
                if small_mask == 0 {
                    break;
                }
                small_mask = (small_mask - 1) & large_mask;
            }
        }
        witnesses.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap_or(Ordering::Equal));
        Ok(witnesses)
    }
}

/// Witness if `product`'s choice probability rises from `smaller` to
/// `larger` by more than [`STRICTNESS_MARGIN`].
pub fn check_regularity_violation(
    instance: &Instance,
    smaller: &Assortment,
    larger: &Assortment,
    product: usize,
) -> Result<Option<EffectWitness>> {
    Detector::default().regularity_violation(instance, smaller, larger, product)
}

/// Witness if the no-purchase probability rises from `smaller` to `larger`.
pub fn check_choice_overload(
    instance: &Instance,
    smaller: &Assortment,
    larger: &Assortment,
) -> Result<Option<EffectWitness>> {
    Detector::default().choice_overload(instance, smaller, larger)
}

pub fn scan_for_effects(instance: &Instance, max_size: usize) -> Result<Vec<EffectWitness>> {
    Detector::default().scan(instance, max_size)
}
