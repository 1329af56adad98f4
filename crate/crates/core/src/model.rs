use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// A sellable item: a perception level, a per-unit revenue and an intrinsic
/// utility.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub id: String,
    pub level: u32,
    pub revenue: f64,
    pub utility: f64,
}

impl Product {
    pub fn new(id: impl Into<String>, level: u32, revenue: f64, utility: f64) -> Result<Self> {
        let product = Product {
            id: id.into(),
            level,
            revenue,
            utility,
        };
        product.validate()?;
        Ok(product)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidProduct("empty product id".into()));
        }
        if self.level < 1 {
            return Err(Error::InvalidProduct(format!(
                "product {}: level must be >= 1",
                self.id
            )));
        }
        if !self.revenue.is_finite() || self.revenue < 0.0 {
            return Err(Error::InvalidProduct(format!(
                "product {}: revenue must be a finite nonnegative number, got {}",
                self.id, self.revenue
            )));
        }
        if !self.utility.is_finite() || self.utility <= 0.0 {
            return Err(Error::InvalidProduct(format!(
                "product {}: utility must be a finite positive number, got {}",
                self.id, self.utility
            )));
        }
        Ok(())
    }
}

/// Full problem input: the product universe, partitioned into levels, plus
/// the utility of the outside (no-purchase) option.
///
/// Products keep the order they were given in. Within each level the
/// instance also maintains a canonical order: revenue descending, ties
/// broken by ascending id. Revenue prefixes and thresholds are taken with
/// respect to that canonical order.
#[derive(Debug, Clone)]
pub struct Instance {
    products: Vec<Product>,
    outside_utility: f64,
    by_id: HashMap<String, usize>,
    // level -> product indices in canonical order
    levels: BTreeMap<u32, Vec<usize>>,
    // product index -> position within its level's canonical order
    rank: Vec<usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.outside_utility == other.outside_utility && self.products == other.products
    }
}

impl Instance {
    pub fn new(products: Vec<Product>, outside_utility: f64) -> Result<Self> {
        if !outside_utility.is_finite() || outside_utility < 0.0 {
            return Err(Error::InvalidInstance(format!(
                "outside utility must be a finite nonnegative number, got {outside_utility}"
            )));
        }
        let mut by_id = HashMap::with_capacity(products.len());
        for (index, product) in products.iter().enumerate() {
            product.validate()?;
            if by_id.insert(product.id.clone(), index).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "duplicate product id {}",
                    product.id
                )));
            }
        }

        let mut levels: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (index, product) in products.iter().enumerate() {
            levels.entry(product.level).or_default().push(index);
        }
        let mut rank = vec![0; products.len()];
        for order in levels.values_mut() {
            order.sort_by(|&a, &b| {
                let (pa, pb) = (&products[a], &products[b]);
                pb.revenue
                    .total_cmp(&pa.revenue)
                    .then_with(|| pa.id.cmp(&pb.id))
            });
            for (position, &index) in order.iter().enumerate() {
                rank[index] = position;
            }
        }

        Ok(Instance {
            products,
            outside_utility,
            by_id,
            levels,
            rank,
        })
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn product(&self, index: usize) -> &Product {
        &self.products[index]
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn outside_utility(&self) -> f64 {
        self.outside_utility
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::InvalidAssortment(format!("unknown product id {id}")))
    }

    /// Distinct levels present in the instance, ascending.
    pub fn levels(&self) -> impl Iterator<Item = u32> + '_ {
        self.levels.keys().copied()
    }

    /// Product indices of `level` in canonical order (empty if the level is
    /// absent).
    pub fn level_order(&self, level: u32) -> &[usize] {
        self.levels.get(&level).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of products in `level` (`m_i`).
    pub fn level_size(&self, level: u32) -> usize {
        self.level_order(level).len()
    }

    /// Position of a product within its level's canonical order.
    pub fn canonical_rank(&self, index: usize) -> usize {
        self.rank[index]
    }

    pub fn is_two_level(&self) -> bool {
        self.levels.keys().all(|&level| level == 1 || level == 2)
    }

    pub(crate) fn require_two_level(&self) -> Result<()> {
        match self.levels.keys().find(|&&level| level > 2) {
            Some(level) => Err(Error::UnsupportedModel(format!(
                "SML requires levels in {{1,2}}, found level {level}; use the PALM operations"
            ))),
            None => Ok(()),
        }
    }

    /// Builds an assortment from product ids.
    pub fn assortment<S: AsRef<str>>(&self, ids: &[S]) -> Result<Assortment> {
        let indices = ids
            .iter()
            .map(|id| self.index_of(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Assortment::from_indices(indices))
    }

    /// The assortment containing every product.
    pub fn full_assortment(&self) -> Assortment {
        Assortment::from_indices(0..self.len())
    }

    pub fn validate(&self, assortment: &Assortment) -> Result<()> {
        match assortment.members.last() {
            Some(&last) if last >= self.len() => Err(Error::InvalidAssortment(format!(
                "product index {last} out of range for an instance with {} products",
                self.len()
            ))),
            _ => Ok(()),
        }
    }

    /// Member ids of `assortment`, in instance order.
    pub fn ids(&self, assortment: &Assortment) -> Vec<String> {
        assortment
            .iter()
            .map(|index| self.products[index].id.clone())
            .collect()
    }

    /// The level slice `S_level` of an assortment.
    pub fn level_slice(&self, assortment: &Assortment, level: u32) -> Assortment {
        Assortment {
            members: assortment
                .iter()
                .filter(|&index| self.products[index].level == level)
                .collect(),
        }
    }

    /// Union of the first `cutoffs[i]` canonical products of the `i`-th
    /// level in `levels`.
    pub(crate) fn prefix_union(&self, levels: &[u32], cutoffs: &[usize]) -> Assortment {
        let members = levels
            .iter()
            .zip(cutoffs)
            .flat_map(|(&level, &cut)| self.level_order(level)[..cut].iter().copied());
        Assortment::from_indices(members)
    }
}

/// A subset of an instance's products, stored as sorted product indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Assortment {
    members: Vec<usize>,
}

impl Assortment {
    pub fn empty() -> Self {
        Assortment::default()
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = indices.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Assortment { members }
    }

    pub(crate) fn from_mask(mask: u64) -> Self {
        Assortment {
            members: (0..64).filter(|bit| mask >> bit & 1 == 1).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &Assortment) -> bool {
        self.members.iter().all(|&index| other.contains(index))
    }

    pub fn is_proper_subset_of(&self, other: &Assortment) -> bool {
        self.len() < other.len() && self.is_subset_of(other)
    }

    pub fn is_disjoint(&self, other: &Assortment) -> bool {
        self.members.iter().all(|&index| !other.contains(index))
    }

    pub fn union(&self, other: &Assortment) -> Assortment {
        Assortment::from_indices(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &Assortment) -> Assortment {
        Assortment {
            members: self.iter().filter(|&index| !other.contains(index)).collect(),
        }
    }
}

impl FromIterator<usize> for Assortment {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Assortment::from_indices(iter)
    }
}

impl fmt::Display for Assortment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, index) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{index}")?;
        }
        write!(f, "}}")
    }
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::Domain(format!("{value} is not a probability")))
        }
    }

    /// Wraps a computed value, absorbing rounding excursions just outside
    /// `[0, 1]`.
    pub(crate) fn from_computed(value: f64) -> Self {
        debug_assert!(
            (-1e-9..=1.0 + 1e-9).contains(&value),
            "computed probability {value} out of range"
        );
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}
