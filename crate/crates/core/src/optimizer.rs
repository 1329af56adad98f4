//! Revenue-maximizing assortments.
//!
//! Every SML optimum is revenue-ordered by level: the union of a revenue
//! prefix of level 1 and a revenue prefix of level 2. [`solve_rol`] scores
//! all `(m1 + 1)(m2 + 1)` such unions and is exact. [`solve_revenue_ordered`]
//! is the classic single-threshold heuristic, [`solve_brute_force`] the
//! exhaustive oracle. [`first_gap`] and [`verify_optimality_bounds`] expose
//! the structural facts behind the exactness result so they can be checked
//! on concrete instances.
//!
//! Ties: every solver first computes the best score over its whole
//! candidate set and only then picks, among candidates within
//! [`tie_tolerance`] of it, the one preferred by the solver's tie rule.

use std::fmt;

use crate::choice::{alpha_of, palm_revenue, sml_revenue, utility_sum};
use crate::error::{Error, Result};
use crate::model::{Assortment, Instance};
use crate::EPSILON;

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;
pub const DEFAULT_PALM_CANDIDATE_CAP: u64 = 10_000_000;
/// Above this many products in `S*`, the subset check of
/// [`verify_optimality_bounds`] falls back to singletons.
pub const DEFAULT_SUBSET_CHECK_CAP: usize = 15;

/// Scores within this distance of the best are treated as ties.
pub fn tie_tolerance(best: f64) -> f64 {
    1e-12 * best.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Rol,
    Ro,
    BruteForce,
    PalmRol,
    PalmBruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rol => "ROL",
            Method::Ro => "RO",
            Method::BruteForce => "BRUTE_FORCE",
            Method::PalmRol => "PALM_ROL",
            Method::PalmBruteForce => "PALM_BRUTE_FORCE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub assortment: Assortment,
    pub revenue: f64,
    pub method: Method,
    /// Per-level prefix lengths `(j_1, j_2, ...)` for threshold methods.
    pub thresholds: Option<Vec<usize>>,
    /// Number of candidate assortments scored.
    pub evaluations: u64,
    /// Whether the method is proven to return an optimum. False for the RO
    /// heuristic and for PALM_ROL with more than two levels, where
    /// optimality is only conjectured.
    pub certified_optimal: bool,
}

/// Index of the first score within the tie tolerance of the maximum.
fn first_near_max(scores: &[f64]) -> usize {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = best - tie_tolerance(best);
    scores
        .iter()
        .position(|&s| s >= floor)
        .expect("at least one candidate")
}

fn rol_cutoffs(instance: &Instance) -> Vec<(usize, usize)> {
    let (m1, m2) = (instance.level_size(1), instance.level_size(2));
    (0..=m1)
        .flat_map(|j1| (0..=m2).map(move |j2| (j1, j2)))
        .collect()
}

/// All revenue-ordered-by-level assortments `N_{1,j1} ∪ N_{2,j2}`, in
/// lexicographic `(j1, j2)` order. There are exactly `(m1 + 1)(m2 + 1)` of
/// them, the empty set included.
pub fn enumerate_rol_candidates(instance: &Instance) -> Result<Vec<Assortment>> {
    instance.require_two_level()?;
    Ok(rol_cutoffs(instance)
        .into_iter()
        .map(|(j1, j2)| instance.prefix_union(&[1, 2], &[j1, j2]))
        .collect())
}

/// Exact SML optimum over the revenue-ordered-by-level candidates. Ties go
/// to the lexicographically smallest `(j1, j2)`.
pub fn solve_rol(instance: &Instance) -> Result<OptimizationResult> {
    instance.require_two_level()?;
    let cutoffs = rol_cutoffs(instance);
    let candidates: Vec<Assortment> = cutoffs
        .iter()
        .map(|&(j1, j2)| instance.prefix_union(&[1, 2], &[j1, j2]))
        .collect();
    let scores: Vec<f64> = candidates
        .iter()
        .map(|s| sml_revenue(instance, s.indices()))
        .collect();
    let pick = first_near_max(&scores);
    let (j1, j2) = cutoffs[pick];
    Ok(OptimizationResult {
        assortment: candidates[pick].clone(),
        revenue: scores[pick],
        method: Method::Rol,
        thresholds: Some(vec![j1, j2]),
        evaluations: candidates.len() as u64,
        certified_optimal: true,
    })
}

/// Best global revenue-threshold assortment: for every distinct revenue
/// `rho`, offer all products (of either level) with revenue at least `rho`;
/// the empty set is also a candidate. Ties go to the smaller set.
pub fn solve_revenue_ordered(instance: &Instance) -> Result<OptimizationResult> {
    instance.require_two_level()?;
    let mut revenues: Vec<f64> = instance.products().iter().map(|p| p.revenue).collect();
    revenues.sort_by(|a, b| b.total_cmp(a));
    revenues.dedup();

    let level_cut = |level: u32, threshold: f64| {
        instance
            .level_order(level)
            .iter()
            .take_while(|&&i| instance.product(i).revenue >= threshold)
            .count()
    };
    let cutoffs: Vec<(usize, usize)> = std::iter::once((0, 0))
        .chain(
            revenues
                .iter()
                .map(|&rho| (level_cut(1, rho), level_cut(2, rho))),
        )
        .collect();
    let candidates: Vec<Assortment> = cutoffs
        .iter()
        .map(|&(j1, j2)| instance.prefix_union(&[1, 2], &[j1, j2]))
        .collect();
    let scores: Vec<f64> = candidates
        .iter()
        .map(|s| sml_revenue(instance, s.indices()))
        .collect();
    let pick = first_near_max(&scores);
    let (j1, j2) = cutoffs[pick];
    Ok(OptimizationResult {
        assortment: candidates[pick].clone(),
        revenue: scores[pick],
        method: Method::Ro,
        thresholds: Some(vec![j1, j2]),
        evaluations: candidates.len() as u64,
        certified_optimal: false,
    })
}

pub fn solve_brute_force(instance: &Instance) -> Result<OptimizationResult> {
    solve_brute_force_with_cap(instance, DEFAULT_BRUTE_FORCE_CAP)
}

/// Scores all `2^n` subsets under SML. Ties go to the smallest set, then to
/// the lexicographically smallest sorted id list.
pub fn solve_brute_force_with_cap(instance: &Instance, cap: usize) -> Result<OptimizationResult> {
    instance.require_two_level()?;
    brute_force(instance, cap, Method::BruteForce, sml_revenue)
}

pub fn palm_solve_brute_force(instance: &Instance) -> Result<OptimizationResult> {
    palm_solve_brute_force_with_cap(instance, DEFAULT_BRUTE_FORCE_CAP)
}

/// Brute force under PALM, for any number of levels.
pub fn palm_solve_brute_force_with_cap(
    instance: &Instance,
    cap: usize,
) -> Result<OptimizationResult> {
    brute_force(instance, cap, Method::PalmBruteForce, palm_revenue)
}

fn brute_force(
    instance: &Instance,
    cap: usize,
    method: Method,
    score: fn(&Instance, &[usize]) -> f64,
) -> Result<OptimizationResult> {
    let n = instance.len();
    if n > cap || n > 30 {
        return Err(Error::ResourceLimit(format!(
            "brute force over {n} products exceeds the cap of {}",
            cap.min(30)
        )));
    }
    let count: u64 = 1 << n;
    let mut members = Vec::with_capacity(n);
    let mut eval = |mask: u64| {
        members.clear();
        members.extend((0..n).filter(|&i| mask >> i & 1 == 1));
        score(instance, &members)
    };

    let mut best = f64::NEG_INFINITY;
    for mask in 0..count {
        best = best.max(eval(mask));
    }
    let floor = best - tie_tolerance(best);

    let sorted_ids = |mask: u64| {
        let mut ids: Vec<&str> = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| instance.product(i).id.as_str())
            .collect();
        ids.sort_unstable();
        ids
    };
    let mut chosen: Option<(u64, f64)> = None;
    for mask in 0..count {
        let value = eval(mask);
        if value < floor {
            continue;
        }
        let better = match chosen {
            None => true,
            Some((current, _)) => {
                (mask.count_ones(), sorted_ids(mask)) < (current.count_ones(), sorted_ids(current))
            }
        };
        if better {
            chosen = Some((mask, value));
        }
    }
    let (mask, revenue) = chosen.expect("the empty set is always scored");
    Ok(OptimizationResult {
        assortment: Assortment::from_mask(mask),
        revenue,
        method,
        thresholds: None,
        evaluations: count,
        certified_optimal: true,
    })
}

pub fn palm_solve_rol(instance: &Instance) -> Result<OptimizationResult> {
    palm_solve_rol_with_cap(instance, DEFAULT_PALM_CANDIDATE_CAP)
}

/// Revenue-ordered-by-level search under PALM with any number of levels:
/// scores every combination of per-level revenue prefixes. With at most two
/// levels this coincides with [`solve_rol`]; beyond that the result is only
/// conjectured to be optimal and `certified_optimal` is false.
pub fn palm_solve_rol_with_cap(instance: &Instance, cap: u64) -> Result<OptimizationResult> {
    let levels: Vec<u32> = instance.levels().collect();
    let radix: Vec<usize> = levels.iter().map(|&l| instance.level_size(l) + 1).collect();
    let total = radix
        .iter()
        .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
        .filter(|&t| t <= cap)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "PALM ROL enumeration over levels of sizes {:?} exceeds the cap of {cap}",
                radix.iter().map(|r| r - 1).collect::<Vec<_>>()
            ))
        })?;

    // Mixed-radix counter, first level most significant.
    let for_each = |f: &mut dyn FnMut(&[usize])| {
        let mut digits = vec![0usize; radix.len()];
        loop {
            f(&digits);
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < radix[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
    };
    let score = |digits: &[usize]| {
        let s = instance.prefix_union(&levels, digits);
        palm_revenue(instance, s.indices())
    };

    let mut best = f64::NEG_INFINITY;
    for_each(&mut |digits| best = best.max(score(digits)));
    let floor = best - tie_tolerance(best);
    let mut chosen: Option<(Vec<usize>, f64)> = None;
    for_each(&mut |digits| {
        if chosen.is_none() {
            let value = score(digits);
            if value >= floor {
                chosen = Some((digits.to_vec(), value));
            }
        }
    });
    let (digits, revenue) = chosen.expect("the empty set is always scored");
    Ok(OptimizationResult {
        assortment: instance.prefix_union(&levels, &digits),
        revenue,
        method: Method::PalmRol,
        thresholds: Some(digits),
        evaluations: total,
        certified_optimal: levels.len() <= 2,
    })
}

/// The first gap of an assortment: on the smallest level `k` where some
/// excluded product ranks above an offered one, the block `gap` of excluded
/// products right above the first offered product below it, together with
/// the offered products above (`head`) and below (`tail`) that block.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub has_gap: bool,
    pub level: Option<u32>,
    pub gap: Assortment,
    pub head: Assortment,
    pub tail: Assortment,
}

impl GapReport {
    fn none() -> Self {
        GapReport {
            has_gap: false,
            level: None,
            gap: Assortment::empty(),
            head: Assortment::empty(),
            tail: Assortment::empty(),
        }
    }
}

/// Locates the first gap. Products are compared by their rank in the
/// canonical per-level order, which is the revenue order with ties broken
/// by id, so an assortment has no gap exactly when it is one of
/// [`enumerate_rol_candidates`].
pub fn first_gap(instance: &Instance, assortment: &Assortment) -> Result<GapReport> {
    instance.require_two_level()?;
    instance.validate(assortment)?;
    for level in [1, 2] {
        let order = instance.level_order(level);
        let offered: Vec<bool> = order.iter().map(|&i| assortment.contains(i)).collect();
        let (Some(first_missing), Some(last_offered)) = (
            offered.iter().position(|&o| !o),
            offered.iter().rposition(|&o| o),
        ) else {
            continue;
        };
        if first_missing > last_offered {
            continue;
        }
        // The block of missing ranks starting at `first_missing` ends right
        // before the next offered rank (which exists since last_offered is
        // beyond it). When nothing is offered above `first_missing`, the
        // block is every rank above the first offered product.
        let gap_end = first_missing
            + offered[first_missing..]
                .iter()
                .position(|&o| o)
                .expect("an offered rank follows the first missing one");
        let gap_ranks = first_missing..gap_end;
        let pick = |f: &dyn Fn(usize) -> bool| {
            Assortment::from_indices(
                order
                    .iter()
                    .enumerate()
                    .filter(|&(rank, _)| f(rank))
                    .map(|(_, &i)| i),
            )
        };
        return Ok(GapReport {
            has_gap: true,
            level: Some(level),
            gap: pick(&|rank| gap_ranks.contains(&rank)),
            head: pick(&|rank| rank < gap_ranks.start && offered[rank]),
            tail: pick(&|rank| rank >= gap_ranks.end && offered[rank]),
        });
    }
    Ok(GapReport::none())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs >= rhs - 1e-9`.
    pub passed: bool,
    /// Number of cases folded into this row (subsets for the subset check).
    pub cases: usize,
}

impl BoundCheck {
    fn new(name: impl Into<String>, lhs: f64, rhs: f64, cases: usize) -> Self {
        BoundCheck {
            name: name.into(),
            lhs,
            rhs,
            passed: lhs >= rhs - EPSILON,
            cases,
        }
    }
}

/// Necessary conditions of an optimal assortment `S*` with revenue `R*`:
///
/// * `alpha(S1*) >= R*`
/// * `alpha(S2*) >= R* / (1 - lambda(S1*, S*))`
/// * `alpha(Z) >= R*` for every nonempty `Z` inside one level of `S*`
/// * `r(x) >= R*` for every offered `x`
///
/// `informational` holds the per-product version of the level-2 bound,
/// which is not implied by optimality and may legitimately fail.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub optimal_revenue: f64,
    pub alpha_level1: Option<f64>,
    pub alpha_level2: Option<f64>,
    pub lambda_level1: f64,
    pub checks: Vec<BoundCheck>,
    pub informational: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verify_optimality_bounds(
    instance: &Instance,
    optimal: &OptimizationResult,
) -> Result<BoundReport> {
    verify_optimality_bounds_with_cap(instance, optimal, DEFAULT_SUBSET_CHECK_CAP)
}

/// Evaluates the bounds for `optimal.assortment`. The caller vouches that
/// it is optimal; for any other assortment some checks may fail.
pub fn verify_optimality_bounds_with_cap(
    instance: &Instance,
    optimal: &OptimizationResult,
    subset_cap: usize,
) -> Result<BoundReport> {
    instance.require_two_level()?;
    let s = &optimal.assortment;
    instance.validate(s)?;
    let r_star = sml_revenue(instance, s.indices());
    let s1 = instance.level_slice(s, 1);
    let s2 = instance.level_slice(s, 2);
    let denominator = utility_sum(instance, s.indices()) + instance.outside_utility();
    let lambda1 = if s1.is_empty() {
        0.0
    } else {
        utility_sum(instance, s1.indices()) / denominator
    };
    let alpha1 = (!s1.is_empty()).then(|| alpha_of(instance, s1.indices()));
    let alpha2 = (!s2.is_empty()).then(|| alpha_of(instance, s2.indices()));
    let level2_target = r_star / (1.0 - lambda1);

    let mut checks = Vec::new();
    if let Some(a1) = alpha1 {
        checks.push(BoundCheck::new("level1_alpha", a1, r_star, 1));
    }
    if let Some(a2) = alpha2 {
        checks.push(BoundCheck::new("level2_alpha", a2, level2_target, 1));
    }
    let exhaustive = s.len() <= subset_cap;
    for (level, slice) in [(1, &s1), (2, &s2)] {
        if slice.is_empty() {
            continue;
        }
        let (min_alpha, cases) = if exhaustive {
            min_subset_alpha(instance, slice.indices())
        } else {
            let min = slice
                .iter()
                .map(|i| instance.product(i).revenue)
                .fold(f64::INFINITY, f64::min);
            (min, slice.len())
        };
        checks.push(BoundCheck::new(
            format!("level{level}_subset_alpha"),
            min_alpha,
            r_star,
            cases,
        ));
    }
    for x in s.iter() {
        let p = instance.product(x);
        checks.push(BoundCheck::new(
            format!("revenue_at_least_optimum[{}]", p.id),
            p.revenue,
            r_star,
            1,
        ));
    }
    let informational = s2
        .iter()
        .map(|x| {
            let p = instance.product(x);
            BoundCheck::new(
                format!("level2_product_bound[{}]", p.id),
                p.revenue,
                level2_target,
                1,
            )
        })
        .collect();

    Ok(BoundReport {
        optimal_revenue: r_star,
        alpha_level1: alpha1,
        alpha_level2: alpha2,
        lambda_level1: lambda1,
        checks,
        informational,
    })
}

fn min_subset_alpha(instance: &Instance, members: &[usize]) -> (f64, usize) {
    let count = 1u64 << members.len();
    let mut subset = Vec::with_capacity(members.len());
    let mut min = f64::INFINITY;
    for mask in 1..count {
        subset.clear();
        subset.extend(
            members
                .iter()
                .enumerate()
                .filter(|&(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &i)| i),
        );
        min = min.min(alpha_of(instance, &subset));
    }
    (min, (count - 1) as usize)
}
