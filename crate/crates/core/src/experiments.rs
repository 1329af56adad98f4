//! Random instance families and the RO-vs-ROL benchmark.
//!
//! A family is `(n1, n2, u0)` plus a number of instances and a seed.
//! Instance `i` of a family is drawn from a ChaCha8 generator seeded with
//! `seed_from_u64(seed)` on stream `i`: first the `n1` level-1 products,
//! then the `n2` level-2 products, each as a revenue draw followed by a
//! utility draw, both uniform on the configured half-open ranges.
//! Utility draws that come out as zero are redrawn. The same
//! `(seed, index)` yields the same instance on every platform.
//!
//! The gap of an instance is `100 * (R_ROL - R_RO) / R_ROL`, the percentage
//! of the optimal revenue lost by the best single-threshold assortment.
//! Timings are wall-clock per solver call and are not reproducible.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Product};
use crate::optimizer::{solve_revenue_ordered, solve_rol, tie_tolerance};

pub const DEFAULT_INSTANCES: usize = 100;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_RANGE: [f64; 2] = [0.0, 10.0];

/// `(n1, n2)` sizes of the default grid.
pub const GRID_SIZES: [(usize, usize); 4] = [(5, 5), (10, 10), (20, 20), (50, 50)];
/// Outside-option utilities of the default grid.
pub const GRID_OUTSIDE_UTILITIES: [f64; 5] = [0.0, 1.0, 2.5, 5.0, 10.0];

pub const CSV_HEADER: &str = "n1,n2,u0,avg_gap_pct,worst_gap_pct,avg_time_ro_s,avg_time_rol_s";

fn default_instances() -> usize {
    DEFAULT_INSTANCES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_range() -> [f64; 2] {
    DEFAULT_RANGE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub n1: usize,
    pub n2: usize,
    pub u0: f64,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_range")]
    pub revenue_range: [f64; 2],
    #[serde(default = "default_range")]
    pub utility_range: [f64; 2],
}

impl FamilyConfig {
    pub fn new(n1: usize, n2: usize, u0: f64) -> Self {
        FamilyConfig {
            n1,
            n2,
            u0,
            instances: DEFAULT_INSTANCES,
            seed: DEFAULT_SEED,
            revenue_range: DEFAULT_RANGE,
            utility_range: DEFAULT_RANGE,
        }
    }

    pub fn with_instances(mut self, instances: usize) -> Self {
        self.instances = instances;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances < 1 {
            return Err(Error::Config("a family needs at least one instance".into()));
        }
        if !self.u0.is_finite() || self.u0 < 0.0 {
            return Err(Error::Config(format!("u0 must be nonnegative, got {}", self.u0)));
        }
        for (name, [lo, hi]) in [
            ("revenue_range", self.revenue_range),
            ("utility_range", self.utility_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
                return Err(Error::Config(format!(
                    "{name} must satisfy 0 <= lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        if self.utility_range[1] <= 0.0 {
            return Err(Error::Config(
                "utility_range must contain positive values".into(),
            ));
        }
        Ok(())
    }
}

/// The 20 families `{(5,5), (10,10), (20,20), (50,50)} x u0 in {0, 1, 2.5, 5, 10}`.
pub fn default_grid(seed: u64, instances: usize) -> Vec<FamilyConfig> {
    GRID_SIZES
        .iter()
        .flat_map(|&(n1, n2)| {
            GRID_OUTSIDE_UTILITIES.iter().map(move |&u0| {
                FamilyConfig::new(n1, n2, u0)
                    .with_seed(seed)
                    .with_instances(instances)
            })
        })
        .collect()
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Instance `index` of the family. Product ids are `x{level}_{j}`.
pub fn generate_instance(config: &FamilyConfig, index: usize) -> Result<Instance> {
    config.validate()?;
    if index >= config.instances {
        return Err(Error::Config(format!(
            "instance index {index} out of range for a family of {}",
            config.instances
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let mut products = Vec::with_capacity(config.n1 + config.n2);
    for (level, count) in [(1u32, config.n1), (2, config.n2)] {
        for j in 1..=count {
            let revenue = uniform(&mut rng, config.revenue_range);
            let utility = loop {
                let u = uniform(&mut rng, config.utility_range);
                if u > 0.0 {
                    break u;
                }
            };
            products.push(Product::new(format!("x{level}_{j}"), level, revenue, utility)?);
        }
    }
    Instance::new(products, config.u0)
}

/// `100 * (R_ROL - R_RO) / R_ROL`, or 0 when `R_ROL` is 0 or the two
/// revenues agree within the solvers' tie tolerance.
pub fn optimality_gap(instance: &Instance) -> Result<f64> {
    let rol = solve_rol(instance)?.revenue;
    let ro = solve_revenue_ordered(instance)?.revenue;
    Ok(gap_pct(rol, ro))
}

fn gap_pct(rol: f64, ro: f64) -> f64 {
    if rol == 0.0 || (rol - ro).abs() <= tie_tolerance(rol) {
        0.0
    } else {
        100.0 * (rol - ro) / rol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub index: usize,
    pub rol_revenue: f64,
    pub ro_revenue: f64,
    pub gap_pct: f64,
    pub time_ro_seconds: f64,
    pub time_rol_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub n1: usize,
    pub n2: usize,
    pub u0: f64,
    pub instances: usize,
    pub avg_gap_pct: f64,
    pub worst_gap_pct: f64,
    pub avg_time_ro_seconds: f64,
    pub avg_time_rol_seconds: f64,
    /// Candidates scored, summed over the family.
    pub ro_evaluations: u64,
    pub rol_evaluations: u64,
    /// Per-instance records; empty unless requested.
    pub details: Vec<InstanceRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyFailure {
    pub position: usize,
    pub config: FamilyConfig,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchmarkReport {
    pub rows: Vec<FamilyRow>,
    pub failures: Vec<FamilyFailure>,
}

pub fn run_benchmark(configs: &[FamilyConfig]) -> BenchmarkReport {
    run_benchmark_with(configs, false)
}

/// Runs every family; a family that fails is recorded in `failures` and
/// the others still run.
pub fn run_benchmark_with(configs: &[FamilyConfig], keep_details: bool) -> BenchmarkReport {
    let mut report = BenchmarkReport::default();
    for (position, config) in configs.iter().enumerate() {
        match run_family(config, keep_details) {
            Ok(row) => report.rows.push(row),
            Err(error) => report.failures.push(FamilyFailure {
                position,
                config: config.clone(),
                error,
            }),
        }
    }
    report
}

fn run_family(config: &FamilyConfig, keep_details: bool) -> Result<FamilyRow> {
    config.validate()?;
    let mut records = Vec::with_capacity(config.instances);
    let mut ro_evaluations = 0;
    let mut rol_evaluations = 0;
    for index in 0..config.instances {
        let instance = generate_instance(config, index)?;
        let start = Instant::now();
        let ro = solve_revenue_ordered(&instance)?;
        let time_ro = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let rol = solve_rol(&instance)?;
        let time_rol = start.elapsed().as_secs_f64();
        ro_evaluations += ro.evaluations;
        rol_evaluations += rol.evaluations;
        records.push(InstanceRecord {
            index,
            rol_revenue: rol.revenue,
            ro_revenue: ro.revenue,
            gap_pct: gap_pct(rol.revenue, ro.revenue),
            time_ro_seconds: time_ro,
            time_rol_seconds: time_rol,
        });
    }
    let n = records.len() as f64;
    let worst = records.iter().map(|r| r.gap_pct).fold(0.0, f64::max);
    let avg = (records.iter().map(|r| r.gap_pct).sum::<f64>() / n).min(worst);
    Ok(FamilyRow {
        n1: config.n1,
        n2: config.n2,
        u0: config.u0,
        instances: config.instances,
        avg_gap_pct: avg,
        worst_gap_pct: worst,
        avg_time_ro_seconds: records.iter().map(|r| r.time_ro_seconds).sum::<f64>() / n,
        avg_time_rol_seconds: records.iter().map(|r| r.time_rol_seconds).sum::<f64>() / n,
        ro_evaluations,
        rol_evaluations,
        details: if keep_details { records } else { Vec::new() },
    })
}

impl BenchmarkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.n1,
                row.n2,
                row.u0,
                row.avg_gap_pct,
                row.worst_gap_pct,
                row.avg_time_ro_seconds,
                row.avg_time_rol_seconds
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>9} {:>6} {:>12} {:>14} {:>14} {:>14}",
            "(n1,n2)", "u0", "avg gap %", "worst gap %", "avg RO (s)", "avg ROL (s)"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:>9} {:>6} {:>12.3} {:>14.3} {:>14.6} {:>14.6}",
                format!("({},{})", row.n1, row.n2),
                row.u0,
                row.avg_gap_pct,
                row.worst_gap_pct,
                row.avg_time_ro_seconds,
                row.avg_time_rol_seconds
            );
        }
        for failure in &self.failures {
            let _ = writeln!(
                out,
                "family #{} ({},{},{}) failed: {}",
                failure.position, failure.config.n1, failure.config.n2, failure.config.u0,
                failure.error
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example;

    #[test]
    fn generation_is_deterministic() {
        let config = FamilyConfig::new(5, 5, 1.0).with_seed(7);
        let a = generate_instance(&config, 3).unwrap();
        let b = generate_instance(&config, 3).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(&config, 4).unwrap();
        assert_ne!(a, c);
        let d = generate_instance(&config.clone().with_seed(8), 3).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn generated_instance_shape() {
        let config = FamilyConfig::new(5, 5, 1.0);
        for index in 0..config.instances {
            let inst = generate_instance(&config, index).unwrap();
            assert_eq!(inst.len(), 10);
            assert_eq!(inst.level_size(1), 5);
            assert_eq!(inst.level_size(2), 5);
            assert_eq!(inst.outside_utility(), 1.0);
            for p in inst.products() {
                assert!((0.0..=10.0).contains(&p.revenue));
                assert!(p.utility > 0.0 && p.utility <= 10.0);
            }
        }
        assert!(generate_instance(&FamilyConfig::new(0, 0, 3.0), 0).unwrap().is_empty());
    }

    #[test]
    fn zero_utility_draws_are_redrawn() {
        let mut config = FamilyConfig::new(3, 3, 1.0);
        config.utility_range = [0.0, 1e-300];
        let inst = generate_instance(&config, 0).unwrap();
        assert!(inst.products().iter().all(|p| p.utility > 0.0));
    }

    #[test]
    fn invalid_configs() {
        let mut bad = FamilyConfig::new(1, 1, 1.0);
        bad.instances = 0;
        assert!(matches!(generate_instance(&bad, 0), Err(Error::Config(_))));
        let mut bad = FamilyConfig::new(1, 1, 1.0);
        bad.utility_range = [0.0, 0.0];
        assert!(bad.validate().is_err());
        let mut bad = FamilyConfig::new(1, 1, 1.0);
        bad.revenue_range = [-1.0, 1.0];
        assert!(bad.validate().is_err());
        assert!(FamilyConfig::new(1, 1, -1.0).validate().is_err());
        assert!(generate_instance(&FamilyConfig::new(1, 1, 1.0).with_instances(2), 2).is_err());
    }

    #[test]
    fn gap_on_examples() {
        // 100 * (1 - R'/R*) with R* = 100/11 and R' = 100/13 + 72/169
        let oracle = 100.0 * (1.0 - (100.0 / 13.0 + 72.0 / 169.0) / (100.0 / 11.0));
        let gap = optimality_gap(&example(5)).unwrap();
        assert!((gap - oracle).abs() < 1e-9);
        assert!((gap - 10.7).abs() < 0.5);
        // threshold sets {} and {x11, x21}: 100 * (1 - (122/144) / (10/11))
        let oracle = 100.0 * (1.0 - (122.0 / 144.0) / (10.0 / 11.0));
        assert!((optimality_gap(&example(4)).unwrap() - oracle).abs() < 1e-9);
        assert_eq!(optimality_gap(&example(3)).unwrap(), 0.0);
    }

    #[test]
    fn zero_outside_option_gives_zero_gap() {
        let config = FamilyConfig::new(10, 10, 0.0).with_instances(50);
        for index in 0..config.instances {
            let inst = generate_instance(&config, index).unwrap();
            assert_eq!(optimality_gap(&inst).unwrap(), 0.0);
        }
    }

    #[test]
    fn benchmark_rows_and_failures() {
        assert_eq!(run_benchmark(&[]), BenchmarkReport::default());
        let mut bad = FamilyConfig::new(1, 1, 1.0);
        bad.instances = 0;
        let configs = [
            FamilyConfig::new(5, 5, 0.0).with_instances(20),
            bad,
            FamilyConfig::new(5, 5, 10.0).with_instances(20),
        ];
        let report = run_benchmark_with(&configs, true);
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].position, 1);
        let zero = &report.rows[0];
        assert_eq!((zero.avg_gap_pct, zero.worst_gap_pct), (0.0, 0.0));
        for row in &report.rows {
            assert!(0.0 <= row.avg_gap_pct && row.avg_gap_pct <= row.worst_gap_pct);
            assert!(row.worst_gap_pct <= 100.0);
            assert_eq!(row.details.len(), 20);
            assert_eq!(row.rol_evaluations, 20 * 36);
            assert!(row.ro_evaluations <= 20 * 11);
            assert!(row.details.iter().all(|d| d.gap_pct >= 0.0));
        }
    }

    #[test]
    fn empty_families_report_zero() {
        let report = run_benchmark(&[FamilyConfig::new(0, 0, 1.0).with_instances(3)]);
        assert_eq!(report.rows[0].worst_gap_pct, 0.0);
        assert_eq!(report.rows[0].rol_evaluations, 3);
    }

    #[test]
    fn csv_layout() {
        let report = run_benchmark(&[FamilyConfig::new(2, 2, 2.5).with_instances(2)]);
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(&fields[..3], ["2", "2", "2.5"]);
        assert!(lines.next().is_none());
    }

    #[test]
    fn default_grid_shape() {
        let grid = default_grid(9, 100);
        assert_eq!(grid.len(), 20);
        assert!(grid.iter().all(|c| c.seed == 9 && c.instances == 100));
        assert_eq!(grid.iter().filter(|c| c.u0 == 0.0).count(), 4);
    }

    #[test]
    fn config_file_defaults() {
        let config: FamilyConfig = serde_json::from_str(r#"{"n1":3,"n2":4,"u0":2.5}"#).unwrap();
        assert_eq!(config.instances, DEFAULT_INSTANCES);
        assert_eq!(config.revenue_range, DEFAULT_RANGE);
    }
}
