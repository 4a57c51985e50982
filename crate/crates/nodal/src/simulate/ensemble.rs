//! Ensemble statistics: empirical mu(h), the component-density estimate, and
//! the Monte Carlo circle-crossing oracle.
//!
//! Samples are independent units of work executed on a caller-sized thread
//! pool; per-sample computation is single-threaded and keyed by the sample
//! index, and aggregation folds the per-sample records in index order, so the
//! output is bit-identical for any worker count.

use super::census::nodal_census;
use super::{evaluate_field, GridSpec, SimulateError, WaveSample};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoleStat {
    pub holes: usize,
    pub value: f64,
    pub std_error: f64,
}

/// mu and density estimates under one component-selection rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountingStats {
    pub mu_hat: Vec<HoleStat>,
    /// Counted nodal-set components per unit counting-disk area.
    pub cns_hat: f64,
    pub cns_std_error: f64,
    /// The dimensionless 4 pi c_NS commonly quoted.
    pub four_pi_cns_hat: f64,
    pub total_domains: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub schema: u32,
    pub seed: u64,
    pub grid: GridSpec,
    pub n_terms: usize,
    pub n_samples: usize,
    /// mu_hat(h) for h = 0..=h_max with batch-means standard errors, under
    /// the strict rule (domains lying entirely inside the counting disk).
    pub mu_hat: Vec<HoleStat>,
    /// Interior nodal-set components per unit counting-disk area.
    pub cns_hat: f64,
    pub cns_std_error: f64,
    /// The dimensionless 4 pi c_NS commonly quoted.
    pub four_pi_cns_hat: f64,
    pub total_interior_domains: usize,
    /// The same statistics under the center-of-mass rule (component counted
    /// when its centroid lies in the disk and it is not clipped by the box);
    /// the standard way to remove the finite-window deficit of the strict
    /// rule, which excludes large components disproportionately.
    pub centered_in_disk: CountingStats,
    pub faber_krahn_flags: usize,
    /// Sum over samples of the tree-end histogram, canonical code -> count.
    pub tree_end_histogram: BTreeMap<String, usize>,
    /// Total histogram mass equals the interior curve count in every sample;
    /// recorded as a checked invariant.
    pub tree_end_mass_consistent: bool,
}

struct PerSample {
    interior: usize,
    holes: BTreeMap<usize, usize>,
    centered: usize,
    centered_holes: BTreeMap<usize, usize>,
    flags: usize,
    tree_ends: BTreeMap<String, usize>,
    mass_ok: bool,
}

fn run_sample(grid: &GridSpec, n_terms: usize, seed: u64, index: u64) -> PerSample {
    let sample = WaveSample::draw(seed, index, n_terms, None);
    let field = evaluate_field(&sample, grid).expect("grid validated upfront");
    let census = nodal_census(&field);
    let mut holes = BTreeMap::new();
    for comp in census.components.iter().filter(|c| c.interior()) {
        *holes.entry(comp.hole_count).or_insert(0) += 1;
    }
    let mut centered = 0usize;
    let mut centered_holes = BTreeMap::new();
    for comp in census
        .components
        .iter()
        .filter(|c| c.centroid_radius <= grid.counting_radius && !c.touches_box_frame)
    {
        centered += 1;
        *centered_holes.entry(comp.hole_count).or_insert(0) += 1;
    }
    let mass: usize = census.tree_end_histogram.values().sum();
    PerSample {
        interior: census.n_interior_domains,
        holes,
        centered,
        centered_holes,
        flags: census.faber_krahn_flags,
        tree_ends: census.tree_end_histogram,
        mass_ok: mass == census.n_interior_curves,
    }
}

const H_MAX: usize = 8;

/// Runs `n_samples` independent draws and aggregates hole statistics.
///
/// `workers` sizes the thread pool; the output is identical for any value.
pub fn estimate_mu(
    grid: &GridSpec,
    n_terms: usize,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<EnsembleStats, SimulateError> {
    if n_samples == 0 || n_terms == 0 {
        return Err(SimulateError::EmptyRequest);
    }
    let per_sample = run_parallel(n_samples, workers, |i| {
        run_sample(grid, n_terms, seed, i as u64)
    });

    let mut flags = 0usize;
    let mut tree_ends: BTreeMap<String, usize> = BTreeMap::new();
    let mut mass_ok = true;
    for s in &per_sample {
        flags += s.flags;
        for (code, c) in &s.tree_ends {
            *tree_ends.entry(code.clone()).or_insert(0) += c;
        }
        mass_ok &= s.mass_ok;
    }

    let disk_area = std::f64::consts::PI * grid.counting_radius * grid.counting_radius;
    let strict = counting_stats(
        &per_sample,
        disk_area,
        |s| s.interior,
        |s, h| s.holes.get(&h).copied().unwrap_or(0),
    );
    let centered = counting_stats(
        &per_sample,
        disk_area,
        |s| s.centered,
        |s, h| s.centered_holes.get(&h).copied().unwrap_or(0),
    );

    Ok(EnsembleStats {
        schema: 1,
        seed,
        grid: *grid,
        n_terms,
        n_samples,
        mu_hat: strict.mu_hat.clone(),
        cns_hat: strict.cns_hat,
        cns_std_error: strict.cns_std_error,
        four_pi_cns_hat: strict.four_pi_cns_hat,
        total_interior_domains: strict.total_domains,
        centered_in_disk: centered,
        faber_krahn_flags: flags,
        tree_end_histogram: tree_ends,
        tree_end_mass_consistent: mass_ok,
    })
}

fn counting_stats(
    per_sample: &[PerSample],
    disk_area: f64,
    count_of: impl Fn(&PerSample) -> usize,
    holes_of: impl Fn(&PerSample, usize) -> usize,
) -> CountingStats {
    let n_samples = per_sample.len();
    let n_batches = n_samples.min(10);
    let total: usize = per_sample.iter().map(&count_of).sum();
    let hole_total = |h: usize| -> usize { per_sample.iter().map(|s| holes_of(s, h)).sum() };
    let batch_ratio = |h: usize| -> Vec<f64> {
        (0..n_batches)
            .map(|b| {
                let lo = b * n_samples / n_batches;
                let hi = (b + 1) * n_samples / n_batches;
                let mut num = 0usize;
                let mut den = 0usize;
                for s in &per_sample[lo..hi] {
                    num += holes_of(s, h);
                    den += count_of(s);
                }
                if den == 0 {
                    0.0
                } else {
                    num as f64 / den as f64
                }
            })
            .collect()
    };
    let mu_hat = (0..=H_MAX)
        .map(|h| HoleStat {
            holes: h,
            value: if total == 0 {
                0.0
            } else {
                hole_total(h) as f64 / total as f64
            },
            std_error: batch_std_error(&batch_ratio(h)),
        })
        .collect();
    let cns_hat = total as f64 / n_samples as f64 / disk_area;
    let count_batches: Vec<f64> = (0..n_batches)
        .map(|b| {
            let lo = b * n_samples / n_batches;
            let hi = (b + 1) * n_samples / n_batches;
            per_sample[lo..hi]
                .iter()
                .map(|s| count_of(s) as f64)
                .sum::<f64>()
                / (hi - lo) as f64
                / disk_area
        })
        .collect();
    CountingStats {
        mu_hat,
        cns_hat,
        cns_std_error: batch_std_error(&count_batches),
        four_pi_cns_hat: 4.0 * std::f64::consts::PI * cns_hat,
        total_domains: total,
    }
}

fn batch_std_error(batches: &[f64]) -> f64 {
    let b = batches.len();
    if b < 2 {
        return f64::NAN;
    }
    let mean = batches.iter().sum::<f64>() / b as f64;
    let var = batches.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

/// Map i -> job(i) over a pool of `workers` threads, preserving index order.
fn run_parallel<T: Send, F: Fn(usize) -> T + Sync>(n: usize, workers: usize, job: F) -> Vec<T> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(&job).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossingStats {
    pub schema: u32,
    pub radius: f64,
    pub xi0: f64,
    pub n_samples: usize,
    pub n_angles: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    /// Fraction of samples with an even crossing count (cyclic sign changes
    /// are even by construction; oddness would indicate a counting bug).
    pub even_fraction: f64,
}

/// Counts sign changes of the wave around the circle |x| = r with xi0 pinned,
/// averaged over the ensemble. The Monte Carlo mirror of the Kac-Rice
/// expectation.
pub fn circle_crossings(
    radius: f64,
    xi0: f64,
    n_samples: usize,
    n_terms: usize,
    seed: u64,
    workers: usize,
) -> Result<CrossingStats, SimulateError> {
    if n_samples == 0 || n_terms == 0 {
        return Err(SimulateError::EmptyRequest);
    }
    if !(radius > 0.0 && radius <= 100.0) {
        return Err(SimulateError::Envelope(format!("radius {radius}")));
    }
    const N_ANGLES: usize = 4096;
    let js = crate::specfun::bessel_j_all(n_terms, radius);
    let counts = run_parallel(n_samples, workers, |i| {
        let sample = WaveSample::draw(seed, i as u64, n_terms, Some(xi0));
        let mut signs = vec![false; N_ANGLES];
        let d_theta = 2.0 * std::f64::consts::PI / N_ANGLES as f64;
        let (c1, s1) = (d_theta.cos(), d_theta.sin());
        // start at theta = 0: cos(n*0) = 1, sin = 0
        let mut c = vec![1.0f64; n_terms + 1];
        let mut s = vec![0.0f64; n_terms + 1];
        // per-angle rotation of each harmonic by its own frequency
        let mut rot_c = vec![0.0f64; n_terms + 1];
        let mut rot_s = vec![0.0f64; n_terms + 1];
        rot_c[0] = 1.0;
        rot_s[0] = 0.0;
        for n in 1..=n_terms {
            rot_c[n] = rot_c[n - 1] * c1 - rot_s[n - 1] * s1;
            rot_s[n] = rot_s[n - 1] * c1 + rot_c[n - 1] * s1;
        }
        for (k, slot) in signs.iter_mut().enumerate() {
            let mut acc = sample.xi0 * js[0];
            for n in 1..=n_terms {
                acc += std::f64::consts::SQRT_2
                    * (sample.xi[n - 1] * c[n] + sample.eta[n - 1] * s[n])
                    * js[n];
            }
            *slot = acc > 0.0;
            if k + 1 < N_ANGLES {
                for n in 1..=n_terms {
                    let cn = c[n] * rot_c[n] - s[n] * rot_s[n];
                    let sn = s[n] * rot_c[n] + c[n] * rot_s[n];
                    c[n] = cn;
                    s[n] = sn;
                }
            }
        }
        let mut crossings = 0usize;
        for k in 0..N_ANGLES {
            if signs[k] != signs[(k + 1) % N_ANGLES] {
                crossings += 1;
            }
        }
        crossings
    });
    let n = n_samples as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean) * (c as f64 - mean))
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let even = counts.iter().filter(|&&c| c % 2 == 0).count() as f64 / n;
    Ok(CrossingStats {
        schema: 1,
        radius,
        xi0,
        n_samples,
        n_angles: N_ANGLES,
        seed,
        mean,
        std_error: (var / n).sqrt(),
        even_fraction: even,
    })
}
