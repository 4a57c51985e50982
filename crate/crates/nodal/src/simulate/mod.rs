//! Monte Carlo sampler of the monochromatic random wave, grid evaluation,
//! nodal-domain extraction, and ensemble statistics.
//!
//! One draw of the wave is
//!
//! ```text
//! F(r, theta) = xi0 J_0(r) + sqrt(2) sum_{n=1}^{N} (xi_n cos n theta + eta_n sin n theta) J_n(r)
//! ```
//!
//! with independent standard normal coefficients. Coefficients come from a
//! counter-based stream keyed by (master seed, sample index, coefficient
//! index), so ensembles reproduce bit-for-bit under any parallel schedule.

pub mod census;
pub mod ensemble;
pub mod export;

pub use census::{nodal_census, ComponentRecord, NodalCensus, FABER_KRAHN_AREA_FLOOR};
pub use ensemble::{circle_crossings, estimate_mu, CrossingStats, EnsembleStats, HoleStat};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimulateError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field evaluation outside envelope: {0}")]
    Envelope(String),
    #[error("need at least one term, one sample")]
    EmptyRequest,
}

/// One truncated coefficient vector realizing a draw of the wave.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveSample {
    pub xi0: f64,
    /// xi_1 .. xi_N
    pub xi: Vec<f64>,
    /// eta_1 .. eta_N
    pub eta: Vec<f64>,
    pub n_terms: usize,
    pub seed: u64,
    pub sample_index: u64,
    pub xi0_override: Option<f64>,
}

impl WaveSample {
    /// Draws the sample for `(seed, sample_index)`. Coefficient `i` of the
    /// flat stream (0 = xi0, 2n-1 = xi_n, 2n = eta_n) is produced by one
    /// Box-Muller pair read at a fixed counter position, so every coefficient
    /// is reproducible independently of evaluation order.
    pub fn draw(seed: u64, sample_index: u64, n_terms: usize, xi0_override: Option<f64>) -> Self {
        assert!(n_terms >= 1, "n_terms must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample_index);
        let mut normal = |index: u64| -> f64 {
            rng.set_word_pos((index as u128) * 4);
            let a = rng.next_u64();
            let b = rng.next_u64();
            // u1 in (0, 1], u2 in [0, 1)
            let u1 = ((a >> 11) + 1) as f64 * (1.0 / 9007199254740992.0);
            let u2 = (b >> 11) as f64 * (1.0 / 9007199254740992.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let xi0 = xi0_override.unwrap_or_else(|| normal(0));
        let mut xi = Vec::with_capacity(n_terms);
        let mut eta = Vec::with_capacity(n_terms);
        for n in 1..=n_terms as u64 {
            xi.push(normal(2 * n - 1));
            eta.push(normal(2 * n));
        }
        WaveSample {
            xi0,
            xi,
            eta,
            n_terms,
            seed,
            sample_index,
            xi0_override,
        }
    }

    /// Evaluates the truncated series at a single point given in Cartesian
    /// coordinates.
    pub fn evaluate_at(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        let theta = y.atan2(x);
        let mut js = vec![0.0; self.n_terms + 1];
        crate::specfun::bessel_j_all_into(r, &mut js);
        self.evaluate_with_scratch(r, theta, &js)
    }

    fn evaluate_with_scratch(&self, _r: f64, theta: f64, js: &[f64]) -> f64 {
        let mut acc = self.xi0 * js[0];
        let (c1, s1) = (theta.cos(), theta.sin());
        let (mut c, mut s) = (c1, s1);
        for n in 1..=self.n_terms {
            acc += std::f64::consts::SQRT_2 * (self.xi[n - 1] * c + self.eta[n - 1] * s) * js[n];
            let cn = c * c1 - s * s1;
            let sn = s * c1 + c * s1;
            c = cn;
            s = sn;
        }
        acc
    }
}

/// Samples the wave for a standalone (seed, stream 0) draw.
pub fn sample_wave(n_terms: usize, seed: u64, xi0_override: Option<f64>) -> WaveSample {
    WaveSample::draw(seed, 0, n_terms, xi0_override)
}

/// Square evaluation grid [-L, L]^2 with a counting disk of radius R.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    /// points per axis, endpoints included
    pub resolution: usize,
    pub counting_radius: f64,
}

impl GridSpec {
    pub fn new(
        half_width: f64,
        resolution: usize,
        counting_radius: f64,
    ) -> Result<Self, SimulateError> {
        if !(half_width > 0.0 && half_width <= 100.0) {
            return Err(SimulateError::InvalidGrid(format!(
                "half width {half_width} outside (0, 100]"
            )));
        }
        if resolution < 64 {
            return Err(SimulateError::InvalidGrid(format!(
                "resolution {resolution} below 64"
            )));
        }
        if !(counting_radius > 0.0 && counting_radius < half_width) {
            return Err(SimulateError::InvalidGrid(format!(
                "counting radius {counting_radius} not inside (0, {half_width})"
            )));
        }
        Ok(GridSpec {
            half_width,
            resolution,
            counting_radius,
        })
    }

    /// The default counting disk R = 0.9 L.
    pub fn with_default_radius(half_width: f64, resolution: usize) -> Result<Self, SimulateError> {
        Self::new(half_width, resolution, 0.9 * half_width)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.resolution - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }
}

/// A sampled field on a [`GridSpec`], row-major with `y` as the row axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldGrid {
    pub grid: GridSpec,
    pub seed: u64,
    pub sample_index: u64,
    pub n_terms: usize,
    pub xi0: f64,
    pub values: Vec<f64>,
}

impl FieldGrid {
    #[inline]
    pub fn idx(&self, row: usize, col: usize) -> usize {
        row * self.grid.resolution + col
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[self.idx(row, col)]
    }
}

/// Evaluates one sample over the grid.
pub fn evaluate_field(sample: &WaveSample, grid: &GridSpec) -> Result<FieldGrid, SimulateError> {
    let diag = grid.half_width * std::f64::consts::SQRT_2;
    if diag > 150.0 {
        return Err(SimulateError::Envelope(format!(
            "box diagonal {diag} beyond the evaluation envelope"
        )));
    }
    let res = grid.resolution;
    let mut values = vec![0.0; res * res];
    let mut js = vec![0.0; sample.n_terms + 1];
    for row in 0..res {
        let y = grid.coord(row);
        for col in 0..res {
            let x = grid.coord(col);
            let r = x.hypot(y);
            let theta = y.atan2(x);
            crate::specfun::bessel_j_all_into(r, &mut js);
            values[row * res + col] = sample.evaluate_with_scratch(r, theta, &js);
        }
    }
    Ok(FieldGrid {
        grid: *grid,
        seed: sample.seed,
        sample_index: sample.sample_index,
        n_terms: sample.n_terms,
        xi0: sample.xi0,
        values,
    })
}
