//! Bracketed root solving and interval extremum location for the Bessel
//! quantities the bound pipelines consume.

use crate::specfun::{self, j_signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RootfindError {
    #[error("no sign change over [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },
    #[error("zero index {0} outside supported range 1..=20")]
    IndexOutOfRange(u32),
    #[error("unsupported Bessel order {0} (only 0 and 1 have tabulated zeros)")]
    UnsupportedOrder(u32),
    #[error("level band {index} unbounded: eps = {eps} is not below the separating critical value {limit}")]
    BandUnbounded { index: u32, eps: f64, limit: f64 },
    #[error("invalid interval: lo = {lo}, hi = {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error(transparent)]
    Specfun(#[from] specfun::SpecfunError),
}

/// A closed interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, RootfindError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(RootfindError::InvalidInterval { lo, hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

/// Which extremum of order-n Bessel data to search for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    /// sup |J_n(r)|
    AbsValue,
    /// sup |J_n'(r)|
    AbsDeriv,
    /// sup |J_n(r)/r|
    AbsOverR,
}

/// Location and value of an interval supremum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExtremumRecord {
    pub order: u32,
    pub kind: ExtremumKind,
    pub argmax: f64,
    pub max_value: f64,
}

/// Bracketed root via Brent's method: bisection fallback keeps a guaranteed
/// bracket at every step, inverse quadratic interpolation accelerates it.
pub fn find_root<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: Interval,
    tol: f64,
) -> Result<f64, RootfindError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(RootfindError::NoSignChange {
            lo: a,
            hi: b,
            flo: fa,
            fhi: fb,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

/// k-th positive zero of J_0 or J_1, absolute error <= 1e-9.
///
/// Brackets come from the asymptotic pi spacing between consecutive zeros
/// (McMahon), robust for k <= 20.
pub fn bessel_zero(order: u32, k: u32) -> Result<f64, RootfindError> {
    if order > 1 {
        return Err(RootfindError::UnsupportedOrder(order));
    }
    if k == 0 || k > 20 {
        return Err(RootfindError::IndexOutOfRange(k));
    }
    // McMahon: j_{nu,k} ~ beta - (4 nu^2 - 1) / (8 beta)
    let beta = (k as f64 + 0.5 * order as f64 - 0.25) * std::f64::consts::PI;
    let est = beta - (4.0 * (order * order) as f64 - 1.0) / (8.0 * beta);
    let bracket = Interval::new(est - 0.6, est + 0.6)?;
    find_root(
        |x| crate::specfun::bessel_j(order, x).expect("zero bracket within envelope"),
        bracket,
        1e-13,
    )
}

/// The connected component [a_k(eps), b_k(eps)] of { |J_0| <= eps } around the
/// k-th zero of J_0.
///
/// Fails with [`RootfindError::BandUnbounded`] when eps reaches the critical
/// value of |J_0| separating the band from its neighbors.
pub fn level_band(eps: f64, k: u32) -> Result<Interval, RootfindError> {
    assert!(eps > 0.0, "eps must be positive");
    if k == 0 || k > 19 {
        return Err(RootfindError::IndexOutOfRange(k));
    }
    let j0k = bessel_zero(0, k)?;
    // critical points of J_0 are the zeros of J_1
    let crit_hi = bessel_zero(1, k)?;
    let limit_hi = specfun::bessel_j(0, crit_hi)?.abs();
    if eps >= limit_hi {
        return Err(RootfindError::BandUnbounded {
            index: k,
            eps,
            limit: limit_hi,
        });
    }
    let crit_lo = if k == 1 { 0.0 } else { bessel_zero(1, k - 1)? };
    if k > 1 {
        let limit_lo = specfun::bessel_j(0, crit_lo)?.abs();
        if eps >= limit_lo {
            return Err(RootfindError::BandUnbounded {
                index: k,
                eps,
                limit: limit_lo,
            });
        }
    }
    // J_0 passes from sign s to -s through the k-th zero
    let s = if k % 2 == 1 { 1.0 } else { -1.0 };
    let a = find_root(
        |x| specfun::bessel_j(0, x).unwrap() - s * eps,
        Interval::new(crit_lo.max(1e-12), j0k)?,
        1e-13,
    )?;
    let b = find_root(
        |x| specfun::bessel_j(0, x).unwrap() + s * eps,
        Interval::new(j0k, crit_hi)?,
        1e-13,
    )?;
    Interval::new(a, b)
}

fn eval_kind(kind: ExtremumKind, n: i64, r: f64) -> f64 {
    match kind {
        ExtremumKind::AbsValue => j_signed(n, r).abs(),
        ExtremumKind::AbsDeriv => ((j_signed(n - 1, r) - j_signed(n + 1, r)) / 2.0).abs(),
        ExtremumKind::AbsOverR => (j_signed(n, r) / r).abs(),
    }
}

/// Derivative of the (signed) quantity behind `kind`, used to refine grid
/// maxima by locating interior critical points:
///   (J_n)'       = (J_{n-1} - J_{n+1}) / 2
///   (J_n')'      = (J_{n-2} - 2 J_n + J_{n+2}) / 4
///   (J_n/r)' ~   r J_n' - J_n   (same zeros)
fn kind_derivative(kind: ExtremumKind, n: i64, r: f64) -> f64 {
    match kind {
        ExtremumKind::AbsValue => (j_signed(n - 1, r) - j_signed(n + 1, r)) / 2.0,
        ExtremumKind::AbsDeriv => {
            (j_signed(n - 2, r) - 2.0 * j_signed(n, r) + j_signed(n + 2, r)) / 4.0
        }
        ExtremumKind::AbsOverR => {
            r * (j_signed(n - 1, r) - j_signed(n + 1, r)) / 2.0 - j_signed(n, r)
        }
    }
}

const SCAN_POINTS: usize = 2048;

/// Supremum of |J_n|, |J_n'|, or |J_n(r)/r| over a closed interval: dense
/// fixed-density grid scan followed by derivative-root refinement of interior
/// candidates. Reported value is within 1e-8 of the true supremum.
pub fn interval_max(kind: ExtremumKind, order: u32, interval: Interval) -> ExtremumRecord {
    let n = order as i64;
    let (lo, hi) = (interval.lo, interval.hi);
    let m = SCAN_POINTS;
    let xs: Vec<f64> = (0..=m)
        .map(|i| lo + (hi - lo) * i as f64 / m as f64)
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| eval_kind(kind, n, x)).collect();
    let mut best_v = vs[0];
    let mut best_x = xs[0];
    for i in 1..=m {
        if vs[i] > best_v {
            best_v = vs[i];
            best_x = xs[i];
        }
    }
    // refine every grid-local maximum through the critical-point identity
    for i in 1..m {
        if vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1] {
            let (wa, wb) = (xs[i - 1], xs[i + 1]);
            let da = kind_derivative(kind, n, wa);
            let db = kind_derivative(kind, n, wb);
            if da * db < 0.0 {
                if let Ok(xc) = find_root(
                    |t| kind_derivative(kind, n, t),
                    Interval::new(wa, wb).unwrap(),
                    1e-13,
                ) {
                    let v = eval_kind(kind, n, xc);
                    if v > best_v {
                        best_v = v;
                        best_x = xc;
                    }
                }
            }
        }
    }
    ExtremumRecord {
        order,
        kind,
        argmax: best_x,
        max_value: best_v,
    }
}

/// Infimum of |J_n| over a closed interval (same scan-and-refine scheme,
/// used for the eps_max gradient bound).
pub(crate) fn interval_min_abs_j(order: u32, interval: Interval) -> f64 {
    let n = order as i64;
    let (lo, hi) = (interval.lo, interval.hi);
    let mut best = f64::INFINITY;
    let mut prev_x = lo;
    let mut prev_s = j_signed(n, lo);
    best = best.min(prev_s.abs());
    for i in 1..=SCAN_POINTS {
        let x = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
        let s = j_signed(n, x);
        best = best.min(s.abs());
        // a sign change of J_n itself means the infimum is 0
        if prev_s * s < 0.0 {
            return 0.0;
        }
        // interior minimum of |J_n| without sign change: critical point of J_n
        let da = kind_derivative(ExtremumKind::AbsValue, n, prev_x);
        let db = kind_derivative(ExtremumKind::AbsValue, n, x);
        if da * db < 0.0 {
            if let Ok(xc) = find_root(
                |t| kind_derivative(ExtremumKind::AbsValue, n, t),
                Interval::new(prev_x, x).unwrap(),
                1e-13,
            ) {
                best = best.min(j_signed(n, xc).abs());
            }
        }
        prev_x = x;
        prev_s = s;
    }
    best
}

/// Certified interior critical points of J_n(r)/r on the open interval,
/// located through r J_n' - J_n = 0. Used by the published-table S convention.
pub(crate) fn over_r_interior_critical_points(order: u32, interval: Interval) -> Vec<f64> {
    let n = order as i64;
    let (lo, hi) = (interval.lo, interval.hi);
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev = kind_derivative(ExtremumKind::AbsOverR, n, lo);
    for i in 1..=SCAN_POINTS {
        let x = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
        let cur = kind_derivative(ExtremumKind::AbsOverR, n, x);
        if prev * cur < 0.0 {
            if let Ok(xc) = find_root(
                |t| kind_derivative(ExtremumKind::AbsOverR, n, t),
                Interval::new(prev_x, x).unwrap(),
                1e-13,
            ) {
                if xc > lo && xc < hi {
                    out.push(xc);
                }
            }
        }
        prev_x = x;
        prev = cur;
    }
    out
}
