//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criterion 7 is asserted exactly as stated and is expected to fail: the
//! mandated window (half-width 20, counting radius 18) is about three
//! wavelengths across, and the measured hole statistics at that scale sit
//! several standard errors away from the large-R reference values the
//! criterion brackets. The assertion message carries the measured values
//! under both counting rules; see the README for the analysis.

use nodal::barrier::{self, BarrierConfig, SConvention, Target};
use nodal::rootfind::{self, ExtremumKind, Interval};
use nodal::simulate::{self, GridSpec};
use nodal::specfun;
use nodal::symmetrize::{self, RadiiSchedule, TMode};
use std::sync::OnceLock;

const ENSEMBLE_SEED: u64 = 20260809;

fn workers() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get())
}

/// The criterion-7 ensemble, shared with criterion 9's census invariants.
fn acceptance_ensemble() -> &'static simulate::EnsembleStats {
    static CELL: OnceLock<simulate::EnsembleStats> = OnceLock::new();
    CELL.get_or_init(|| {
        let grid = GridSpec::new(20.0, 500, 18.0).unwrap();
        simulate::estimate_mu(&grid, 100, 200, ENSEMBLE_SEED, workers()).unwrap()
    })
}

#[test]
fn criterion_1_roots_and_critical_points() {
    let t0 = std::time::Instant::now();
    // quoted digits with their full-precision values; the third zero is
    // printed to 4 digits only, so the 1e-5 accuracy check runs against the
    // reference value and the quote is matched at its own precision
    let cases = [
        (0u32, 1u32, 2.404825, 2.40482555769577),
        (0, 2, 5.520078, 5.52007811028631),
        (0, 3, 8.6537, 8.65372791291101),
        (1, 1, 3.831705, 3.83170597020751),
        (1, 2, 7.015586, 7.01558666981562),
    ];
    for (order, k, quoted, reference) in cases {
        let got = rootfind::bessel_zero(order, k).unwrap();
        assert!(
            (got - reference).abs() <= 1e-5,
            "j_{order},{k} = {got}, reference {reference}"
        );
        let quote_precision = 10f64.powi(-(digits_after_point(quoted) as i32));
        assert!(
            (got - quoted).abs() <= quote_precision,
            "j_{order},{k} = {got} does not carry the quoted digits {quoted}"
        );
    }
    println!("criterion 1: PASS - five quoted Bessel zeros reproduced (1e-5 against references) [{:.2?}]", t0.elapsed());
}

fn digits_after_point(x: f64) -> usize {
    let s = format!("{x}");
    s.split('.').nth(1).map_or(0, |f| f.len())
}

#[test]
fn criterion_2_barrier_mu0_inputs() {
    let t0 = std::time::Instant::now();
    let eps = barrier::max_epsilon(0.5, 1).unwrap();
    assert!((eps - 0.086161).abs() <= 1e-5, "eps_max = {eps}");
    let band = rootfind::level_band(eps, 1).unwrap();
    assert!((band.lo - 2.243784).abs() <= 1e-5, "a1 = {}", band.lo);
    assert!((band.hi - 2.577540).abs() <= 1e-5, "b1 = {}", band.hi);
    let j01 = rootfind::bessel_zero(0, 1).unwrap();
    let s = barrier::compute_s(j01 - 0.5, j01 + 0.5, 100, SConvention::Rigorous).unwrap();
    assert!(
        (s.certified_s_upper - 3.729324).abs() <= 1e-4,
        "S = {}",
        s.certified_s_upper
    );
    for (i, want) in [1.240843, 1.076795, 0.781099].iter().enumerate() {
        let got = s.per_order[i].contribution;
        assert!((got - want).abs() <= 1e-4, "S_{} = {got}", i + 1);
    }
    let tail: f64 = s.per_order[3..].iter().map(|c| c.contribution).sum::<f64>() + s.tail_bound;
    assert!((tail - 0.630586).abs() <= 1e-4, "n>=4 block = {tail}");
    println!(
        "criterion 2: PASS - mu(0) inputs (eps, band, S and its contributions) reproduced [{:.2?}]",
        t0.elapsed()
    );
}

#[test]
fn criterion_3_barrier_mu1_inputs() {
    let t0 = std::time::Instant::now();
    let eps = barrier::max_epsilon(0.5, 1)
        .unwrap()
        .min(barrier::max_epsilon(0.5, 2).unwrap());
    assert!((eps - 0.064008).abs() <= 1e-5, "eps = {eps}");
    let bands: Vec<Interval> = (1..=3)
        .map(|k| rootfind::level_band(eps, k).unwrap())
        .collect();
    let endpoints = [
        (bands[0].lo, 2.284353),
        (bands[0].hi, 2.531685),
        (bands[1].lo, 5.334081),
        (bands[1].hi, 5.712642),
        (bands[2].lo, 8.418990),
    ];
    for (got, want) in endpoints {
        assert!((got - want).abs() <= 1e-5, "band endpoint {got} vs {want}");
    }

    let j01 = rootfind::bessel_zero(0, 1).unwrap();
    let j02 = rootfind::bessel_zero(0, 2).unwrap();
    let (lo, hi) = (j01 - 0.5, j02 + 0.5);
    let iv = Interval::new(lo, hi).unwrap();

    // the published per-order table: (u, |Jn(u)|, v, |Jn(v)/v|, w, |Jn'(w)|, Sn);
    // cells are truncated to 4 digits exactly as published (one of them
    // happens to sit near log10(e), hence the lint allowance)
    #[allow(clippy::approx_constant)]
    let table: [[f64; 7]; 6] = [
        [1.9048, 0.5810, 5.1356, 0.0661, 3.5183, 0.4194, 1.0666],
        [3.0542, 0.4864, 2.2999, 0.1799, 4.8879, 0.3478, 1.0143],
        [4.2011, 0.4343, 3.6112, 0.1107, 6.0200, 0.3009, 0.8461],
        [5.3175, 0.3996, 4.8112, 0.0787, 3.6804, 0.1548, 0.6333],
        [6.0200, 0.3631, 5.9623, 0.0603, 4.7082, 0.1338, 0.5573],
        [6.0200, 0.2481, 6.0200, 0.0412, 5.7285, 0.1188, 0.4082],
    ];
    let s = barrier::compute_s(lo, hi, 100, SConvention::PublishedTable).unwrap();
    for (n, row) in table.iter().enumerate() {
        let order = (n + 1) as u32;
        let u = rootfind::interval_max(ExtremumKind::AbsValue, order, iv);
        assert!(
            (u.argmax - row[0]).abs() <= 1e-3,
            "u_{order} = {}",
            u.argmax
        );
        assert!(
            (u.max_value - row[1]).abs() <= 1e-3,
            "|J(u_{order})| = {}",
            u.max_value
        );
        // v_n: the interior critical point of J_n(r)/r when one exists,
        // re-derived here through the public root finder
        let mut v_candidates = Vec::new();
        let steps = 4000;
        let g = |x: f64| {
            x * specfun::bessel_j_deriv(order, x).unwrap() - specfun::bessel_j(order, x).unwrap()
        };
        let mut prev = g(lo);
        for i in 1..=steps {
            let x = lo + (hi - lo) * i as f64 / steps as f64;
            let cur = g(x);
            if prev * cur < 0.0 {
                let x0 = lo + (hi - lo) * (i - 1) as f64 / steps as f64;
                v_candidates
                    .push(rootfind::find_root(g, Interval::new(x0, x).unwrap(), 1e-12).unwrap());
            }
            prev = cur;
        }
        let (v, v_val) = v_candidates
            .iter()
            .map(|&c| (c, (specfun::bessel_j(order, c).unwrap() / c).abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or_else(|| {
                let at_hi = (specfun::bessel_j(order, hi).unwrap() / hi).abs();
                (hi, at_hi)
            });
        assert!((v - row[2]).abs() <= 1e-3, "v_{order} = {v}");
        assert!((v_val - row[3]).abs() <= 1e-3, "|J(v_{order})/v| = {v_val}");
        let w = rootfind::interval_max(ExtremumKind::AbsDeriv, order, iv);
        assert!(
            (w.argmax - row[4]).abs() <= 1e-3,
            "w_{order} = {}",
            w.argmax
        );
        assert!(
            (w.max_value - row[5]).abs() <= 1e-3,
            "|J'(w_{order})| = {}",
            w.max_value
        );
        let sn = s.per_order[n].contribution;
        assert!((sn - row[6]).abs() <= 1e-3, "S_{order} = {sn}");
    }
    let tail: f64 = s.per_order[6..].iter().map(|c| c.contribution).sum::<f64>() + s.tail_bound;
    assert!((tail - 0.689769).abs() <= 1e-4, "S>=7 = {tail}");
    assert!(
        (s.certified_s_upper - 5.215701).abs() <= 1e-4,
        "S = {}",
        s.certified_s_upper
    );
    println!("criterion 3: PASS - mu(1) inputs (eps, five band endpoints, full table, S) reproduced [{:.2?}]", t0.elapsed());
}

#[test]
fn criterion_4_certified_bounds() {
    let t0 = std::time::Instant::now();
    let mu0 = barrier::mu_lower_bound(&BarrierConfig::new(Target::Mu0, 0.5)).unwrap();
    let mu1 = barrier::mu_lower_bound(&BarrierConfig::new(Target::Mu1, 0.5)).unwrap();
    let p0 = mu0.log10_probability.log10_abs;
    let p1 = mu1.log10_probability.log10_abs;
    assert!((-1280.0..=-1275.0).contains(&p0), "log10 P(mu0) = {p0}");
    assert!((-4532.0..=-4525.0).contains(&p1), "log10 P(mu1) = {p1}");
    for cert in [&mu0, &mu1] {
        let quoted = cert.published_log10_mu;
        for bound in [
            cert.log10_mu_bound_kac_rice.log10_abs,
            cert.log10_mu_bound_factor_ten.log10_abs,
        ] {
            assert!(
                bound >= quoted,
                "certificate bound 10^{bound} below the quoted 10^{quoted}"
            );
        }
    }
    println!(
        "criterion 4: PASS - log10 P = {p0:.2} / {p1:.2}, certificate bounds above 10^-1282 and 10^-4535 \
         (the +-2-exponent rounding in the published chain is carried in the certificates' notes) [{:.2?}]",
        t0.elapsed()
    );
}

#[test]
fn criterion_5_symmetrization_mu0() {
    let t0 = std::time::Instant::now();
    let schedule = RadiiSchedule::single(3.8317).unwrap();
    let t_app = symmetrize::optimal_t(&schedule, TMode::AppendixFormula).unwrap();
    assert!((t_app - 3.2086).abs() <= 1e-3, "T_appendix = {t_app}");
    let cert_app = symmetrize::certify(&schedule, TMode::AppendixFormula, Target::Mu0).unwrap();
    let bound = cert_app.log10_mu_bound.to_f64();
    assert!(
        ((bound - 2.1186e-5) / 2.1186e-5).abs() <= 0.10,
        "bound = {bound}"
    );
    let t_prop = symmetrize::optimal_t(&schedule, TMode::PropFormula).unwrap();
    let closed = symmetrize::closed_form_t_single(3.8317, TMode::PropFormula).unwrap();
    assert!(
        (t_prop - closed).abs() <= 1e-9,
        "{t_prop} vs closed {closed}"
    );
    let cert_prop = symmetrize::certify(&schedule, TMode::PropFormula, Target::Mu0).unwrap();
    assert!(
        cert_prop.log10_mu_bound >= cert_app.log10_mu_bound,
        "prop-mode bound below appendix-mode bound"
    );
    println!(
        "criterion 5: PASS - T_app = {t_app:.4}, bound = {bound:.4e} (quoted 2.1186e-5), prop T matches closed form [{:.2?}]",
        t0.elapsed()
    );
}

#[test]
fn criterion_6_symmetrization_mu1() {
    let t0 = std::time::Instant::now();
    let schedule = RadiiSchedule::limiting(5).unwrap();
    let t = symmetrize::optimal_t(&schedule, TMode::AppendixFormula).unwrap();
    let cert = symmetrize::symmetrization_bound(&schedule, t, Target::Mu1).unwrap();
    let gamma_log10 = cert.log10_mu_bound.log10_abs;
    // independent quadrature oracle, in the shifted-exponent frame
    let q_quad = symmetrize::q_by_quadrature(&schedule, t);
    let quad_log10 = (q_quad
        * nodal::LogMagnitude::from_f64(
            (std::f64::consts::PI).sqrt() / schedule.outermost().powi(2),
        ))
    .log10_abs;
    let rel = ((gamma_log10 - quad_log10) / quad_log10).abs();
    assert!(
        rel <= 0.01,
        "gamma chain log10 {gamma_log10} vs quadrature {quad_log10}"
    );
    // comparison against the published pair, with its internal-consistency
    // caveat: the published T equals the bracket bound 5/|J0(r_M)| = 41.93,
    // while the solved balance point is ~33.31; the bound at the solved T
    // nevertheless lands on the published 3.2724e-247.
    let published_t = 41.9286;
    let published_log10 = -246.48513;
    println!(
        "criterion 6: PASS - bound 10^{gamma_log10:.5} vs quadrature 10^{quad_log10:.5}; \
         solved T = {t:.4} vs published T = {published_t} (the published figure is the solver's \
         bracket bound, not the balance point); published bound 10^{published_log10:.5}, \
         exact reproduction not required yet achieved to {:.1e} in log10 [{:.2?}]",
        (gamma_log10 - published_log10).abs(),
        t0.elapsed()
    );
}

#[test]
fn criterion_7_simulator_headline_statistics() {
    let t0 = std::time::Instant::now();
    let stats = acceptance_ensemble();
    let strict = (
        stats.mu_hat[0].value,
        stats.mu_hat[1].value,
        stats.four_pi_cns_hat,
    );
    let c = &stats.centered_in_disk;
    let centered = (c.mu_hat[0].value, c.mu_hat[1].value, c.four_pi_cns_hat);
    println!(
        "criterion 7: measured (strict rule)          mu0 = {:.4} +- {:.4}, mu1 = {:.4} +- {:.4}, 4pi cns = {:.4} [{:.2?}]",
        strict.0, stats.mu_hat[0].std_error, strict.1, stats.mu_hat[1].std_error, strict.2,
        t0.elapsed()
    );
    println!(
        "criterion 7: measured (center-of-mass rule)  mu0 = {:.4} +- {:.4}, mu1 = {:.4} +- {:.4}, 4pi cns = {:.4}",
        centered.0, c.mu_hat[0].std_error, centered.1, c.mu_hat[1].std_error, centered.2
    );
    let windows_hold = (0.88..=0.94).contains(&strict.0)
        && (0.03..=0.07).contains(&strict.1)
        && (0.053..=0.065).contains(&strict.2);
    if windows_hold {
        println!("criterion 7: PASS [{:.2?}]", t0.elapsed());
    } else {
        println!(
            "criterion 7: FAIL - the stated windows bracket the large-R reference values \
             (0.9117, 0.0514, 0.0589), but the mandated box is ~3 wavelengths in radius and \
             the finite-size deficit of hole-rich (large) domains moves the honest statistics \
             outside the windows under both counting rules"
        );
    }
    assert!(
        (0.88..=0.94).contains(&strict.0),
        "mu_hat(0) = {:.4} outside [0.88, 0.94] (center-of-mass rule gives {:.4})",
        strict.0,
        centered.0
    );
    assert!(
        (0.03..=0.07).contains(&strict.1),
        "mu_hat(1) = {:.4} outside [0.03, 0.07] (center-of-mass rule gives {:.4})",
        strict.1,
        centered.1
    );
    assert!(
        (0.053..=0.065).contains(&strict.2),
        "4 pi cns_hat = {:.4} outside [0.053, 0.065] (center-of-mass rule gives {:.4})",
        strict.2,
        centered.2
    );
}

#[test]
fn criterion_8_kac_rice_oracle_agreement() {
    let t0 = std::time::Instant::now();
    let j01 = rootfind::bessel_zero(0, 1).unwrap();
    let cases = [(3.8317, 0.0), (3.8317, 2.0), (j01, 1.0)];
    let mut summary = Vec::new();
    for (i, &(r, xi0)) in cases.iter().enumerate() {
        let want = symmetrize::kac_rice_expected_crossings(r, xi0).unwrap();
        let stats =
            simulate::circle_crossings(r, xi0, 10_000, 60, 0xACC0 + i as u64, workers()).unwrap();
        assert!(
            (stats.mean - want).abs() <= 3.0 * stats.std_error,
            "(r={r}, xi0={xi0}): mean {} vs formula {want} (se {})",
            stats.mean,
            stats.std_error
        );
        summary.push(format!("{:.4}~{want:.4}", stats.mean));
    }
    println!(
        "criterion 8: PASS - Monte Carlo crossings match the crossing expectation within 3 SE ({}; third case sqrt(2) j01 = 3.4009) [{:.2?}]",
        summary.join(", "),
        t0.elapsed()
    );
}

#[test]
fn criterion_9_invariant_suites() {
    let t0 = std::time::Instant::now();
    // Bessel three-term recurrence residuals on a coarse sweep
    let mut buf = vec![0.0; 52];
    for i in 0..200 {
        let r = 0.1 + (20.0 - 0.1) * i as f64 / 199.0;
        specfun::bessel_j_all_into(r, &mut buf);
        for n in 1..=50usize {
            let res = buf[n - 1] + buf[n + 1] - (2.0 * n as f64 / r) * buf[n];
            assert!(res.abs() < 1e-10, "recurrence residual at n={n}, r={r}");
        }
    }

    // covariance against the Bessel kernel at three separations
    let j01 = rootfind::bessel_zero(0, 1).unwrap();
    for (d, phi) in [(1.0f64, 0.4f64), (j01, 1.9), (5.0, 2.6)] {
        let base = (0.9, -1.4);
        let other = (base.0 + d * phi.cos(), base.1 + d * phi.sin());
        let n_samples = 2000;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for i in 0..n_samples {
            let s = simulate::WaveSample::draw(0xC07, i, 100, None);
            let p = s.evaluate_at(base.0, base.1) * s.evaluate_at(other.0, other.1);
            sum += p;
            sumsq += p * p;
        }
        let mean = sum / n_samples as f64;
        let se = ((sumsq / n_samples as f64 - mean * mean) / n_samples as f64).sqrt();
        let want = specfun::bessel_j(0, d).unwrap();
        assert!(
            (mean - want).abs() <= 3.0 * se,
            "covariance at d={d}: {mean} vs {want}"
        );
    }

    // level-band nesting
    for k in 1..=3 {
        let outer = rootfind::level_band(0.06, k).unwrap();
        let inner = rootfind::level_band(0.03, k).unwrap();
        assert!(inner.lo > outer.lo && inner.hi < outer.hi);
    }

    // ensemble-level invariants from the acceptance run
    let stats = acceptance_ensemble();
    assert_eq!(
        stats.faber_krahn_flags, 0,
        "Faber-Krahn area floor flagged {} interior components",
        stats.faber_krahn_flags
    );
    assert!(
        stats.tree_end_mass_consistent,
        "tree-end histogram mass drifted"
    );

    // flood-fill oracle equivalence on a 64^2 grid
    {
        let sample = simulate::WaveSample::draw(31337, 4, 50, None);
        let grid = GridSpec::with_default_radius(8.0, 64).unwrap();
        let field = simulate::evaluate_field(&sample, &grid).unwrap();
        let census = simulate::nodal_census(&field);
        let positive: Vec<bool> = field.values.iter().map(|&v| v > 0.0).collect();
        let reference = flood_fill_count(&positive, 64);
        assert_eq!(
            census.components.len(),
            reference,
            "flood fill component count"
        );
    }

    // worker-count determinism
    {
        let grid = GridSpec::with_default_radius(8.0, 96).unwrap();
        let a = simulate::estimate_mu(&grid, 40, 4, 99, 1).unwrap();
        let b = simulate::estimate_mu(&grid, 40, 4, 99, 8).unwrap();
        assert_eq!(format!("{:?}", a.mu_hat), format!("{:?}", b.mu_hat));
        assert_eq!(a.cns_hat.to_bits(), b.cns_hat.to_bits());
    }

    // deficit tail vs quadrature on [0, 8]
    for i in 0..=16 {
        let a = 0.5 * i as f64;
        let got = specfun::gaussian_deficit_tail(a).unwrap().to_f64();
        let want = deficit_by_simpson(a);
        assert!(
            ((got - want) / want.max(1e-300)).abs() < 1e-8,
            "deficit({a}) = {got} vs quadrature {want}"
        );
    }

    println!(
        "criterion 9: PASS - recurrence residuals, covariance, band nesting, Faber-Krahn floor \
         (0 flags), tree-end mass, flood-fill equivalence, worker determinism, tail quadrature [{:.2?}]",
        t0.elapsed()
    );
}

fn flood_fill_count(positive: &[bool], res: usize) -> usize {
    let mut labels = vec![false; positive.len()];
    let mut count = 0;
    for start in 0..positive.len() {
        if labels[start] {
            continue;
        }
        count += 1;
        let p = positive[start];
        let mut queue = vec![start];
        labels[start] = true;
        while let Some(i) = queue.pop() {
            let (row, col) = (i / res, i % res);
            let mut push = |r: isize, c: isize| {
                if r < 0 || c < 0 || r >= res as isize || c >= res as isize {
                    return;
                }
                let j = r as usize * res + c as usize;
                if !labels[j] && positive[j] == p {
                    labels[j] = true;
                    queue.push(j);
                }
            };
            let (ri, ci) = (row as isize, col as isize);
            push(ri - 1, ci);
            push(ri + 1, ci);
            push(ri, ci - 1);
            push(ri, ci + 1);
            if !p {
                push(ri - 1, ci - 1);
                push(ri - 1, ci + 1);
                push(ri + 1, ci - 1);
                push(ri + 1, ci + 1);
            }
        }
    }
    count
}

fn deficit_by_simpson(a: f64) -> f64 {
    if a == 0.0 {
        return 1.0;
    }
    let f = |x: f64| (1.0 - a / x) * (-x * x / 2.0).exp();
    let hi = a + 40.0;
    let steps = 200_000;
    let h = (hi - a) / steps as f64;
    let mut s = f(a + 1e-300) + f(hi);
    for i in 1..steps {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 * 2.0 / (2.0 * std::f64::consts::PI).sqrt()
}
