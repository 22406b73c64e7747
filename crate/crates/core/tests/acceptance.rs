//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zenograv_core::decoherence::{
    self, blackbody_absorption_localization, blackbody_scattering_localization, gamma_distance, gamma_saturated,
    rest_gas_rate, total_decoherence, Environment, LogAxis,
};
use zenograv_core::feasibility::{evaluate_point, region_csv, sweep_region, t_r_window, Axis, ExperimentPoint, RegionAxis};
use zenograv_core::massdist::{force_at, make_superposed_source, potential_at};
use zenograv_core::scatter::{
    high_deflection_clusters, integrate_trajectory, rutherford_angle, scan_pattern, PatternGrid, ScatterConfig,
    ScatterPattern,
};
use zenograv_core::schrod1d::{potential_gradient, solve_eigen, GridSpec, PotentialSpec1D};
use zenograv_core::units::HBAR;
use zenograv_core::zeno::{loglog_slope, pure_state, strobo_evolve, zeno_scan, zeno_scan_csv, BipartiteSystem, C64};
use zenograv_core::Vector3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t0 = Instant::now();
    let mut o = f();
    let dt = t0.elapsed();
    let in_time = dt < limit;
    o.pass &= in_time;
    o.detail = format!("{}; runtime {:.2} s (limit {} s{})", o.detail, dt.as_secs_f64(), limit.as_secs(), if in_time { "" } else { ", EXCEEDED" });
    o
}

fn triple_well() -> Outcome {
    let spec = PotentialSpec1D::new(1.0, 4.0, 1.0, 1e-11, 1e-5).unwrap();
    let sol = solve_eigen(&spec, 2, &GridSpec::default()).unwrap();
    let (e0, e1) = (sol.energies_j[0], sol.energies_j[1]);
    let grad = potential_gradient(&spec, 1.0);
    let (r0, r1, rg) = (rel(e0, -1.0e-47), rel(e1, -8.86e-48), rel(grad, 4e-42));
    Outcome {
        pass: r0 <= 0.02 && r1 <= 0.02 && rg <= 0.15,
        detail: format!(
            "E0 = {e0:.4e} J (dev {:.1}%, tol 2%), E1 = {e1:.4e} J (dev {:.1}%, tol 2%), dV/dx(d) = {grad:.3e} J/m (dev {:.1}%, tol 15%), E0/V0 = {:.5}",
            100.0 * r0,
            100.0 * r1,
            100.0 * rg,
            sol.energies_v0[0]
        ),
    }
}

fn rutherford() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let r = 10f64.powf(rng.random_range(-6.0..-4.0));
        let rho = rng.random_range(1000.0..20000.0);
        let t_r = 10f64.powf(rng.random_range(1.0..1.2));
        let beta = rng.random_range(1.2..2.0);
        let dist = make_superposed_source(r, rho, 0.0).unwrap();
        let v = r / t_r;
        let cfg = ScatterConfig::for_source(&dist, beta * r, 0.0, v).with_range(-2000.0 * r, 2500.0 * r);
        let tr = integrate_trajectory(&dist, &cfg, 1e-18).unwrap();
        worst = worst.max(rel(tr.deflection_angle, rutherford_angle(dist.total_mass(), v, beta * r)));
    }
    Outcome { pass: worst < 1e-4, detail: format!("20 draws, worst relative error {worst:.2e} (tol 1e-4)") }
}

fn tr_window() -> Outcome {
    let w = t_r_window(&ExperimentPoint::default(), 0.0, 2.0, 201).unwrap();
    match w {
        None => Outcome { pass: false, detail: "no admissible t_R".into() },
        Some(w) => {
            let (dl, dh) = (rel(w.log10_lo, 1.0), rel(w.log10_hi, 1.2));
            Outcome {
                pass: w.contiguous && dl <= 0.1 && dh <= 0.1,
                detail: format!(
                    "window [10^{:.4}, 10^{:.4}] s, contiguous = {}, log10 endpoint deviation {:.1}% / {:.1}% (tol 10%)",
                    w.log10_lo,
                    w.log10_hi,
                    w.contiguous,
                    100.0 * dl,
                    100.0 * dh
                ),
            }
        }
    }
}

fn mirrored(p: &ScatterPattern, cluster: &[usize], n_l: usize) -> BTreeSet<(usize, usize)> {
    cluster.iter().map(|&k| (p.points[k].i_b, n_l - 1 - p.points[k].i_l)).collect()
}

fn indices(p: &ScatterPattern, cluster: &[usize]) -> BTreeSet<(usize, usize)> {
    cluster.iter().map(|&k| (p.points[k].i_b, p.points[k].i_l)).collect()
}

fn pattern() -> Outcome {
    let r = 1e-5;
    let rho = 2600.0;
    let v = r / 10f64.powf(1.1);
    let grid = PatternGrid { beta_min: 1.2, beta_max: 2.0, n_b: 40, l_min: 0.0, l_max: 2.0 * r, n_l: 40, mirror_l: true };
    let n_l = grid.offsets().len();
    let two_src = make_superposed_source(r, rho, 2.0 * r).unwrap();
    let one_src = make_superposed_source(r, rho, 0.0).unwrap();
    let two = scan_pattern(&two_src, &grid, v, 1e-18).unwrap();
    let one = scan_pattern(&one_src, &grid, v, 1e-18).unwrap();
    let theta7 = rutherford_angle(one_src.total_mass(), v, 1.2 * r);
    let dashed = 2.0 * (0.5 * theta7).tan();

    let c2 = high_deflection_clusters(&two, 0.9);
    let two_lobed = c2.len() == 2 && mirrored(&two, &c2[0], n_l) == indices(&two, &c2[1]) && {
        let sx = |c: &[usize]| c.iter().map(|&k| two.points[k].proj[0].signum()).sum::<f64>();
        sx(&c2[0]) * sx(&c2[1]) < 0.0 && sx(&c2[0]).abs() == c2[0].len() as f64
    };

    let c1 = high_deflection_clusters(&one, 0.9);
    let mut by_launch: Vec<(f64, f64)> = one.accepted().map(|p| ((p.b * p.b + p.l * p.l).sqrt(), p.proj.norm())).collect();
    by_launch.sort_by(|a, b| a.0.total_cmp(&b.0));
    let worst_rise = by_launch.windows(2).map(|w| w[1].1 / w[0].1 - 1.0).fold(f64::MIN, f64::max);
    // ties in launch radius differ only by integrator error
    let monotone = worst_rise <= 1e-6;
    let r_min = by_launch.last().map_or(0.0, |p| p.1);
    let annulus = c1.len() == 1 && monotone && r_min > 0.0;

    let max1 = one.max_proj_radius();
    let max2 = two.max_proj_radius();
    let dev = rel(max1, dashed);
    let clean = two.n_failed == 0 && one.n_failed == 0 && two.n_hit == 0 && one.n_hit == 0;
    Outcome {
        pass: clean && two_lobed && annulus && dev <= 0.05 && max2 <= dashed,
        detail: format!(
            "two-sphere: {} high clusters, mirror-paired = {two_lobed}; d=0: {} cluster, monotone ring r in [{r_min:.4e}, {max1:.4e}] (worst rise {worst_rise:.1e}) = {annulus}; \
             dashed radius {dashed:.4e}, d=0 max dev {:.3}% (tol 5%), two-sphere max / dashed = {:.3}; probes {} + {}, hits {}, failures {}",
            c2.len(),
            c1.len(),
            100.0 * dev,
            max2 / dashed,
            two.points.len(),
            one.points.len(),
            two.n_hit + one.n_hit,
            two.n_failed + one.n_failed
        ),
    }
}

fn zeno_scaling() -> Outcome {
    let sys = BipartiteSystem::coupled_qubits(HBAR); // τ_Z = ħ/g = 1 s
    let rho = pure_state(&[C64::new(1.0, 0.0), C64::new(0.3, 0.4)]);
    let t = 1.0;
    let ns = [100usize, 316, 1000, 3162, 10000];
    let taus: Vec<f64> = ns.iter().map(|&n| t / n as f64).collect();
    let deficit_t: Vec<f64> = ns.iter().map(|&n| 1.0 - strobo_evolve(&sys, t / n as f64, n, &rho).unwrap().survival_prob).collect();
    let slope_t = loglog_slope(&taus, &deficit_t);
    let deficit_n: Vec<f64> = taus.iter().map(|&tau| 1.0 - strobo_evolve(&sys, tau, 100, &rho).unwrap().survival_prob).collect();
    let slope_n = loglog_slope(&taus, &deficit_n);
    let td = strobo_evolve(&sys, 1e-3, 1000, &rho).unwrap().effective_h_error;
    Outcome {
        pass: (slope_t - 2.0).abs() <= 0.1 && td < 1e-3,
        detail: format!(
            "fixed t = tau_Z: slope of 1-p vs tau = {slope_t:.4} (want 2.0 +/- 0.1); fixed N = 100: slope = {slope_n:.4}; trace distance at tau = 1e-3 tau_Z: {td:.2e} (tol 1e-3)"
        ),
    }
}

fn decoherence_coefficients() -> Outcome {
    let (p, r, t) = (1e-15, 1e-5, 1.0);
    let env = Environment { pressure: p, t_env: t, t_int: t, ..Environment::default() };
    let gas = rest_gas_rate(&env, r).unwrap().saturated / (p * r * r / t.sqrt());
    let sc = blackbody_scattering_localization(&env, r) / (r.powi(6) * t.powi(9));
    let ab = blackbody_absorption_localization(t, 1.0, r) / (r.powi(3) * t.powi(6));
    let within = |x: f64, want: f64| x / want >= 0.5 && x / want <= 2.0;
    let total = total_decoherence(&env, r).unwrap().gamma_total;
    let ok = [within(gas, 1.96e26), within(sc, 5e36), within(ab, 5e25), (10.0..=1e3).contains(&total)];
    Outcome {
        pass: ok.iter().all(|b| *b),
        detail: format!(
            "gas {gas:.4e} (ratio {:.3}, ok {}), bb sc {sc:.4e} (ratio {:.3}, ok {}), bb ab/em {ab:.4e} (ratio {:.3}, ok {}); Gamma_D(R) total {total:.2} 1/s in [10, 1e3]: {}",
            gas / 1.96e26,
            ok[0],
            sc / 5e36,
            ok[1],
            ab / 5e25,
            ok[2],
            ok[3]
        ),
    }
}

fn reference_report() -> Outcome {
    let pt = ExperimentPoint {
        radius: 1e-5,
        t_r: 10f64.powf(1.1),
        m_probe: 1e-18,
        env: Environment { pressure: 1e-15, t_env: 1.0, t_int: 1.0, ..Environment::default() },
        ..ExperimentPoint::default()
    };
    let rep = evaluate_point(&pt).unwrap();
    let ke_ok = rel(rep.kinetic_energy_ev, 3e-12) <= 0.1;
    let g = rep.gamma_zeno_required;
    let g_ok = (100.0 / 3.0..=300.0).contains(&g);
    let s_ok = rep.sigma_ratio <= 2e-2;
    let m_ok = rep.mfp > 1.0;
    let failed: Vec<&str> = rep.constraints.iter().filter(|c| c.verdict != zenograv_core::feasibility::Verdict::Pass).map(|c| c.name).collect();
    Outcome {
        pass: rep.pass && ke_ok && g_ok && s_ok && m_ok,
        detail: format!(
            "all constraints pass: {} {:?}; KE {:.3e} eV (dev {:.1}%, tol 10%); Gamma_Zeno required {g:.1} 1/s (within x3 of 100: {g_ok}); sigma_min/R {:.4} (<= 2e-2: {s_ok}); mfp {:.3e} m (> 1 m: {m_ok})",
            rep.pass,
            failed,
            rep.kinetic_energy_ev,
            100.0 * rel(rep.kinetic_energy_ev, 3e-12),
            rep.sigma_ratio,
            rep.mfp
        ),
    }
}

fn property_suites() -> Outcome {
    let mut notes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let r = 1e-5;

    // energy and angular momentum
    let mut worst_e = 0.0f64;
    let mut worst_l = 0.0f64;
    for i in 0..16 {
        let d = if i % 2 == 0 { 0.0 } else { 2.0 * r };
        let dist = make_superposed_source(r, 2600.0, d).unwrap();
        let b = rng.random_range(1.2..2.0) * r;
        let l = if d == 0.0 { 0.0 } else { rng.random_range(-2.0..2.0) * r };
        let cfg = ScatterConfig::for_source(&dist, b, l, r / 10f64.powf(rng.random_range(1.0..1.2)));
        let tr = integrate_trajectory(&dist, &cfg, 1e-18).unwrap();
        worst_e = worst_e.max(tr.max_relative_energy_drift(&dist, 1e-18));
        if d == 0.0 {
            worst_l = worst_l.max(tr.max_relative_angular_momentum_drift(&Vector3::zeros()));
        }
    }
    let cons = worst_e < 1e-6 && worst_l < 1e-6;
    notes.push(format!("conservation dE {worst_e:.1e} dL {worst_l:.1e}: {cons}"));

    // force = −∇V
    let dist = make_superposed_source(r, 2600.0, 1.3 * r).unwrap();
    let mut worst_f = 0.0f64;
    for _ in 0..400 {
        let x = Vector3::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)) * r;
        let h = 1e-9 * x.norm().max(r);
        let grad = Vector3::from_fn(|k, _| {
            let mut e = Vector3::zeros();
            e[k] = h;
            (potential_at(&dist, &(x + e), 1.0) - potential_at(&dist, &(x - e), 1.0)) / (2.0 * h)
        });
        let f = force_at(&dist, &x, 1.0);
        worst_f = worst_f.max((f + grad).norm() / f.norm());
    }
    let fd = worst_f < 1e-5;
    notes.push(format!("force FD {worst_f:.1e}: {fd}"));

    // orthonormality and parity
    let spec = PotentialSpec1D::new(1.0, 4.0, 1.0, 1e-11, 1e-5).unwrap();
    let sol = solve_eigen(&spec, 4, &GridSpec::default()).unwrap();
    let mut ortho = 0.0f64;
    let mut parity = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            ortho = ortho.max((sol.overlap(i, j) - if i == j { 1.0 } else { 0.0 }).abs());
        }
        let psi = &sol.wavefunctions[i];
        let n = psi.len();
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        parity = parity.max((0..n).map(|k| (psi[k] - s * psi[n - 1 - k]).abs()).fold(0.0, f64::max));
    }
    let wf = ortho < 1e-8 && parity < 1e-6 && (0..4).all(|k| sol.sign_changes(k) == k);
    notes.push(format!("orthonormality {ortho:.1e} parity {parity:.1e}: {wf}"));

    // Γ_D monotone and saturating
    let mut gd = true;
    for _ in 0..200 {
        let lam = 10f64.powf(rng.random_range(-9.0..-2.0));
        let big_l = 10f64.powf(rng.random_range(0.0..40.0));
        let xs: Vec<f64> = (0..50).map(|k| lam * k as f64 * 0.25).collect();
        let g: Vec<f64> = xs.iter().map(|&x| gamma_distance(big_l, lam, x)).collect();
        gd &= g.windows(2).all(|w| w[1] >= w[0]);
        let sat = gamma_saturated(big_l, lam);
        gd &= rel(gamma_distance(big_l, lam, 10.0 * lam), sat) < 1e-6;
    }
    notes.push(format!("Gamma_D monotone/saturating: {gd}"));

    // CSV determinism across runs and thread counts
    let csvs = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let src = make_superposed_source(r, 2600.0, 2.0 * r).unwrap();
            let g = PatternGrid { beta_min: 1.2, beta_max: 2.0, n_b: 8, l_min: 0.0, l_max: 2.0 * r, n_l: 8, mirror_l: true };
            let pat = scan_pattern(&src, &g, r / 10f64.powf(1.1), 1e-18).unwrap().to_csv(Some("cfg"));
            let sys = BipartiteSystem::coupled_qubits(HBAR);
            let rho = pure_state(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
            let z = zeno_scan_csv(&zeno_scan(&sys, 0.5, &[10, 50, 250], &rho).unwrap(), None);
            let sweep = decoherence::sweep_csv(
                &decoherence::decoherence_sweep(&Environment::default(), &LogAxis { min: 1e-7, max: 1e-3, n: 9 }, &LogAxis { min: 1e-16, max: 1e-10, n: 4 }, &LogAxis::fixed(1.0)).unwrap(),
                None,
            );
            let a1 = RegionAxis { axis: Axis::TR, range: LogAxis { min: 1.0, max: 100.0, n: 16 } };
            let a2 = RegionAxis { axis: Axis::MProbe, range: LogAxis { min: 1e-20, max: 1e-16, n: 16 } };
            let region = region_csv(&sweep_region(&ExperimentPoint::default(), &a1, &a2).unwrap(), None);
            [pat, z, sweep, region]
        })
    };
    let (a, b, c) = (csvs(1), csvs(4), csvs(4));
    let det = a == b && b == c;
    notes.push(format!("CSV determinism (1 vs 4 threads, repeated): {det}"));

    Outcome { pass: cons && fd && wf && gd && det, detail: notes.join("; ") }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("triple-well spectrum", Duration::from_secs(5), triple_well),
        ("Rutherford oracle", Duration::from_secs(30), rutherford),
        ("t_R window", Duration::from_secs(60), tr_window),
        ("scattering pattern", Duration::from_secs(120), pattern),
        ("Zeno scaling", Duration::from_secs(10), zeno_scaling),
        ("decoherence coefficients", Duration::from_secs(60), decoherence_coefficients),
        ("reference report", Duration::from_secs(60), reference_report),
        ("property suites", Duration::from_secs(180), property_suites),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let o = timed(limit, f);
        if !o.pass {
            failed += 1;
        }
        println!("ACCEPTANCE #{} {} [{}]: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
