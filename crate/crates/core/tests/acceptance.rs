//! Acceptance suite: one pass/fail line per criterion. Runs without the
//! libtest harness so the lines always reach the console.

use std::time::{Duration, Instant};

use cvcorr::measures::photon::photon_number_distribution;
use cvcorr::measures::{
    gaussian_discord, renyi_entropy, von_neumann_entropy, CorrelationReport, DiscordDirection, MidMethod, PhotonTable,
};
use cvcorr::protocols::{self, DistributionConfig};
use cvcorr::random_states::{scatter, scatter_csv, SamplerSpec};
use cvcorr::vector_fields::{
    apply_mueller, concurrence, conventional_polarimetry, default_calibration, entanglement_degree, kinematic_sense,
    polarization_degree, recover_mueller_single_shot, schmidt_weight, standard_probes, verify_entanglement_identity,
    CoherenceMatrix4, Dof, MuellerMatrix, SpatialBasis, TDoFField,
};
use cvcorr::GaussianState;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `g(x)` for the entropy of a single-mode state with symplectic eigenvalue `x`.
fn f_entropy(x: f64) -> f64 {
    let (a, b) = ((x + 1.0) / 2.0, (x - 1.0) / 2.0);
    a * a.ln() - if b > 0.0 { b * b.ln() } else { 0.0 }
}

fn geometric(nbar: f64, n: usize) -> f64 {
    nbar.powi(n as i32) / (nbar + 1.0).powi(n as i32 + 1)
}

fn criterion_1() -> Outcome {
    let state = GaussianState::thermal(1.0).unwrap();
    let (mut shannon, mut collision) = (0.0, 0.0);
    for n in 0..4000 {
        let p = geometric(1.0, n);
        if p > 0.0 {
            shannon -= p * p.ln();
            collision += p * p;
        }
    }
    let renyi_oracle = -collision.ln();
    let vn = von_neumann_entropy(&state).unwrap();
    let r2 = renyi_entropy(&state, 2.0).unwrap();
    let e1 = (vn - shannon).abs().max((vn - 2.0 * 2f64.ln()).abs());
    let e2 = (r2 - renyi_oracle).abs().max((r2 - 3f64.ln()).abs());
    outcome(e1 < 1e-8 && e2 < 1e-8, format!("S err {e1:.1e}, S2 err {e2:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [0.2, 0.5, 1.0] {
        let d = gaussian_discord(&GaussianState::tmsv(r), DiscordDirection::Left).unwrap();
        worst = worst.max((d - f_entropy((2.0 * r).cosh())).abs());
    }
    let products = [
        GaussianState::thermal(1.5).unwrap().tensor(&GaussianState::squeezed_vacuum(0.7, 0.3)),
        GaussianState::coherent(0.4, -1.0).tensor(&GaussianState::thermal(0.2).unwrap()),
        GaussianState::vacuum(2),
    ];
    let mut product_max: f64 = 0.0;
    for s in &products {
        for dir in [DiscordDirection::Left, DiscordDirection::Right] {
            product_max = product_max.max(gaussian_discord(s, dir).unwrap());
        }
    }
    outcome(
        worst < 1e-5 && product_max < 1e-6,
        format!("TMSV max |D - f(cosh 2r)| {worst:.1e}, product max D {product_max:.1e}"),
    )
}

fn total_variation(table: &PhotonTable, oracle: impl Fn(usize, usize) -> f64) -> f64 {
    let n = table.n_max();
    let mut tv = 0.0;
    for a in 0..=n {
        for b in 0..=n {
            tv += (table.get(a, b) - oracle(a, b)).abs();
        }
    }
    0.5 * tv
}

fn criterion_3() -> Outcome {
    let n_max = 30;
    let method = MidMethod::quadrature_for(n_max);
    let (n1, n2) = (1.0, 0.5);
    let thermal = GaussianState::thermal(n1).unwrap().tensor(&GaussianState::thermal(n2).unwrap());
    let t = photon_number_distribution(&thermal, n_max, method).unwrap();
    let tv_thermal = total_variation(&t, |a, b| geometric(n1, a) * geometric(n2, b));
    let r: f64 = 0.5;
    let tm = photon_number_distribution(&GaussianState::tmsv(r), n_max, method).unwrap();
    let tv_tmsv =
        total_variation(&tm, |a, b| if a == b { r.tanh().powi(2 * a as i32) / r.cosh().powi(2) } else { 0.0 });
    outcome(
        tv_thermal < 1e-6 && tv_tmsv < 1e-6,
        format!("TV thermal {tv_thermal:.1e}, TV TMSV {tv_tmsv:.1e} (n_max {n_max})"),
    )
}

fn criterion_4() -> Outcome {
    let spec = SamplerSpec { count: 1000, seed: 1, ..SamplerSpec::default() };
    let records = scatter(&spec, None).unwrap();
    let with_mid: Vec<_> = records.iter().filter(|r| r.report.mid.is_some()).collect();
    let below = records.iter().filter(|r| r.report.amid < r.report.discord_two_way - 1e-3).count();
    let m_above = with_mid.iter().filter(|r| r.report.mid.unwrap() > r.report.amid).count();
    let a_above = with_mid.iter().filter(|r| r.report.amid > r.report.mid.unwrap()).count();
    let tmsv_ok = [0.5, 1.0].iter().all(|&r| {
        let rep = CorrelationReport::compute(&GaussianState::tmsv(r)).unwrap();
        rep.amid > rep.mid.unwrap()
    });
    let m_ge_d = with_mid.iter().filter(|r| r.report.mid.unwrap() >= r.report.discord_two_way).count();
    let fraction = m_ge_d as f64 / with_mid.len() as f64;
    outcome(
        below == 0 && m_above > 0 && a_above > 0 && tmsv_ok && fraction > 0.9,
        format!(
            "(a) {below} states with A < D - 1e-3; (b) M > A: {m_above}, A > M: {a_above}, TMSV A > M: {tmsv_ok}; \
             (c) M >= D fraction {fraction:.3} over {} states with MID",
            with_mid.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let grid: Vec<f64> = (1..=15).map(|i| i as f64 / 10.0).collect();
    let ideal = DistributionConfig { eta_b: 1.0, ..DistributionConfig::default() };
    let lossy = DistributionConfig { eta_b: 0.5, ..DistributionConfig::default() };
    let ideal_rows = protocols::distribution_sweep(&ideal, &grid).unwrap();
    let lossy_rows = protocols::distribution_sweep(&lossy, &grid).unwrap();
    let ideal_max = ideal_rows.iter().map(|r| r.duan).fold(0.0, f64::max);
    let lossy_max = lossy_rows.iter().map(|r| r.duan).fold(0.0, f64::max);
    let c_separable = ideal_rows.iter().chain(&lossy_rows).all(|r| r.c_separable_throughout);
    let reference = protocols::run_distribution(&DistributionConfig { r: 0.5, ..lossy }).unwrap();
    let g_ref = reference.duan.unwrap().g_opt;
    let (g_lo, g_hi) = lossy_rows.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.g_opt), hi.max(r.g_opt)));
    outcome(
        ideal_max < 1.0 && lossy_max < 1.0 && c_separable && (0.35..=0.65).contains(&g_ref),
        format!(
            "max Duan ideal {ideal_max:.3}, eta 0.5 {lossy_max:.3}; eta 0.5 g_opt {g_ref:.3} at r = 0.5 \
             (range {g_lo:.3}..{g_hi:.3} over r); C|AB separable at every stage: {c_separable}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let trace = protocols::run_bs_discord_entanglement(2.0, 1.0).unwrap();
    let inputs = protocols::check_bs_inputs(&trace.stages[0].state).unwrap();
    let inputs_ok = inputs.a_in_p_classical
        && inputs.b_in_p_classical
        && inputs.a_in_min_variance >= 1.0 - 1e-9
        && inputs.b_in_min_variance >= 1.0 - 1e-9;
    let out = trace.final_stage();
    let entangled = out.entangled_cuts();
    let control = protocols::run_bs_discord_entanglement(2.0, 0.0).unwrap();
    let control_clear = control.stages.iter().all(|s| s.entangled_cuts().is_empty() && s.reduced_ab.separable);
    outcome(
        inputs_ok && out.reduced_ab.separable && !entangled.is_empty() && control_clear,
        format!(
            "inputs classical and unsqueezed: {inputs_ok}; AB separable: {}; entangled cuts {entangled:?}; \
             uncorrelated control clear: {control_clear}",
            out.reduced_ab.separable
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e1d);
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let amps: [Complex64; 4] =
            std::array::from_fn(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let f = TDoFField::new(SpatialBasis::Points, amps).unwrap().normalized();
        let g = CoherenceMatrix4::pure(&f);
        let p = polarization_degree(&g);
        let c = concurrence(&f);
        let e = entanglement_degree(&g, Dof::Polarization);
        let k = schmidt_weight(&f);
        let residuals = [
            (p * p + c * c - 1.0).abs(),
            (p - (1.0 - e * e).sqrt()).abs(),
            verify_entanglement_identity(&g).unwrap(),
            (p * p - (1.0 - 2.0 * (1.0 - 1.0 / k))).abs(),
        ];
        for (w, r) in worst.iter_mut().zip(residuals) {
            *w = w.max(r);
        }
    }
    outcome(
        worst.iter().all(|&w| w < 1e-10),
        format!(
            "max residuals P²+C²: {:.1e}, P vs E: {:.1e}, E² vs coherence: {:.1e}, P vs K: {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3e11e5);
    let probe = CoherenceMatrix4::pure(&TDoFField::radial());
    let (mut err_single, mut err_agree): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let m = MuellerMatrix::random_physical(&mut rng);
        let single = recover_mueller_single_shot(&apply_mueller(&probe, &m).unwrap());
        let conventional = conventional_polarimetry(&m, &standard_probes()).unwrap();
        err_single = err_single.max(single.max_abs_diff(&m));
        err_agree = err_agree.max(single.max_abs_diff(&conventional));
    }
    outcome(
        err_single < 1e-8 && err_agree < 1e-8,
        format!("max error single-shot {err_single:.1e}, single-shot vs four-probe {err_agree:.1e}"),
    )
}

fn criterion_9() -> Outcome {
    let cal = default_calibration();
    let mut worst: f64 = 0.0;
    for x0 in [-1.0, -0.5, 0.0, 0.3, 1.0] {
        worst = worst.max((kinematic_sense(x0, cal).unwrap().estimate - x0).abs());
    }
    outcome(worst < 0.01, format!("max |x0_hat - x0| {worst:.1e} waist"))
}

fn criterion_10() -> Outcome {
    let spec = SamplerSpec { count: 200, seed: 42, ..SamplerSpec::default() };
    let a = scatter_csv(&scatter(&spec, Some(1)).unwrap());
    let b = scatter_csv(&scatter(&spec, Some(1)).unwrap());
    let c = scatter_csv(&scatter(&spec, Some(4)).unwrap());
    outcome(a == b && a == c, format!("200 states: rerun identical {}, 1 vs 4 threads identical {}", a == b, a == c))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("entropy oracles", Duration::from_secs(1), criterion_1),
        ("pure-state discord", Duration::from_secs(10), criterion_2),
        ("photon-number distribution", Duration::from_secs(60), criterion_3),
        ("random-state scatter properties", Duration::from_secs(15 * 60), criterion_4),
        ("distribution protocol", Duration::from_secs(30), criterion_5),
        ("beam-splitter entanglement from discord", Duration::from_secs(10), criterion_6),
        ("vector-field identities", Duration::from_secs(5), criterion_7),
        ("Mueller round trip", Duration::from_secs(10), criterion_8),
        ("kinematic sensing", Duration::from_secs(30), criterion_9),
        ("scatter reproducibility", Duration::MAX, criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= *limit;
        failed += usize::from(!pass);
        let verdict = if pass { "PASS" } else { "FAIL" };
        let budget = if *limit == Duration::MAX { String::new() } else { format!(" / {:.0} s", limit.as_secs_f64()) };
        println!("criterion {:>2} {verdict}: {name}: {} [{:.2} s{budget}]", i + 1, o.detail, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
