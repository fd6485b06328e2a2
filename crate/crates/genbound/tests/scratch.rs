//! Temporary exploration harness; deleted before finalization.

use genbound::classes::{enumerate_finite_class_capped, ActivationKind, ClassSpec};
use genbound::dist::SourceSpec;
use genbound::objective::{ObjectiveConfig, PhiKind};
use genbound::optim::{measure_gap, GapConfig, GapMode, OptConfig};
use genbound::rademacher::{empirical_rademacher, exact_rademacher};

#[test]
#[ignore]
fn explore_mc_vs_exact() {
    // candidates: (d, w, levels, v, n, sample_seed)
    let cands = [
        (1usize, 1usize, 9usize, 1.0f64, 5usize, 101u64),
        (1, 1, 9, 1.0, 6, 102),
        (1, 1, 13, 1.0, 5, 103),
        (1, 1, 13, 1.0, 4, 104),
        (1, 1, 9, 1.0, 6, 105),
        (1, 1, 5, 1.0, 6, 106),
        (2, 1, 5, 1.0, 5, 107),
    ];
    for (d, w, levels, v, n, seed) in cands {
        let spec = ClassSpec::discriminator(d, w, ActivationKind::Clamp01, v);
        let class = enumerate_finite_class_capped(&spec, levels, 2_000_000).unwrap();
        let sample = SourceSpec::uniform(d, seed).sample(n, 0).unwrap();
        let t0 = std::time::Instant::now();
        let exact = exact_rademacher(&class, spec.activation, &sample).unwrap();
        let t1 = t0.elapsed();
        let cfg = OptConfig::new(0.2, 100, 20, 55);
        let t0 = std::time::Instant::now();
        let mc = empirical_rademacher(&spec, &sample, 500, 20, &cfg).unwrap();
        let t2 = t0.elapsed();
        let rel = (mc.mean - exact.mean) / exact.mean;
        println!(
            "d={d} w={w} L={levels} V={v} n={n} card={}: exact={:.5} ({t1:?}) mc={:.5} se={:.5} rel={:+.3}% tol={:.5} ({t2:?})",
            class.cardinality(), exact.mean, mc.mean, mc.std_error, 100.0*rel,
            (0.05*exact.mean).max(3.0*mc.std_error),
        );
    }
}

#[test]
#[ignore]
fn explore_gap_runs() {
    let d_spec = ClassSpec::discriminator(2, 4, ActivationKind::Clamp01, 1.0);
    let g_spec = ClassSpec::generator(2, 4, ActivationKind::Clamp01, 1.0, 2);
    let px = SourceSpec::beta(2.0, 5.0, 2, 1001);
    let pz = SourceSpec::uniform(2, 1002);
    let opt = OptConfig {
        step_size: 0.1,
        steps: 120,
        restarts: 4,
        inner_disc_steps: 3,
        seed: 0,
        init_scale: 0.5,
    };
    let obj = ObjectiveConfig::new(0.0, PhiKind::Identity, 1024, 0);
    for lambda in [0.0, 0.5] {
        for n in [50usize, 400] {
            for seed in 1u64..=3 {
                let gap_cfg = GapConfig {
                    n,
                    m: n,
                    lambda,
                    delta: 0.025,
                    holdout: 100_000,
                    tau_draws: 24,
                    mode: GapMode::JointEmpirical,
                    seed,
                };
                let t0 = std::time::Instant::now();
                let rec = measure_gap(&d_spec, &g_spec, &px, &pz, &gap_cfg, &opt, &obj).unwrap();
                println!(
                    "lambda={lambda} n={n} seed={seed}: emp={:+.4} pop={:+.4} gap={:+.4} Rd={:.3} Rdg={:.3} Rg={:.3} bv={:+.3} bc={:.3} ({:?})",
                    rec.value_empirical, rec.value_population, rec.gap,
                    rec.rademacher_d, rec.rademacher_dg, rec.rademacher_g,
                    rec.bound_verbatim, rec.bound_conservative,
                    t0.elapsed()
                );
            }
        }
    }
}
