use fdrs_core::analytic::{self, feasibility_dist};
use fdrs_core::channel::{db_to_linear, ChannelSampler};
use fdrs_core::montecarlo::{e2e_sinr, estimate_feasibility, estimate_outage, estimate_outage_batch, Query, SimOptions};
use fdrs_core::{LinkSpec, NetworkConfig, Protocol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn link(m: f64, db: f64) -> LinkSpec {
    LinkSpec::new(m, db_to_linear(db)).unwrap()
}

fn fig2b() -> NetworkConfig {
    NetworkConfig::new(3, 1.0, 1.0, 1.0, link(2.0, 15.0), link(2.0, 15.0), link(2.0, 3.0))
        .with_direct_link(link(2.0, 5.0))
        .with_cognitive(link(1.0, 0.0), link(1.0, 1.0), db_to_linear(3.0))
}

#[test]
fn three_sigma_interval_covers_known_outage() {
    let cfg = NetworkConfig::new(2, 10.0, 10.0, 1.0, link(1.0, 10.0), link(1.0, 10.0), link(1.0, 0.0));
    let p = analytic::outage(&cfg, Protocol::Ndl, 2.0, false).unwrap();
    let covered = (0..200u64)
        .filter(|&seed| {
            let e = estimate_outage(&cfg, Protocol::Ndl, 2.0, 4000, 1000 + seed, false).unwrap();
            (e.p_hat - p).abs() <= 3.0 * e.stderr
        })
        .count();
    assert!(covered >= 198, "{covered} of 200");
}

#[test]
fn cognitive_outage_agrees_with_mixture() {
    let cfg = fig2b();
    let qs: Vec<Query> = Protocol::FULL_DUPLEX
        .iter()
        .map(|&protocol| Query { protocol, threshold: protocol.outage_threshold(2.0) })
        .collect();
    let est = estimate_outage_batch(&cfg, &qs, true, &SimOptions::new(500_000, 8)).unwrap();
    for (q, e) in qs.iter().zip(est) {
        let a = analytic::outage(&cfg, q.protocol, 2.0, true).unwrap();
        assert!((e.p_hat - a).abs() <= (3.0 * e.stderr).max(1e-3), "{:?}: {} vs {a}", q.protocol, e.p_hat);
    }
}

#[test]
fn half_duplex_combining_is_ordered() {
    let cfg = fig2b().without_cognitive();
    let sampler = ChannelSampler::new(&cfg);
    let mut r = sampler.empty_realization();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50_000 {
        sampler.sample_into(&mut r, &mut rng);
        assert!(e2e_sinr(&r, &cfg, Protocol::HdSdf) >= e2e_sinr(&r, &cfg, Protocol::HdMrc));
    }
    let mrc = estimate_outage(&cfg, Protocol::HdMrc, 1.0, 100_000, 1, false).unwrap();
    let sdf = estimate_outage(&cfg, Protocol::HdSdf, 1.0, 100_000, 1, false).unwrap();
    assert!(sdf.p_hat <= mrc.p_hat);
}

#[test]
fn feasibility_frequencies_match_closed_form() {
    let cfg = fig2b();
    let n = 400_000;
    let a = feasibility_dist(&cfg).unwrap();
    let m = estimate_feasibility(&cfg, n, 21).unwrap();
    for (pa, pm) in a.p.iter().zip(&m.p).chain([(&a.p_tilde0, &m.p_tilde0)]) {
        let sigma = (pa * (1.0 - pa) / n as f64).sqrt();
        assert!((pa - pm).abs() <= 3.0 * sigma, "{a:?} vs {m:?}");
    }
    let mut generous = cfg.clone();
    generous.ith = Some(1e9);
    assert_eq!(estimate_feasibility(&generous, 10_000, 1).unwrap().p[3], 1.0);
}

#[test]
fn single_relay_erlang_case() {
    let one = LinkSpec::new(1.0, 1.0).unwrap();
    let cfg = NetworkConfig::new(1, 1.0, 1.0, 0.0, one, one, one).with_cognitive(one, one, 2.0);
    let n = 400_000;
    let m = estimate_feasibility(&cfg, n, 3).unwrap();
    let want = 1.0 - 3.0 * (-2.0f64).exp();
    assert!((m.p[1] - want).abs() <= 3.0 * (want * (1.0 - want) / n as f64).sqrt(), "{}", m.p[1]);
}
