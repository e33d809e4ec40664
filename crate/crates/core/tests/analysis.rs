use fdrs_core::analysis::{judge, run_sweep, validate_report, Axis, SweepMethod, SweepSpec};
use fdrs_core::channel::db_to_linear;
use fdrs_core::montecarlo::{OutageEstimate, SimOptions};
use fdrs_core::{LinkSpec, Method, NetworkConfig, Protocol};

fn link(m: f64, db: f64) -> LinkSpec {
    LinkSpec::new(m, db_to_linear(db)).unwrap()
}

fn fig2a() -> NetworkConfig {
    NetworkConfig::new(3, 1.0, 1.0, 1.0, link(2.0, 15.0), link(2.0, 15.0), link(2.0, 3.0))
        .with_direct_link(link(2.0, 5.0))
}

fn spec(axis: Axis, from: f64, to: f64, steps: usize, protocols: &[Protocol], method: SweepMethod) -> SweepSpec {
    SweepSpec {
        axis,
        from,
        to,
        steps,
        protocols: protocols.to_vec(),
        method,
        rate: 2.0,
        cognitive: false,
        trials: 1_000_000,
        seed: 17,
    }
}

#[test]
fn rate_sweep_orders_direct_link_schemes() {
    let s = spec(Axis::RateBpcu, 1.0, 3.0, 5, &[Protocol::Idl, Protocol::IdlDt, Protocol::Sdf], SweepMethod::Mc);
    let t = run_sweep(&s, &fig2a()).unwrap();
    assert!(t.errors.is_empty());
    let at_two: Vec<f64> = t.rows.iter().filter(|r| r.axis == 2.0).map(|r| r.throughput).collect();
    let [idl, dt, sdf] = at_two[..] else { panic!("{at_two:?}") };
    assert!(sdf >= dt && dt >= idl, "{sdf} {dt} {idl}");
}

#[test]
fn more_relays_never_hurt() {
    let mut cfg = fig2a();
    cfg.lambda = 0.0;
    let s = spec(Axis::RelayCount, 1.0, 8.0, 2, &[Protocol::Ndl], SweepMethod::Analytic);
    let t = run_sweep(&s, &cfg).unwrap();
    assert_eq!(t.rows.len(), 8);
    for w in t.rows.windows(2) {
        assert!(w[1].outage <= w[0].outage, "{:?}", w);
    }
}

#[test]
fn power_sweep_is_monotone_for_direct_transmission_fallback() {
    let s = spec(Axis::PowerDb, 0.0, 40.0, 21, &[Protocol::IdlDt], SweepMethod::Both);
    let mut s = s;
    s.trials = 100_000;
    let t = run_sweep(&s, &fig2a()).unwrap();
    let analytic: Vec<f64> = t.rows.iter().filter(|r| r.method == Method::Analytic).map(|r| r.outage).collect();
    assert_eq!(analytic.len(), 21);
    for w in analytic.windows(2) {
        assert!(w[1] <= w[0] + 1e-15, "{w:?}");
    }
    let mc: Vec<f64> = t.rows.iter().filter(|r| r.method == Method::MonteCarlo).map(|r| r.outage).collect();
    assert!(mc[0] > mc[10] && mc[10] >= mc[20]);
}

#[test]
fn interference_threshold_sweep() {
    let cfg = fig2a().with_cognitive(link(1.0, 0.0), link(1.0, 1.0), 1.0);
    let s = spec(Axis::IthDb, -10.0, 20.0, 7, &[Protocol::Sdf, Protocol::Ndl], SweepMethod::Analytic);
    let t = run_sweep(&s, &cfg).unwrap();
    let sdf: Vec<f64> = t.rows.iter().filter(|r| r.protocol == Protocol::Sdf).map(|r| r.outage).collect();
    for w in sdf.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{sdf:?}");
    }
}

#[test]
fn validation_report_passes_and_detects_corruption() {
    let r = validate_report(&fig2a(), &Protocol::FULL_DUPLEX, 2.0, false, &SimOptions::new(1_000_000, 23)).unwrap();
    assert!(r.all_pass(), "{r:?}");
    let row = &r.rows[1];
    let est = OutageEstimate { p_hat: row.p_hat, stderr: row.stderr, trials: r.trials, seed: r.seed };
    assert!(!judge(row.protocol, row.p_analytic + 0.05, &est).pass);
    let zero = OutageEstimate { p_hat: 0.0, stderr: 0.0, trials: 10, seed: 0 };
    assert!(judge(Protocol::Ndl, 0.0, &zero).pass);
}
