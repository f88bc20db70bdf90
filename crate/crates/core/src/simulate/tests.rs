use std::sync::atomic::{AtomicBool, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::covariate::{builtin, ModelId};
use crate::quadrature::midpoint_sum;

fn w1() -> Window {
    Window::cube(2, -1.0, 1.0).unwrap()
}

fn model(m: ModelId) -> Arc<dyn Covariate> {
    Arc::new(builtin(m, 2).unwrap())
}

#[test]
fn calibrate_constant_intensity() {
    let beta = calibrate_beta(model(ModelId::Two).as_ref(), &[0.0, 0.0], &w1(), 200.0);
    assert!((beta - 50f64.ln()).abs() < 1e-12);
}

#[test]
fn calibrated_beta_reintegrates_to_target() {
    let z = model(ModelId::Two);
    let theta = [1.0, 4.0];
    let beta = calibrate_beta(z.as_ref(), &theta, &w1(), 200.0);
    // independent re-integration on a different (odd) grid
    let g = Grid::uniform(&w1(), 301).unwrap();
    let mass = midpoint_sum(&g, |u| (beta + dot(&theta, &z.value(u))).exp());
    assert!((mass - 200.0).abs() < 0.5, "{mass}");
    let doubled = calibrate_beta(z.as_ref(), &theta, &w1(), 400.0);
    assert!((doubled - beta - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn max_predictor_found_between_nodes() {
    // sin(4 pi u) peaks at u = 1/8 + k/2, never on a 128-cell centre grid of [-1, 1]
    let z = builtin(ModelId::Sine, 3).unwrap();
    let w = Window::cube(3, -1.0, 1.0).unwrap();
    let s = max_linear_predictor(&z, &[1.0, 1.0, 1.0], &w);
    assert!((s - 1.0).abs() < 1e-12, "{s}");
}

#[test]
fn poisson_points_inside_and_deterministic() {
    let spec = ProcessSpec::new(ProcessKind::Poisson, model(ModelId::Two), 0.0, vec![1.0, 4.0]).calibrated(&w1(), 200.0);
    let sim = Simulator::new(&spec, &w1()).unwrap();
    let a = sim.simulate_seeded(42).unwrap();
    let b = sim.simulate_seeded(42).unwrap();
    assert_eq!(a, b);
    assert!(a.points().all(|u| w1().contains(u)));
    assert!(a.len() > 100 && a.len() < 320);
    assert_ne!(a, sim.simulate_seeded(43).unwrap());
}

#[test]
fn vanishing_intensity_gives_empty_patterns() {
    let spec = ProcessSpec::new(ProcessKind::Poisson, model(ModelId::Two), -20.0, vec![1.0, 4.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let empty = (0..50)
        .filter(|_| simulate_poisson(&spec, &w1(), &mut rng).unwrap().is_empty())
        .count();
    assert!(empty >= 49);
}

#[derive(Debug)]
struct Armed(AtomicBool);

impl Covariate for Armed {
    fn dim(&self) -> usize {
        2
    }
    fn p(&self) -> usize {
        1
    }
    fn value(&self, _: &[f64]) -> Vec<f64> {
        vec![if self.0.load(Ordering::Relaxed) { 1.0 } else { 0.0 }]
    }
    fn div(&self, _: &[f64]) -> Vec<f64> {
        vec![0.0]
    }
    fn div_div(&self, _: &[f64]) -> Vec<f64> {
        vec![0.0]
    }
}

#[test]
fn bound_violation_is_reported() {
    let z = Arc::new(Armed(AtomicBool::new(false)));
    let spec = ProcessSpec::new(ProcessKind::Poisson, z.clone(), 3.0, vec![1.0]);
    let sim = Simulator::new(&spec, &w1()).unwrap();
    z.0.store(true, Ordering::Relaxed);
    let err = sim.simulate(&mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
    assert!(matches!(err, Error::BoundViolation { .. }), "{err}");
}

#[test]
fn thomas_offspring_collapse_onto_parents() {
    let kind = ProcessKind::Thomas(ThomasParams {
        kappa: 5.0,
        sigma: 1e-9,
        dilation_sd: 4.0,
    });
    let spec = ProcessSpec::new(kind, model(ModelId::Two), 0.0, vec![0.0, 0.0]).calibrated(&w1(), 200.0);
    let x = simulate_thomas(&spec, &w1(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert!(x.len() > 20);
    // clusters are points: every point has a neighbour within 1e-7 unless it is alone
    let mut clustered = 0;
    for i in 0..x.len() {
        let near = (0..x.len()).any(|j| {
            j != i && x.point(i).iter().zip(x.point(j)).all(|(a, b)| (a - b).abs() < 1e-7)
        });
        clustered += near as usize;
    }
    assert!(clustered as f64 > 0.9 * x.len() as f64);
}

#[test]
fn small_lgcp_and_field_shape() {
    let kind = ProcessKind::Lgcp(LgcpParams {
        sigma2: 0.5,
        alpha: 0.2,
        grid_per_axis: 16,
    });
    let spec = ProcessSpec::new(kind, model(ModelId::Two), 0.0, vec![1.0, 4.0]).calibrated(&w1(), 200.0);
    let sim = Simulator::new(&spec, &w1()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let y = sim.sample_field(&mut rng).unwrap();
    assert_eq!(y.len(), 256);
    let x = sim.simulate(&mut rng).unwrap();
    assert!(x.points().all(|u| w1().contains(u)));
    assert_eq!(sim.simulate_seeded(5).unwrap(), sim.simulate_seeded(5).unwrap());
}

#[test]
fn preset_names() {
    assert_eq!("lgcp1".parse::<ProcessKind>().unwrap(), ProcessKind::lgcp(0.5, 1.0 / 15.0));
    assert_eq!("thomas2".parse::<ProcessKind>().unwrap(), ProcessKind::thomas(300.0, 0.1));
    assert!("gibbs".parse::<ProcessKind>().is_err());
}

#[test]
fn pattern_file_round_trip() {
    let spec = ProcessSpec::new(ProcessKind::Poisson, model(ModelId::One), 3.0, vec![-2.0]);
    let x = Simulator::new(&spec, &w1()).unwrap().simulate_seeded(11).unwrap();
    let mut buf = Vec::new();
    x.write_to(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("# d=2 window=-1,-1..1,1 process=poisson seed=11\n"));
    let back = PointPattern::read_from(buf.as_slice()).unwrap();
    assert_eq!(back, x);
    let outside = "# d=2 window=-1,-1..1,1 process=poisson seed=1\n2.0 0.0\n";
    assert!(PointPattern::read_from(outside.as_bytes()).is_err());
    let bad = "# d=2 window=-1,-1..1,1 colour=red\n";
    assert!(matches!(PointPattern::read_from(bad.as_bytes()), Err(Error::Parse { .. })));
}
