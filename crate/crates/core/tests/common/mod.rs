//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use icnmp::{
    cycle, pipeline_capacity, rtt, run, share, ModelError, PathSpec, Scenario, SimConfig,
    StrategyId,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn strategy() -> impl Strategy<Value = StrategyId> {
    prop::sample::select(StrategyId::ALL.to_vec())
}

pub fn path() -> impl Strategy<Value = PathSpec> {
    (1.0f64..200.0, 1.0f64..50.0, 0u32..40).prop_map(|(d, r, b)| PathSpec::from_ms_mbps(d, r, b))
}

pub fn scenario(max_paths: usize) -> impl Strategy<Value = Scenario> {
    prop::collection::vec(path(), 1..=max_paths).prop_map(|p| Scenario::new(p, 4876, 4096))
}

/// Two or three paths small enough for the quadratic naive evaluator.
pub fn oracle_scenario() -> impl Strategy<Value = Scenario> {
    let p = (1.0f64..150.0, 0.5f64..20.0, 0u32..30)
        .prop_map(|(d, r, b)| PathSpec::from_ms_mbps(d, r, b));
    prop::collection::vec(p, 2..=3).prop_map(|p| Scenario::new(p, 4876, 4096))
}

pub fn check_sharing_sum(s: &Scenario, st: StrategyId, h: u64) -> Result<(), TestCaseError> {
    let v = share(s, st, h);
    prop_assert_eq!(v.total, h);
    prop_assert_eq!(v.per_path.len(), s.len());
    prop_assert!((v.sum() - h as f64).abs() < 1e-9 * (1.0 + h as f64));
    prop_assert!(v.per_path.iter().all(|&p| p >= 0.0));
    if !matches!(st, StrategyId::Pe | StrategyId::Ug) {
        prop_assert!(v.per_path.iter().all(|p| p.fract() == 0.0));
    }
    Ok(())
}

pub fn check_sharing_monotone(s: &Scenario, st: StrategyId, h: u64) -> Result<(), TestCaseError> {
    let a = share(s, st, h);
    let b = share(s, st, h + 1);
    for (x, y) in a.per_path.iter().zip(&b.per_path) {
        prop_assert!(y >= x);
    }
    Ok(())
}

/// `frac` in [0, 1] selects `H` as a fraction of the total capacity.
pub fn check_fpf_capacity(s: &Scenario, frac: f64) -> Result<(), TestCaseError> {
    let caps = s.capacities();
    let h = (frac * caps.iter().sum::<u64>() as f64).floor() as u64;
    let v = share(s, StrategyId::Fpf, h);
    for (p, c) in v.per_path.iter().zip(&caps) {
        prop_assert!(*p <= *c as f64);
    }
    Ok(())
}

pub fn check_identical_paths(
    p: PathSpec,
    n: usize,
    st: StrategyId,
    h: u64,
) -> Result<(), TestCaseError> {
    let s = Scenario::new(vec![p; n], 4876, 4096);
    let v = share(&s, st, h);
    let hi = v.per_path.iter().cloned().fold(f64::MIN, f64::max);
    let lo = v.per_path.iter().cloned().fold(f64::MAX, f64::min);
    prop_assert!(hi - lo <= 1.0 + 1e-9);
    Ok(())
}

pub fn check_cycle_identity(s: &Scenario, st: StrategyId) -> Result<(), TestCaseError> {
    if let Ok(c) = cycle(s, st) {
        let t = c.y_msgs_per_s * c.a_seconds;
        prop_assert!((t - c.t_interests as f64).abs() <= 1e-9 * c.t_interests as f64);
        prop_assert_eq!(c.t_interests, (c.w_max / 2..=c.w_max).sum::<u64>());
        prop_assert!(c.a_seconds > 0.0);
        // never faster than all links together
        let cap: f64 = s.msg_rates().iter().sum();
        prop_assert!(c.y_msgs_per_s <= cap * (1.0 + 1e-9));
    }
    Ok(())
}

pub fn check_rtt_monotone(p: PathSpec, a: f64, b: f64) -> Result<(), TestCaseError> {
    let r = p.rate_bps / 39008.0;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    prop_assert!(rtt(&p, lo, r) <= rtt(&p, hi, r));
    prop_assert!(rtt(&p, lo, r) >= 2.0 * p.delay);
    Ok(())
}

pub fn check_capacity_monotone(
    p: PathSpec,
    dd: f64,
    dr: f64,
    db: u32,
) -> Result<(), TestCaseError> {
    let c = |q: &PathSpec| pipeline_capacity(q, q.rate_bps / 39008.0);
    let base = c(&p);
    let longer = PathSpec::new(p.delay + dd, p.rate_bps, p.buffer_msgs);
    let faster = PathSpec::new(p.delay, p.rate_bps + dr, p.buffer_msgs);
    let deeper = PathSpec::new(p.delay, p.rate_bps, p.buffer_msgs + db);
    prop_assert!(c(&longer) >= base);
    prop_assert!(c(&faster) >= base);
    prop_assert!(c(&deeper) >= base);
    Ok(())
}

pub fn check_sim_conservation(
    s: &Scenario,
    st: StrategyId,
    chunks: u64,
    seed: u64,
) -> Result<(), TestCaseError> {
    let cfg = SimConfig {
        seed,
        ..SimConfig::with_chunks(chunks)
    };
    let r = run(s, st, &cfg).unwrap();
    prop_assert_eq!(r.delivered_msgs, chunks);
    for (i, f) in r.faces.iter().enumerate() {
        prop_assert_eq!(f.sent, f.delivered + f.dropped + f.in_flight);
        prop_assert!(f.max_queue <= u64::from(s.paths[i].buffer_msgs));
        prop_assert_eq!(f.reordered, 0);
    }
    prop_assert_eq!(r.losses, r.faces.iter().map(|f| f.dropped).sum::<u64>());
    prop_assert_eq!(run(s, st, &cfg).unwrap(), r);
    Ok(())
}

pub fn check_against_naive(s: &Scenario, st: StrategyId) -> Result<(), TestCaseError> {
    let naive = Naive::new(s);
    match (cycle(s, st), naive.cycle(st)) {
        (Ok(c), Some((w, t, a, y))) => {
            prop_assert_eq!(c.w_max, w);
            prop_assert_eq!(c.t_interests, t);
            prop_assert!(close(c.a_seconds, a), "A {} vs {}", c.a_seconds, a);
            prop_assert!(close(c.y_msgs_per_s, y), "Y {} vs {}", c.y_msgs_per_s, y);
            prop_assert!(close(c.y_gross_bps, y * 8.0 * 4876.0));
            prop_assert!(close(c.y_net_bps, y * 8.0 * 4096.0));
        }
        (Err(ModelError::NoFeasibleWindow), None) => {}
        (got, want) => prop_assert!(false, "{:?} vs {:?}", got.map(|c| c.w_max), want),
    }
    Ok(())
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Naive re-derivation of the model: every sharing vector is rebuilt from
/// zero and the window is found by a linear scan.
pub struct Naive {
    delay: Vec<f64>,
    rate: Vec<f64>,
    cap: Vec<f64>,
}

impl Naive {
    pub fn new(s: &Scenario) -> Self {
        let bits = 8.0 * s.data_msg_bytes as f64;
        let delay: Vec<f64> = s.paths.iter().map(|p| p.delay).collect();
        let rate: Vec<f64> = s.paths.iter().map(|p| p.rate_bps / bits).collect();
        let cap = s
            .paths
            .iter()
            .zip(&rate)
            .map(|(p, r)| (2.0 * p.delay * r + p.buffer_msgs as f64 + 1e-9).floor())
            .collect();
        Naive { delay, rate, cap }
    }

    pub fn rtt(&self, i: usize, p: f64) -> f64 {
        let prop = 2.0 * self.delay[i];
        let queue = p / self.rate[i];
        if queue > prop {
            queue
        } else {
            prop
        }
    }

    pub fn share(&self, st: StrategyId, h: u64) -> Vec<f64> {
        let n = self.rate.len();
        if matches!(st, StrategyId::Pe | StrategyId::Ug) {
            return vec![h as f64 / n as f64; n];
        }
        let mut p = vec![0.0; n];
        for _ in 0..h {
            let mut order: Vec<usize> = (0..n).collect();
            if st == StrategyId::Fpf && order.iter().any(|&i| p[i] < self.cap[i]) {
                order.retain(|&i| p[i] < self.cap[i]);
            }
            let key = |i: usize| match st {
                StrategyId::Cf => p[i] / self.rtt(i, p[i]).sqrt(),
                _ => self.rtt(i, p[i]),
            };
            order.sort_by(|&a, &b| {
                key(a)
                    .partial_cmp(&key(b))
                    .unwrap()
                    .then(p[a].partial_cmp(&p[b]).unwrap())
                    .then(a.cmp(&b))
            });
            p[order[0]] += 1.0;
        }
        p
    }

    pub fn fits(&self, st: StrategyId, h: u64) -> bool {
        self.share(st, h).iter().zip(&self.cap).all(|(p, c)| p <= c)
    }

    pub fn wmax(&self, st: StrategyId) -> Option<u64> {
        if !self.fits(st, 1) {
            return None;
        }
        let mut w = 1;
        while self.fits(st, w + 1) {
            w += 1;
        }
        Some(w)
    }

    /// (w_max, T, A, Y)
    pub fn cycle(&self, st: StrategyId) -> Option<(u64, u64, f64, f64)> {
        let w = self.wmax(st)?;
        let mut t = 0;
        let mut a = 0.0;
        for k in w / 2..=w {
            t += k;
            if k == 0 {
                continue;
            }
            let p = self.share(st, k);
            let b: f64 = (0..p.len()).map(|i| p[i] / self.rtt(i, p[i])).sum();
            a += k as f64 / b;
        }
        Some((w, t, a, t as f64 / a))
    }
}
