use std::sync::OnceLock;

use fibmahler_core::lattice::{delta, enumerate_r, r_tower, FibSystem};
use fibmahler_core::measure::eval_measure_fn;
use fibmahler_core::{is_prime, CoefficientVector, Ctx, ExponentVector, PrimePair, SetFamily};
use proptest::prelude::*;

fn sys() -> &'static FibSystem {
    static SYS: OnceLock<FibSystem> = OnceLock::new();
    SYS.get_or_init(|| FibSystem::new(13).unwrap())
}

fn v_sets() -> &'static Vec<SetFamily> {
    static V: OnceLock<Vec<SetFamily>> = OnceLock::new();
    V.get_or_init(|| (1..=10).map(|n| sys().enumerate_v(n).unwrap()).collect())
}

fn two_slot(z: &ExponentVector) -> Option<usize> {
    let s: Vec<usize> = z.support().collect();
    match s.as_slice() {
        [j] => Some(*j),
        [a, b] if b - a == 1 => Some(*b),
        _ => None,
    }
}

#[test]
fn families_are_nested() {
    let sys = sys();
    let tower = r_tower(sys, 10, |n| sys.enumerate_c(n)).unwrap();
    for (k, r) in tower.iter().enumerate() {
        let n = k + 1;
        let s = sys.build_s(n).unwrap();
        let c = sys.enumerate_c(n).unwrap();
        let v = &v_sets()[k];
        assert!(s.is_subset_of(r), "S_{n} ⊄ R_{n}");
        assert!(r.is_subset_of(&c), "R_{n} ⊄ C_{n}");
        assert!(c.is_subset_of(v), "C_{n} ⊄ V_{n}");
        assert!(v.iter().all(|x| sys.check(x)));
    }
}

#[test]
fn shift_injects_and_counts_add_up() {
    let sys = sys();
    let tower = r_tower(sys, 11, |n| sys.enumerate_c(n)).unwrap();
    for n in 2..=11 {
        let (prev, cur) = (&tower[n - 2], &tower[n - 1]);
        let s_prev = sys.build_s(n - 1).unwrap();
        let s_cur = sys.build_s(n).unwrap();
        let mut images = Vec::new();
        for z in prev.iter().filter(|z| !s_prev.contains(z)) {
            let y = z.shift_lambda().unwrap();
            assert!(cur.contains(&y) && !s_cur.contains(&y), "λ{z} escaped R_{n}∖S_{n}");
            images.push(y);
        }
        images.sort();
        images.dedup();
        let d = delta(sys, cur, Some(prev)).unwrap();
        assert_eq!(images.len(), prev.len() - s_prev.len());
        assert_eq!(cur.len() - s_cur.len(), d.len() + images.len(), "n = {n}");
    }
}

#[test]
fn two_slot_members_are_generators() {
    let sys = sys();
    let mut seen = 0;
    for (k, v) in v_sets().iter().enumerate() {
        let n = k + 1;
        for z in v.iter() {
            if let Some(j) = two_slot(z) {
                assert_eq!(z.entries(), sys.x_vector(n, j + 1).unwrap().entries(), "{z} in V_{n}");
                seen += 1;
            }
        }
    }
    let s_total: usize = (1..=10).map(|n| sys.build_s(n).unwrap().len()).sum();
    assert_eq!(seen, s_total);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sampled_two_slot_members_are_generators(n in 1usize..=10, pick in any::<prop::sample::Index>()) {
        let v = &v_sets()[n - 1];
        let z = &v.members()[pick.index(v.len())];
        if let Some(j) = two_slot(z) {
            let x = sys().x_vector(n, j + 1).unwrap();
            prop_assert_eq!(z.entries(), x.entries());
        } else {
            prop_assert!(sys().s_index(z).is_none());
        }
    }
}

#[test]
fn dominance_filter_needs_every_prior_level() {
    let sys = sys();
    let tower = r_tower(sys, 6, |n| sys.enumerate_c(n)).unwrap();
    let c7 = sys.enumerate_c(7).unwrap();
    assert!(enumerate_r(sys, &c7, &tower[..5]).is_err());
    assert_eq!(enumerate_r(sys, &c7, &tower).unwrap().len(), 7);
}

#[test]
fn primality_matches_a_sieve() {
    const LIMIT: usize = 1_000_000;
    let mut composite = vec![false; LIMIT + 1];
    composite[0] = true;
    composite[1] = true;
    let mut i = 2;
    while i * i <= LIMIT {
        if !composite[i] {
            for m in (i * i..=LIMIT).step_by(i) {
                composite[m] = true;
            }
        }
        i += 1;
    }
    for n in 2..=LIMIT {
        assert_eq!(is_prime(n as u64).unwrap(), !composite[n], "{n}");
    }
}

#[test]
fn distinct_members_have_distinct_measure_functions() {
    let mut ctx = Ctx::new(128).unwrap();
    let pair = PrimePair::new(1879, 198_301, &mut ctx).unwrap();
    let cv = CoefficientVector::new(&pair, 13, &mut ctx).unwrap();
    let ts: Vec<_> = (0..64).map(|k| ctx.from_f64(0.25 * 1.06f64.powi(k))).collect();
    for v in &v_sets()[..8] {
        let sig: Vec<Vec<f64>> = v
            .iter()
            .map(|x| ts.iter().map(|t| eval_measure_fn(x, &cv, t, &mut ctx).unwrap().to_f64()).collect())
            .collect();
        for a in 0..sig.len() {
            for b in a + 1..sig.len() {
                assert!(
                    sig[a].iter().zip(&sig[b]).any(|(x, y)| (x - y).abs() > 1e-12 * x),
                    "{} and {} agree on every sample",
                    v.members()[a],
                    v.members()[b]
                );
            }
        }
    }
}
