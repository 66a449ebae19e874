use bpclt_core::dist::{
    cumulants, gaussian_on_grid, kl_divergence, kl_to_gaussian_fit, raw_cumulants, DiscreteDist, Grid, Kernel,
};
use bpclt_core::graph::KernelSpec;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(1024, -32.0, 31.0).unwrap()
}

fn positive_weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len)
}

/// Mass on a window of `weights.len()` bins starting at `start`.
fn windowed(start: usize, weights: &[f64]) -> DiscreteDist {
    let mut mass = vec![0.0; 1024];
    mass[start..start + weights.len()].copy_from_slice(weights);
    DiscreteDist::from_weights(grid(), mass).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_commutes_and_associates(a in positive_weights(24), b in positive_weights(24), c in positive_weights(24)) {
        let (a, b, c) = (windowed(500, &a), windowed(500, &b), windowed(500, &c));
        let ab = a.product(&b).unwrap();
        prop_assert!(ab.linf(&b.product(&a).unwrap()) < 1e-12);
        let l = ab.product(&c).unwrap();
        let r = a.product(&b.product(&c).unwrap()).unwrap();
        prop_assert!(l.linf(&r) < 1e-12);
        prop_assert!((l.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sequential_convolution_equals_composed_kernel(m in positive_weights(16), k1 in positive_weights(9), k2 in positive_weights(7)) {
        let m = windowed(500, &m);
        let k1 = Kernel::contiguous(-4, k1).unwrap();
        let k2 = Kernel::contiguous(-1, k2).unwrap();
        let seq = m.convolve(&k1).unwrap().convolve(&k2).unwrap();
        let comp = m.convolve(&k1.compose(&k2)).unwrap();
        let swapped = m.convolve(&k2).unwrap().convolve(&k1).unwrap();
        prop_assert!(seq.linf(&comp) < 1e-9);
        prop_assert!(seq.linf(&swapped) < 1e-9);
    }

    #[test]
    fn raw_cumulants_add_under_convolution(m in positive_weights(20), k in positive_weights(12)) {
        let m = windowed(480, &m);
        let k = Kernel::contiguous(-6, k).unwrap();
        let out = m.convolve(&k).unwrap();
        let km = raw_cumulants(&m).unwrap();
        let kk = k.summary(grid().step()).unwrap().kappa;
        let ko = raw_cumulants(&out).unwrap();
        for n in 0..4 {
            let expect = km[n] + kk[n];
            prop_assert!((ko[n] - expect).abs() <= 0.01 * expect.abs().max(1e-9), "order {}", n + 1);
        }
    }

    #[test]
    fn kl_is_nonnegative(m in positive_weights(40), q in positive_weights(60)) {
        let d = windowed(300, &m);
        prop_assert!(kl_to_gaussian_fit(&d).unwrap() >= 0.0);
        let q = windowed(290, &q);
        prop_assert!(kl_divergence(&d, &q) >= -1e-12);
        prop_assert!(kl_divergence(&d, &d).abs() < 1e-12);
    }
}

#[test]
fn standardized_cumulants_decay_as_power_law() {
    for seed in 42..52 {
        let k = KernelSpec::RandomNoise { width_bins: 12, seed }
            .kernels(1)
            .unwrap()
            .remove(0);
        let one = k.as_dist(grid(), 512).unwrap();
        let base = cumulants(&one).unwrap();
        let mut m = one.clone();
        let mut count = 1;
        for target in [2usize, 4, 8, 16] {
            while count < target {
                m = m.convolve(&k).unwrap();
                count += 1;
            }
            let s = cumulants(&m).unwrap();
            let mf = target as f64;
            let want3 = base.skew * mf.powf(-0.5);
            let want4 = base.exkurt * mf.powf(-1.0);
            assert!((s.skew - want3).abs() <= 0.05 * want3.abs(), "seed {seed} m {target}");
            assert!((s.exkurt - want4).abs() <= 0.05 * want4.abs(), "seed {seed} m {target}");
        }
    }
}

#[test]
fn gaussian_product_halves_variance() {
    let a = gaussian_on_grid(0.0, 1.0, grid()).unwrap();
    let v = cumulants(&a.product(&a).unwrap()).unwrap().var;
    assert!((v - 0.5).abs() / 0.5 < 0.02);
}
