//! Seeded potentials and kernels.
//!
//! Every random draw comes from `ChaCha8Rng::seed_from_u64(seed)` and is
//! mapped to `(0, 1]` as `1 - u` with `u = rng.gen::<f64>()`. ChaCha output
//! and the `rand` 0.8 float conversion are platform independent, so a seed
//! fixes the values bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{gaussian_on_grid, DiscreteDist, DistError, Grid, Kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomPotentialSpec {
    pub width_bins: usize,
    pub seed: u64,
}

fn draw(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// i.i.d. uniform `(0, 1]` weights on `width_bins` bins centred on the grid.
pub fn random_potential(spec: RandomPotentialSpec, grid: Grid) -> Result<DiscreteDist, DistError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    random_window(grid, spec.width_bins, &mut rng)
}

/// Like [`random_potential`] but drawing from a caller-owned stream.
pub fn random_window(grid: Grid, width_bins: usize, rng: &mut ChaCha8Rng) -> Result<DiscreteDist, DistError> {
    let n = grid.n_bins();
    if width_bins == 0 || width_bins > n {
        return Err(DistError::InvalidMass(format!(
            "window width {width_bins} must be in 1..={n}"
        )));
    }
    let start = (n - width_bins) / 2;
    let mut mass = vec![0.0; n];
    for m in &mut mass[start..start + width_bins] {
        *m = draw(rng);
    }
    DiscreteDist::from_weights(grid, mass)
}

/// How binary kernels are produced for a topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// i.i.d. `(0, 1]` weights over `width_bins` consecutive offsets
    /// `-(width/2) ..`, one stream per graph, kernels drawn in factor order.
    RandomNoise {
        width_bins: usize,
        seed: u64,
    },
    Gaussian {
        sigma_bins: f64,
        #[serde(default = "default_truncate")]
        truncate_sigmas: f64,
    },
    GammaShaped {
        shape: f64,
        scale_bins: f64,
        len: usize,
    },
    Fixed {
        kernel: Kernel,
    },
}

fn default_truncate() -> f64 {
    4.0
}

impl KernelSpec {
    /// The first `count` kernels for a graph.
    pub fn kernels(&self, count: usize) -> Result<Vec<Kernel>, DistError> {
        match self {
            KernelSpec::RandomNoise { width_bins, seed } => {
                if *width_bins == 0 {
                    return Err(DistError::InvalidKernel("random kernel width must be >= 1".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let first = -((*width_bins / 2) as i64);
                (0..count)
                    .map(|_| Kernel::contiguous(first, (0..*width_bins).map(|_| draw(&mut rng)).collect()))
                    .collect()
            }
            KernelSpec::Gaussian {
                sigma_bins,
                truncate_sigmas,
            } => {
                let k = Kernel::gaussian(*sigma_bins, *truncate_sigmas)?;
                Ok(vec![k; count])
            }
            KernelSpec::GammaShaped { shape, scale_bins, len } => {
                let k = Kernel::gamma_shaped(*shape, *scale_bins, *len)?;
                Ok(vec![k; count])
            }
            KernelSpec::Fixed { kernel } => Ok(vec![kernel.clone(); count]),
        }
    }
}

/// How a prior is produced. Random variants draw from a caller stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PriorSpec {
    /// Centered random window, see [`random_window`].
    RandomNoise {
        width_bins: usize,
    },
    /// Flat box of `width_bins` bins centred on the grid.
    Box {
        width_bins: usize,
    },
    Gaussian {
        mean: f64,
        var: f64,
    },
    Uniform,
    Delta {
        bin: usize,
    },
}

impl PriorSpec {
    pub fn materialize(&self, grid: Grid, rng: &mut ChaCha8Rng) -> Result<DiscreteDist, DistError> {
        match self {
            PriorSpec::RandomNoise { width_bins } => random_window(grid, *width_bins, rng),
            PriorSpec::Box { width_bins } => {
                let n = grid.n_bins();
                if *width_bins == 0 || *width_bins > n {
                    return Err(DistError::InvalidMass(format!(
                        "box width {width_bins} must be in 1..={n}"
                    )));
                }
                let start = (n - width_bins) / 2;
                let mass = (0..n)
                    .map(|i| {
                        if (start..start + width_bins).contains(&i) {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                DiscreteDist::from_weights(grid, mass)
            }
            PriorSpec::Gaussian { mean, var } => gaussian_on_grid(*mean, *var, grid),
            PriorSpec::Uniform => Ok(DiscreteDist::uniform(grid)),
            PriorSpec::Delta { bin } => DiscreteDist::delta(grid, *bin),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::cumulants;

    #[test]
    fn deterministic_per_seed() {
        let g = Grid::new(1024, -32.0, 31.0).unwrap();
        let a = random_potential(
            RandomPotentialSpec {
                width_bins: 16,
                seed: 42,
            },
            g,
        )
        .unwrap();
        let b = random_potential(
            RandomPotentialSpec {
                width_bins: 16,
                seed: 42,
            },
            g,
        )
        .unwrap();
        let c = random_potential(
            RandomPotentialSpec {
                width_bins: 16,
                seed: 43,
            },
            g,
        )
        .unwrap();
        assert_eq!(a.mass(), b.mass());
        assert_ne!(a.mass(), c.mass());
    }

    #[test]
    fn width_one_is_delta() {
        let g = Grid::unit(10).unwrap();
        let d = random_potential(RandomPotentialSpec { width_bins: 1, seed: 7 }, g).unwrap();
        assert_eq!(d.mass().iter().filter(|m| **m > 0.0).count(), 1);
        assert_eq!(d.mass()[4], 1.0);
        assert!(random_potential(
            RandomPotentialSpec {
                width_bins: 11,
                seed: 7
            },
            g
        )
        .is_err());
    }

    #[test]
    fn wide_random_windows_are_non_gaussian() {
        let g = Grid::new(1024, -32.0, 31.0).unwrap();
        let mut hits = 0;
        for seed in 42..=141 {
            let d = random_potential(RandomPotentialSpec { width_bins: 16, seed }, g).unwrap();
            assert!(d.mass().iter().filter(|m| **m > 0.0).count() <= 16);
            if cumulants(&d).unwrap().eps > 0.05 {
                hits += 1;
            }
        }
        assert!(hits >= 99, "only {hits} of 100 seeds non-Gaussian");
    }

    #[test]
    fn random_kernels_use_one_stream() {
        let spec = KernelSpec::RandomNoise {
            width_bins: 12,
            seed: 5,
        };
        let ks = spec.kernels(3).unwrap();
        assert_eq!(ks[0].offsets().first(), Some(&-6));
        assert_eq!(ks[0].offsets().last(), Some(&5));
        assert_ne!(ks[0], ks[1]);
        assert_eq!(spec.kernels(2).unwrap(), ks[..2].to_vec());
    }

    #[test]
    fn spec_serde() {
        let s: KernelSpec = serde_json::from_str(r#"{"type":"gaussian","sigma_bins":1.0}"#).unwrap();
        assert_eq!(
            s,
            KernelSpec::Gaussian {
                sigma_bins: 1.0,
                truncate_sigmas: 4.0
            }
        );
        let p: PriorSpec = serde_json::from_str(r#"{"type":"box","width_bins":8}"#).unwrap();
        assert_eq!(p, PriorSpec::Box { width_bins: 8 });
    }
}
