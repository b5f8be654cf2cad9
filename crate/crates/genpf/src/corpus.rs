//! Seeded random irreducible instances for agreement testing.
//!
//! The generator rejection-samples: supporters are dedicated columns (so
//! sets are disjoint and no affector is redundant), repressor entries are
//! sprinkled at a fixed density, and candidates failing the irreducibility
//! test are discarded. Everything is driven by a recorded seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::irreducibility::test_irreducible;
use crate::system::GainSystem;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CorpusParams {
    /// Inclusive range of entity counts.
    pub entities: (usize, usize),
    /// Inclusive range of supporters per entity.
    pub supporters_per_entity: (usize, usize),
    /// Cap on the total number of affectors.
    pub max_affectors: usize,
    /// Inclusive range of integer gains.
    pub gain_range: (i64, i64),
    /// Probability that a non-supporter pair gets a repressor gain.
    pub repressor_density: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            entities: (2, 4),
            supporters_per_entity: (1, 3),
            max_affectors: 9,
            gain_range: (1, 9),
            repressor_density: 0.6,
        }
    }
}

/// Draws one random irreducible system; returns the system and the number
/// of candidates rejected before it.
pub fn random_irreducible_system(seed: u64, params: &CorpusParams) -> Result<(GainSystem, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for rejected in 0..10_000 {
        let candidate = draw(&mut rng, params)?;
        if test_irreducible(&candidate)?.irreducible {
            return Ok((candidate, rejected));
        }
    }
    Err(Error::OracleFailed(format!(
        "no irreducible instance found for seed {seed} after 10000 draws"
    )))
}

/// Draws one random candidate without the irreducibility filter; useful
/// for cross-validating the irreducibility test itself.
pub fn random_candidate(seed: u64, params: &CorpusParams) -> Result<GainSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw(&mut rng, params)
}

fn draw(rng: &mut ChaCha8Rng, params: &CorpusParams) -> Result<GainSystem> {
    let (n_lo, n_hi) = params.entities;
    let (s_lo, s_hi) = params.supporters_per_entity;
    let n = rng.gen_range(n_lo..=n_hi);
    // Resample supporter multiplicities until the affector budget fits.
    let sizes: Vec<usize> = loop {
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(s_lo..=s_hi)).collect();
        if sizes.iter().sum::<usize>() <= params.max_affectors {
            break sizes;
        }
    };
    let m: usize = sizes.iter().sum();
    let (g_lo, g_hi) = params.gain_range;
    let mut gains = vec![vec![0i64; m]; n];
    let mut col = 0;
    let mut owner = vec![0usize; m];
    for (i, &k) in sizes.iter().enumerate() {
        for _ in 0..k {
            gains[i][col] = rng.gen_range(g_lo..=g_hi);
            owner[col] = i;
            col += 1;
        }
    }
    for (i, row) in gains.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if owner[j] != i && rng.gen_bool(params.repressor_density) {
                *cell = -rng.gen_range(g_lo..=g_hi);
            }
        }
    }
    GainSystem::from_signed_ints(&gains)
}
