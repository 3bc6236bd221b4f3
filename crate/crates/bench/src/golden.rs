//! Shared test vectors for the data-consistency blend.
//!
//! Other implementations of the blend check themselves against this file.
//! Layout, little-endian:
//!
//! ```text
//! header:  version u64 | count u64
//! case:    N u64 | M u64 | λ f64 | M × mask index u32 (one-based)
//!          | N × (re, im) f64 estimate | M × (re, im) f64 measurements
//!          | N × (re, im) f64 expected output
//! ```

use std::io::{Read, Write};

use hankel_core::rng::{derive_seed, rng_from_seed, unit_f64};
use hankel_core::sampling::make_mask;
use hankel_core::solvers::data_consistency_samples;
use hankel_core::{MaskSpec, Pattern, SamplingMask, C64};

use crate::error::{format_err, Result};

pub const GOLDEN_VERSION: u64 = 1;
pub const GOLDEN_COUNT: usize = 1000;
pub const GOLDEN_SEED: u64 = 2024;

/// Weights every case cycles through, covering no blending, equal weights
/// and the synthetic and realistic defaults.
const LAMBDAS: [f64; 5] = [0.0, 1.0, 100.0, 316.227_766_016_837_94, 3.162_277_660_168_379_5];

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenCase {
    pub lambda: f64,
    pub mask: SamplingMask,
    pub x_tilde: Vec<C64>,
    pub y: Vec<C64>,
    pub expected: Vec<C64>,
}

fn cnum(rng: &mut hankel_core::rng::Rng) -> C64 {
    C64::new(2.0 * unit_f64(rng) - 1.0, 2.0 * unit_f64(rng) - 1.0)
}

/// Deterministic cases with `N` in `[4, 24]`, rates in `[0.25, 1]` and
/// uniform-random masks.
pub fn golden_cases(count: usize, seed: u64) -> Result<Vec<GoldenCase>> {
    (0..count)
        .map(|i| {
            let case_seed = derive_seed(seed, &[i as u64]);
            let mut rng = rng_from_seed(case_seed);
            let n = 4 + (unit_f64(&mut rng) * 21.0) as usize;
            let rate = 0.25 + 0.75 * unit_f64(&mut rng);
            let lambda = if i % 6 == 5 {
                10f64.powf(6.0 * unit_f64(&mut rng) - 3.0)
            } else {
                LAMBDAS[i % 6]
            };
            let mask = make_mask(&MaskSpec::new(n, rate, Pattern::UniformRandom, derive_seed(case_seed, &[1])))?;
            let x_tilde: Vec<C64> = (0..n).map(|_| cnum(&mut rng)).collect();
            let y: Vec<C64> = (0..mask.len()).map(|_| cnum(&mut rng)).collect();
            let mut expected = x_tilde.clone();
            data_consistency_samples(&mut expected, &y, &mask, lambda)?;
            Ok(GoldenCase {
                lambda,
                mask,
                x_tilde,
                y,
                expected,
            })
        })
        .collect()
}

fn put_complex(w: &mut impl Write, v: &[C64]) -> Result<()> {
    for c in v {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_golden(w: &mut impl Write, cases: &[GoldenCase]) -> Result<()> {
    w.write_all(&GOLDEN_VERSION.to_le_bytes())?;
    w.write_all(&(cases.len() as u64).to_le_bytes())?;
    for c in cases {
        w.write_all(&(c.mask.n() as u64).to_le_bytes())?;
        w.write_all(&(c.mask.len() as u64).to_le_bytes())?;
        w.write_all(&c.lambda.to_le_bytes())?;
        for i in c.mask.indices_one_based() {
            w.write_all(&i.to_le_bytes())?;
        }
        put_complex(w, &c.x_tilde)?;
        put_complex(w, &c.y)?;
        put_complex(w, &c.expected)?;
    }
    Ok(())
}

fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b).map_err(|_| format_err("golden file is truncated"))?;
    Ok(b)
}

fn get_complex(r: &mut impl Read, len: usize) -> Result<Vec<C64>> {
    (0..len)
        .map(|_| Ok(C64::new(f64::from_le_bytes(take(r)?), f64::from_le_bytes(take(r)?))))
        .collect()
}

pub fn read_golden(r: &mut impl Read) -> Result<Vec<GoldenCase>> {
    let version = u64::from_le_bytes(take(r)?);
    if version != GOLDEN_VERSION {
        return Err(format_err(format!("golden file version {version} is not supported")));
    }
    let count = u64::from_le_bytes(take(r)?);
    let mut cases = Vec::new();
    for _ in 0..count {
        let n = u64::from_le_bytes(take(r)?) as usize;
        let m = u64::from_le_bytes(take(r)?) as usize;
        if m > n || n > 1 << 20 {
            return Err(format_err(format!("golden case with N={n} M={m}")));
        }
        let lambda = f64::from_le_bytes(take(r)?);
        let idx = (0..m)
            .map(|_| Ok(u32::from_le_bytes(take(r)?)))
            .collect::<Result<Vec<_>>>()?;
        let mask = SamplingMask::from_one_based(n, &idx, Pattern::UniformRandom)?;
        cases.push(GoldenCase {
            lambda,
            mask,
            x_tilde: get_complex(r, n)?,
            y: get_complex(r, m)?,
            expected: get_complex(r, n)?,
        });
    }
    Ok(cases)
}
