//! Small numeric helpers shared across modules: compensated accumulation,
//! deterministic seed derivation, and rank statistics.

/// Neumaier compensated accumulator.
///
/// All entropy/mutual-information summations run through this so the
/// 1e-9/1e-12 identities between algebraically equal routes stay honest on
/// large matrices.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sum an iterator with compensation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// The reproducible RNG used everywhere randomness is needed: ChaCha with
/// 12 rounds, seeded from a `u64`, stable across platforms.
pub type SeededRng = rand_chacha::ChaCha12Rng;

/// Construct the crate's RNG from a seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

/// Derive an independent child seed from a master seed and an index.
///
/// SplitMix64 finalizer over the pair; fixed algorithm so that sweeps and
/// paired trials reproduce bit-for-bit across platforms.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Kendall rank correlation (tau-b) of `y` against its index order.
///
/// Returns `None` for fewer than two points. A series with zero concordant/
/// discordant imbalance (e.g. all values equal) reports 0.0: no trend.
pub fn kendall_tau_vs_index(y: &[f64]) -> Option<f64> {
    let n = y.len();
    if n < 2 {
        return None;
    }
    let mut concordant_minus_discordant: i64 = 0;
    let mut tied_y: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            // Index pairs are always strictly increasing, so concordance is
            // the sign of y[j] - y[i].
            if y[j] > y[i] {
                concordant_minus_discordant += 1;
            } else if y[j] < y[i] {
                concordant_minus_discordant -= 1;
            } else {
                tied_y += 1;
            }
        }
    }
    if concordant_minus_discordant == 0 {
        return Some(0.0);
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = ((n0 as f64) * ((n0 - tied_y) as f64)).sqrt();
    Some(concordant_minus_discordant as f64 / denom)
}
