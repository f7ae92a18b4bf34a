//! Request generation: Zipf popularity over a named catalog, Poisson
//! arrivals per consumer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::names::{Name, NamePrefix};
use crate::time::SimTime;

/// Zipf(α) over ranks `0..n` (rank 0 most popular), sampled by binary
/// search over cumulative weights.
#[derive(Clone, Debug)]
pub struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    pub fn new(n: usize, alpha: f64) -> Self {
        assert!(n > 0, "empty catalog");
        assert!(alpha >= 0.0 && alpha.is_finite(), "bad exponent");
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += (k as f64).powf(-alpha);
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Self { cdf }
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    pub fn probability(&self, rank: usize) -> f64 {
        let below = if rank == 0 { 0.0 } else { self.cdf[rank - 1] };
        self.cdf[rank] - below
    }

    /// Rank for a uniform draw `u` in [0, 1).
    pub fn rank_for(&self, u: f64) -> usize {
        self.cdf.partition_point(|c| *c <= u).min(self.cdf.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.rank_for(rng.random::<f64>())
    }
}

/// `per_prefix` objects under each prefix. Rank `r` names object
/// `r / P` of prefix `r % P`, so popularity is spread over all prefixes.
#[derive(Clone, Debug)]
pub struct Catalog {
    prefixes: Vec<NamePrefix>,
    per_prefix: usize,
}

impl Catalog {
    pub fn new(prefixes: Vec<NamePrefix>, per_prefix: usize) -> Self {
        assert!(!prefixes.is_empty() && per_prefix > 0, "empty catalog");
        Self { prefixes, per_prefix }
    }

    pub fn len(&self) -> usize {
        self.prefixes.len() * self.per_prefix
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn prefix_of(&self, rank: usize) -> &NamePrefix {
        &self.prefixes[rank % self.prefixes.len()]
    }

    pub fn name_of(&self, rank: usize) -> Name {
        let object = rank / self.prefixes.len();
        Name::child_of(self.prefix_of(rank), &format!("o{object}")).expect("generated names are well formed")
    }
}

/// One consumer's request sequence. Depends only on the run seed and the
/// consumer's index, never on the forwarding plane.
#[derive(Clone, Debug)]
pub struct RequestStream {
    rng: ChaCha8Rng,
    gaps: Exp<f64>,
}

impl RequestStream {
    pub fn new(seed: u64, consumer_index: u64, rate: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(consumer_index + 1);
        Self {
            rng,
            gaps: Exp::new(rate).expect("positive rate"),
        }
    }

    /// Time to the next request and its catalog rank.
    pub fn next(&mut self, zipf: &Zipf) -> (SimTime, usize) {
        let gap = SimTime::from_secs_f64(self.gaps.sample(&mut self.rng));
        (gap, zipf.sample(&mut self.rng))
    }
}
