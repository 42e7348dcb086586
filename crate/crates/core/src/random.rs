//! Seeded random operators, states and vectors for the invariant suites.
//!
//! All sampling goes through [`rng`], a ChaCha8 stream seeded with a `u64`,
//! so reports are reproducible across platforms.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Operator, C64};
use crate::error::Result;
use crate::modes::{ModeSet, OrderedPartition, Partition};
use crate::parity::{parity_parts, project_sector, ParitySector, StateVector};
use crate::phase::Sign;

/// The generator behind every randomized check.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with independent uniform parts in `[-1, 1)`.
pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_operator<R: Rng>(y: &ModeSet, rng: &mut R) -> Operator {
    Operator::from_fn(y.clone(), |_, _| random_complex(rng))
}

pub fn random_hermitian<R: Rng>(y: &ModeSet, rng: &mut R) -> Operator {
    let a = random_operator(y, rng);
    a.add(&a.dagger()).expect("same modes").scale(C64::new(0.5, 0.0))
}

/// Positive semidefinite, unit trace: `G G† / Tr(G G†)`.
pub fn random_density<R: Rng>(y: &ModeSet, rng: &mut R) -> Operator {
    let g = random_operator(y, rng);
    let p = g.mul(&g.dagger()).expect("same modes");
    let t = p.trace().re;
    p.scale(C64::new(1.0 / t, 0.0))
}

/// Random operator with definite parity.
pub fn random_parity_operator<R: Rng>(y: &ModeSet, sign: Sign, rng: &mut R) -> Operator {
    let (even, odd) = parity_parts(&random_operator(y, rng));
    match sign {
        Sign::Plus => even,
        Sign::Minus => odd,
    }
}

/// Random Hermitian operator with definite parity.
pub fn random_parity_hermitian<R: Rng>(y: &ModeSet, sign: Sign, rng: &mut R) -> Operator {
    let (even, odd) = parity_parts(&random_hermitian(y, rng));
    match sign {
        Sign::Plus => even,
        Sign::Minus => odd,
    }
}

/// Random even density matrix.
pub fn random_even_density<R: Rng>(y: &ModeSet, rng: &mut R) -> Operator {
    parity_parts(&random_density(y, rng)).0
}

/// Random operator supported on the all-even sector of `xi`.
pub fn random_locally_even<R: Rng>(xi: &Partition, rng: &mut R) -> Result<Operator> {
    project_sector(&ParitySector::all_even(xi), &random_operator(xi.modes(), rng))
}

/// Random locally even operands, one per part of `xi`.
pub fn random_even_operands<R: Rng>(xi: &OrderedPartition, rng: &mut R) -> Vec<Operator> {
    xi.parts().iter().map(|p| random_parity_operator(p, Sign::Plus, rng)).collect()
}

/// Random unit vector.
pub fn random_unit_vector<R: Rng>(y: &ModeSet, rng: &mut R) -> StateVector {
    let v = DVector::from_fn(y.dim(), |_, _| random_complex(rng));
    let n = v.norm();
    StateVector::new(y.clone(), v / C64::new(n, 0.0)).expect("length matches")
}

/// Random unit vector supported on the parity-`sign` occupation patterns.
pub fn random_parity_vector<R: Rng>(y: &ModeSet, sign: Sign, rng: &mut R) -> Result<StateVector> {
    let want = match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    let v = DVector::from_fn(y.dim(), |k, _| {
        let z = random_complex(rng);
        if k.count_ones() % 2 == want {
            z
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let n = v.norm();
    if n == 0.0 {
        return Err(crate::error::Error::Sector(format!("no odd vectors on {y}")));
    }
    StateVector::new(y.clone(), v / C64::new(n, 0.0))
}

/// Random ordered partition of `y` into at most `max_parts` parts.
pub fn random_ordered_partition<R: Rng>(y: &ModeSet, max_parts: usize, rng: &mut R) -> Result<OrderedPartition> {
    let n = y.len();
    let k = rng.random_range(1..=max_parts.min(n).max(1));
    let mut labels: Vec<Vec<u32>> = vec![Vec::new(); k];
    // seed each part with one label so none is empty
    let mut pool: Vec<u32> = y.labels().to_vec();
    for i in (1..pool.len()).rev() {
        pool.swap(i, rng.random_range(0..=i));
    }
    for (i, &l) in pool.iter().enumerate() {
        let slot = if i < k { i } else { rng.random_range(0..k) };
        labels[slot].push(l);
    }
    let parts = labels.into_iter().map(ModeSet::new).collect::<Result<Vec<_>>>()?;
    OrderedPartition::of(y, parts)
}

/// Random subset of `y`.
pub fn random_subset<R: Rng>(y: &ModeSet, rng: &mut R) -> ModeSet {
    let labels: Vec<u32> = y.labels().iter().copied().filter(|_| rng.random::<bool>()).collect();
    ModeSet::new(labels).expect("subset of a valid set")
}
