use num_bigint::{BigUint, RandBigInt};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modular::{mul_mod_u64, pow_mod_u64};

/// Miller-Rabin rounds for moduli beyond 64 bits.
pub const MILLER_RABIN_ROUNDS: usize = 64;

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic for every u64 (the first twelve prime bases suffice).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &SMALL_PRIMES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Probabilistic primality: exact below 2^64, otherwise 64 Miller-Rabin
/// rounds with bases drawn from a generator seeded by `n` itself.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut seed = [0u8; 32];
    for (i, b) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= b;
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    let two = BigUint::from(2u32);
    'rounds: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n1);
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'rounds;
            }
        }
        return false;
    }
    true
}

pub fn next_prime(n: &BigUint) -> BigUint {
    let mut c = n + 1u32;
    while !is_probable_prime(&c) {
        c += 1u32;
    }
    c
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const SEGMENT: u64 = 1 << 16;

/// Ascending primes in the inclusive range `[lo, hi]` via a segmented sieve.
pub struct PrimeRange {
    base: Vec<u64>,
    next_start: u64,
    hi: u64,
    buffer: std::vec::IntoIter<u64>,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Self {
        let root = Roots::sqrt(&hi) + 2;
        PrimeRange {
            base: simple_sieve(root.min(hi)),
            next_start: lo.max(2),
            hi,
            buffer: Vec::new().into_iter(),
        }
    }

    fn fill(&mut self) -> bool {
        if self.next_start > self.hi {
            return false;
        }
        let start = self.next_start;
        let end = start.saturating_add(SEGMENT - 1).min(self.hi);
        let len = (end - start + 1) as usize;
        let mut composite = vec![false; len];
        for &p in &self.base {
            if p * p > end {
                break;
            }
            let mut m = start.div_ceil(p) * p;
            if m < p * p {
                m = p * p;
            }
            while m <= end {
                composite[(m - start) as usize] = true;
                m += p;
            }
        }
        let found: Vec<u64> = (0..len).filter(|&i| !composite[i]).map(|i| start + i as u64).collect();
        self.buffer = found.into_iter();
        self.next_start = end.saturating_add(1);
        if end == u64::MAX {
            self.hi = 0;
            self.next_start = 1;
        }
        true
    }
}

impl Iterator for PrimeRange {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(p) = self.buffer.next() {
                return Some(p);
            }
            if !self.fill() {
                return None;
            }
        }
    }
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    PrimeRange::new(2, bound).collect()
}

fn pollard_brent(n: &BigUint, seed: u64) -> Option<BigUint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = BigUint::one();
    let c = rng.gen_biguint_below(n);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = rng.gen_biguint_below(n);
    let m = 64u32;
    let (mut g, mut r, mut q) = (one.clone(), 1u64, one.clone());
    let mut x = y.clone();
    let mut ys = y.clone();
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min((r - k) as u32) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = q * diff % n;
            }
            g = q.gcd(n);
            k += m as u64;
        }
        r *= 2;
        if r > 1 << 24 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g > one {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Prime factors of `n` (ascending, without multiplicity).
pub fn prime_factors(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return out;
    }
    for p in simple_sieve(10_000) {
        let bp = BigUint::from(p);
        if (&rest % &bp).is_zero() {
            out.push(bp.clone());
            while (&rest % &bp).is_zero() {
                rest /= &bp;
            }
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            out.push(m);
            continue;
        }
        let mut seed = 1;
        let d = loop {
            if let Some(d) = pollard_brent(&m, seed) {
                break d;
            }
            seed += 1;
        };
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let sieved: Vec<u64> = PrimeRange::new(65_000, 140_000).collect();
        let brute: Vec<u64> = (65_000..=140_000u64)
            .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(sieved, brute);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(PrimeRange::new(2, 3).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(PrimeRange::new(24, 28).count(), 0);
    }

    #[test]
    fn primality_and_factoring() {
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3_215_031_751));
        let m61 = (BigUint::one() << 61) - 1u32;
        let m89 = (BigUint::one() << 89) - 1u32;
        assert!(is_probable_prime(&m89));
        assert!(!is_probable_prime(&(&m89 * &m61)));
        assert_eq!(
            prime_factors(&BigUint::from(36u32)),
            vec![BigUint::from(2u32), BigUint::from(3u32)]
        );
        let semi = BigUint::from(1_000_003u64) * BigUint::from(999_983u64);
        assert_eq!(
            prime_factors(&semi),
            vec![BigUint::from(999_983u64), BigUint::from(1_000_003u64)]
        );
    }
}
