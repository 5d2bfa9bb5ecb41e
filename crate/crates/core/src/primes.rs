//! Small prime utilities used by the metric (prime powers for `theta` and
//! `norm`) and by the primorial sequence of the halting set.

/// Sieve of Eratosthenes, all primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = usize::try_from(limit).expect("sieve limit exceeds address space");
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// The first `count` primes, in increasing order.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// The `n`-th prime, 1-based (`nth_prime(1) == 2`).
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1, "primes are indexed from 1");
    first_primes(n)[n - 1]
}

/// Iterator over prime powers `2, 3, 4, 5, 7, 8, 9, 11, ...` in increasing
/// order. `q` is a prime power exactly when `lcm(1..q) != lcm(1..q-1)`.
pub(crate) struct PrimePowers {
    next: u64,
}

impl PrimePowers {
    pub(crate) fn new() -> Self {
        PrimePowers { next: 2 }
    }
}

impl Iterator for PrimePowers {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let q = self.next;
            self.next += 1;
            if is_prime_power(q) {
                return Some(q);
            }
        }
    }
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 1;
    }
    true
}
