//! Prime and prime-power enumeration.
//!
//! Everything downstream consumes the weighted prime-power stream
//! `{ (p, n, p^n, log p, n log p) : p^n <= limit }` in ascending order of
//! `p^n`. Primes come from a segmented sieve of Eratosthenes (memory bounded
//! by the segment, not the limit); higher powers `n >= 2` are generated by
//! direct powering over primes `p <= sqrt(limit)` and merged in.

use crate::error::{Error, Result};
use crate::sum::Compensated;

/// Sieve segment length in integers.
pub const SEGMENT_LEN: u64 = 1 << 20;

/// Integer cutoff for prime-power sums.
///
/// `x` is the natural log of the integer limit; all spike-depth and epsilon
/// formulas are phrased in terms of `x`. When `halve_boundary` is set, a term
/// whose value equals the limit exactly enters weighted sums with half
/// weight (the classical convention at a jump of the summatory function);
/// the default counts it in full.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    limit: u64,
    x: f64,
    halve_boundary: bool,
}

impl Cutoff {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidCutoff { limit, min: 2 });
        }
        Ok(Self {
            limit,
            x: (limit as f64).ln(),
            halve_boundary: false,
        })
    }

    pub fn with_halved_boundary(mut self) -> Self {
        self.halve_boundary = true;
        self
    }

    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// log of the integer limit.
    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn halve_boundary(&self) -> bool {
        self.halve_boundary
    }

    /// Weight multiplier for a term of the given value (1 or 1/2).
    #[inline]
    pub fn boundary_scale(&self, value: u64) -> f64 {
        if self.halve_boundary && value == self.limit {
            0.5
        } else {
            1.0
        }
    }
}

/// One weighted prime-power term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimePowerTerm {
    pub p: u64,
    pub n: u32,
    /// p^n
    pub value: u64,
    /// log p
    pub weight: f64,
    /// n log p (oscillation frequency of the term)
    pub freq: f64,
}

impl PrimePowerTerm {
    fn new(p: u64, n: u32, value: u64) -> Self {
        let weight = (p as f64).ln();
        Self {
            p,
            n,
            value,
            weight,
            freq: n as f64 * weight,
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Restriction of the stream to residue classes mod `modulus`.
///
/// An empty class list means "no filtering". Classes must be invertible
/// residues; terms `p^n` with `gcd(p^n, modulus) > 1` never match a class.
#[derive(Clone, Debug)]
pub struct ResidueFilter {
    modulus: u64,
    classes: Vec<u64>,
    mask: Vec<bool>,
}

impl ResidueFilter {
    /// No filtering.
    pub fn none() -> Self {
        Self {
            modulus: 1,
            classes: Vec::new(),
            mask: Vec::new(),
        }
    }

    pub fn new(modulus: u64, classes: &[u64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus { modulus });
        }
        let mut cl: Vec<u64> = Vec::with_capacity(classes.len());
        for &c in classes {
            let r = c % modulus;
            if gcd(r, modulus) != 1 {
                return Err(Error::InvalidClass { class: c, modulus });
            }
            cl.push(r);
        }
        cl.sort_unstable();
        cl.dedup();
        let mut mask = vec![false; modulus as usize];
        for &r in &cl {
            mask[r as usize] = true;
        }
        Ok(Self {
            modulus,
            classes: cl,
            mask,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn classes(&self) -> &[u64] {
        &self.classes
    }

    #[inline]
    pub fn accepts(&self, value: u64) -> bool {
        if self.classes.is_empty() {
            return true;
        }
        self.mask[(value % self.modulus) as usize]
    }
}

fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|rr| rr > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|rr| rr <= n) {
        r += 1;
    }
    r
}

/// Plain sieve used for base primes up to sqrt(limit).
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
        if p * p > n {
            break;
        }
    }
    // finish collecting above sqrt
    let start = out.last().map_or(2, |&q| q as usize + 1);
    for (p, &comp) in composite.iter().enumerate().skip(start) {
        if !comp {
            out.push(p as u64);
        }
    }
    out
}

/// Segmented prime iterator, ascending, memory O(sqrt(limit) + segment).
pub struct SegmentedPrimes {
    limit: u64,
    base: Vec<u64>,
    seg_start: u64,
    buf: Vec<u64>,
    pos: usize,
}

impl SegmentedPrimes {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidCutoff { limit, min: 2 });
        }
        Ok(Self {
            limit,
            base: small_primes(isqrt(limit)),
            seg_start: 2,
            buf: Vec::new(),
            pos: 0,
        })
    }

    fn fill_segment(&mut self) {
        self.buf.clear();
        self.pos = 0;
        while self.buf.is_empty() && self.seg_start <= self.limit {
            let lo = self.seg_start;
            let hi = (lo + SEGMENT_LEN - 1).min(self.limit);
            let len = (hi - lo + 1) as usize;
            let mut composite = vec![false; len];
            for &p in &self.base {
                if p * p > hi {
                    break;
                }
                let mut m = p * p;
                if m < lo {
                    m = lo.div_ceil(p) * p;
                }
                while m <= hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            for (i, &comp) in composite.iter().enumerate() {
                let v = lo + i as u64;
                if v >= 2 && !comp {
                    self.buf.push(v);
                }
            }
            self.seg_start = hi + 1;
        }
    }
}

impl Iterator for SegmentedPrimes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buf.len() {
            self.fill_segment();
            if self.buf.is_empty() {
                return None;
            }
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        Some(v)
    }
}

/// All primes up to `limit` inclusive.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    Ok(SegmentedPrimes::new(limit)?.collect())
}

/// Ascending merged stream of primes and higher prime powers up to the
/// cutoff, optionally restricted to residue classes.
pub struct PrimePowers {
    primes: SegmentedPrimes,
    next_prime: Option<u64>,
    higher: std::vec::IntoIter<PrimePowerTerm>,
    next_higher: Option<PrimePowerTerm>,
    filter: ResidueFilter,
}

impl PrimePowers {
    fn new(cutoff: &Cutoff, filter: ResidueFilter) -> Result<Self> {
        let limit = cutoff.limit();
        let mut higher: Vec<PrimePowerTerm> = Vec::new();
        for p in small_primes(isqrt(limit)) {
            let mut v = p * p;
            let mut n = 2u32;
            loop {
                higher.push(PrimePowerTerm::new(p, n, v));
                if v > limit / p {
                    break;
                }
                v *= p;
                n += 1;
            }
        }
        higher.sort_unstable_by_key(|t| t.value);
        let mut primes = SegmentedPrimes::new(limit)?;
        let next_prime = primes.next();
        let mut higher = higher.into_iter();
        let next_higher = higher.next();
        Ok(Self {
            primes,
            next_prime,
            higher,
            next_higher,
            filter,
        })
    }
}

impl Iterator for PrimePowers {
    type Item = PrimePowerTerm;

    fn next(&mut self) -> Option<PrimePowerTerm> {
        loop {
            let take_prime = match (self.next_prime, &self.next_higher) {
                (Some(p), Some(h)) => p < h.value,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => return None,
            };
            let term = if take_prime {
                let p = self.next_prime.take().unwrap();
                self.next_prime = self.primes.next();
                PrimePowerTerm::new(p, 1, p)
            } else {
                let h = self.next_higher.take().unwrap();
                self.next_higher = self.higher.next();
                h
            };
            if self.filter.accepts(term.value) {
                return Some(term);
            }
        }
    }
}

/// Enumerate `{ p^n <= cutoff }` ascending, each exactly once, restricted to
/// the filter's residue classes (no restriction if the filter is empty).
pub fn prime_powers(cutoff: &Cutoff, filter: &ResidueFilter) -> Result<PrimePowers> {
    PrimePowers::new(cutoff, filter.clone())
}

/// Chebyshev psi: sum of `log p` over prime powers up to the cutoff,
/// honoring the cutoff's boundary convention.
pub fn chebyshev_psi(cutoff: &Cutoff) -> Result<f64> {
    let mut acc = Compensated::new();
    for t in prime_powers(cutoff, &ResidueFilter::none())? {
        acc.add(t.weight * cutoff.boundary_scale(t.value));
    }
    Ok(acc.value())
}

/// Von Mangoldt lambda: `log p` if `m = p^k`, else 0.
pub fn von_mangoldt(m: u64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let mut p = m;
    for d in 2..=isqrt(m) {
        if m.is_multiple_of(d) {
            p = d;
            break;
        }
    }
    let mut v = m;
    while v.is_multiple_of(p) {
        v /= p;
    }
    if v == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Trial-division oracle, independent of the sieve path.
    fn naive_primes(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    /// Direct lambda-by-factoring oracle for psi.
    fn naive_psi(limit: u64) -> f64 {
        (1..=limit).map(von_mangoldt).sum()
    }

    #[test]
    fn first_primes() {
        assert_eq!(
            sieve_primes(30).unwrap(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
    }

    #[test]
    fn limit_below_two_is_rejected() {
        assert!(matches!(
            sieve_primes(1),
            Err(Error::InvalidCutoff { limit: 1, .. })
        ));
        assert!(Cutoff::new(0).is_err());
    }

    #[test]
    fn segmented_equals_naive_exhaustively() {
        // One list comparison at 10^5 pins every prefix count at once.
        let limit = 100_000;
        assert_eq!(sieve_primes(limit).unwrap(), naive_primes(limit));
    }

    #[test]
    fn prime_counts_at_decades() {
        assert_eq!(sieve_primes(1_000).unwrap().len(), 168);
        assert_eq!(sieve_primes(10_000).unwrap().len(), 1_229);
        assert_eq!(sieve_primes(1_000_000).unwrap().len(), 78_498);
    }

    #[test]
    fn prime_powers_limit_ten() {
        let cutoff = Cutoff::new(10).unwrap();
        let got: Vec<(u64, u32, u64)> = prime_powers(&cutoff, &ResidueFilter::none())
            .unwrap()
            .map(|t| (t.p, t.n, t.value))
            .collect();
        assert_eq!(
            got,
            vec![
                (2, 1, 2),
                (3, 1, 3),
                (2, 2, 4),
                (5, 1, 5),
                (7, 1, 7),
                (2, 3, 8),
                (3, 2, 9),
            ]
        );
    }

    #[test]
    fn term_fields_are_consistent() {
        let cutoff = Cutoff::new(5000).unwrap();
        for t in prime_powers(&cutoff, &ResidueFilter::none()).unwrap() {
            assert!(t.weight > 0.0);
            assert_eq!(t.freq, t.n as f64 * t.weight);
            assert_eq!(t.value, (t.p as u128).pow(t.n) as u64);
            // freq tracks log(value) to rounding error
            assert!((t.freq - (t.value as f64).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn stream_is_ascending_and_duplicate_free() {
        let cutoff = Cutoff::new(20_000).unwrap();
        let vals: Vec<u64> = prime_powers(&cutoff, &ResidueFilter::none())
            .unwrap()
            .map(|t| t.value)
            .collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert!(*vals.last().unwrap() <= 20_000);
    }

    #[test]
    fn enumeration_is_prefix_monotone() {
        let a: Vec<_> = prime_powers(&Cutoff::new(3_000).unwrap(), &ResidueFilter::none())
            .unwrap()
            .collect();
        let b: Vec<_> = prime_powers(&Cutoff::new(10_000).unwrap(), &ResidueFilter::none())
            .unwrap()
            .collect();
        assert_eq!(&b[..a.len()], &a[..]);
    }

    #[test]
    fn residue_filter_mod_four() {
        let cutoff = Cutoff::new(50).unwrap();
        let filter = ResidueFilter::new(4, &[1]).unwrap();
        let vals: Vec<u64> = prime_powers(&cutoff, &filter)
            .unwrap()
            .map(|t| t.value)
            .collect();
        // enumerated by hand: prime powers = 1 mod 4 up to 50
        assert_eq!(vals, vec![5, 9, 13, 17, 25, 29, 37, 41, 49]);
    }

    #[test]
    fn filter_rejects_non_invertible_class() {
        assert!(matches!(
            ResidueFilter::new(4, &[2]),
            Err(Error::InvalidClass {
                class: 2,
                modulus: 4
            })
        ));
    }

    #[test]
    fn psi_limit_ten_matches_hand_value() {
        // 3 log 2 + 2 log 3 + log 5 + log 7
        let expect = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        let got = chebyshev_psi(&Cutoff::new(10).unwrap()).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn psi_matches_naive_oracle() {
        for limit in [100, 1234, 10_000] {
            let got = chebyshev_psi(&Cutoff::new(limit).unwrap()).unwrap();
            let expect = naive_psi(limit);
            assert!((got - expect).abs() < 1e-9, "limit={limit}");
        }
    }

    #[test]
    fn boundary_halving_at_exact_power() {
        let full = chebyshev_psi(&Cutoff::new(8).unwrap()).unwrap();
        let halved = chebyshev_psi(&Cutoff::new(8).unwrap().with_halved_boundary()).unwrap();
        assert!((full - halved - 0.5 * 2f64.ln()).abs() < 1e-14);
        // no boundary term: toggle is a no-op
        let full9 = chebyshev_psi(&Cutoff::new(10).unwrap()).unwrap();
        let halved9 = chebyshev_psi(&Cutoff::new(10).unwrap().with_halved_boundary()).unwrap();
        assert_eq!(full9, halved9);
    }

    #[test]
    fn von_mangoldt_small_values() {
        assert_eq!(von_mangoldt(1), 0.0);
        assert_eq!(von_mangoldt(2), 2f64.ln());
        assert_eq!(von_mangoldt(12), 0.0);
        assert_eq!(von_mangoldt(243), 3f64.ln());
        assert_eq!(von_mangoldt(1024), 2f64.ln());
    }

    proptest! {
        #[test]
        fn filtered_stream_is_postfiltered_stream(
            limit in 2u64..10_000,
            q in 1u64..50,
        ) {
            let cutoff = Cutoff::new(limit).unwrap();
            let classes: Vec<u64> = (1..q).filter(|&c| gcd(c, q) == 1).collect();
            let classes = if q == 1 { vec![0] } else { classes };
            let filter = ResidueFilter::new(q, &classes).unwrap();
            let filtered: Vec<u64> = prime_powers(&cutoff, &filter)
                .unwrap()
                .map(|t| t.value)
                .collect();
            let post: Vec<u64> = prime_powers(&cutoff, &ResidueFilter::none())
                .unwrap()
                .map(|t| t.value)
                .filter(|v| gcd(v % q, q) == 1)
                .collect();
            prop_assert_eq!(filtered, post);
        }
    }
}
