//! Deterministic compensated summation.
//!
//! Every long accumulation in this crate runs through the helpers here so that
//! results are independent of thread count: terms are added in a fixed order
//! with a Neumaier (Kahan–Babuška) accumulator per chunk, and chunk subtotals
//! are combined by a fixed-shape pairwise tree keyed on chunk index.

use num_complex::Complex64;

/// Neumaier compensated accumulator for `f64`.
///
/// Running error is O(eps) + O(n·eps^2) instead of O(n·eps) for naive
/// left-to-right addition.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex terms (independent real/imag parts).
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexCompensated {
    re: Compensated,
    im: Compensated,
}

impl ComplexCompensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = Compensated::new();
    for v in iter {
        acc.add(v);
    }
    acc.value()
}

/// Pairwise reduction with a shape fixed by slice indices (split at the
/// largest power of two below the length), so the result depends only on the
/// values and their order.
pub fn pairwise_complex(vals: &[Complex64]) -> Complex64 {
    match vals.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => vals[0],
        2 => vals[0] + vals[1],
        n => {
            let mid = (n / 2).next_power_of_two().min(n - 1);
            pairwise_complex(&vals[..mid]) + pairwise_complex(&vals[mid..])
        }
    }
}

/// Number of terms per compensated chunk before a pairwise combine.
pub const SUM_CHUNK: usize = 4096;

/// Streaming chunked summation: Neumaier within chunks of [`SUM_CHUNK`]
/// terms, fixed-order pairwise combine across chunk subtotals.
#[derive(Clone, Debug, Default)]
pub struct ChunkedComplexSum {
    chunks: Vec<Complex64>,
    current: ComplexCompensated,
    in_chunk: usize,
}

impl ChunkedComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.current.add(v);
        self.in_chunk += 1;
        if self.in_chunk == SUM_CHUNK {
            self.chunks.push(self.current.value());
            self.current = ComplexCompensated::new();
            self.in_chunk = 0;
        }
    }

    pub fn value(&self) -> Complex64 {
        if self.chunks.is_empty() {
            return self.current.value();
        }
        let mut all = self.chunks.clone();
        if self.in_chunk > 0 {
            all.push(self.current.value());
        }
        pairwise_complex(&all)
    }
}

/// (e^w - 1)/w with the removable singularity at w = 0 filled in; a power
/// series is used for |w| < 1/2 where the direct form loses digits.
pub fn cexpm1_over(w: Complex64) -> Complex64 {
    if w.norm_sqr() < 0.25 {
        // sum_{k>=0} w^k/(k+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for k in 1..30 {
            term = term * w / (k as f64 + 1.0);
            acc += term;
            if term.norm_sqr() < 1e-64 * acc.norm_sqr() {
                break;
            }
        }
        acc
    } else {
        (w.exp() - 1.0) / w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_term() {
        // Naive summation loses the 1.0 entirely.
        let mut acc = Compensated::new();
        for v in [1e16, 1.0, -1e16] {
            acc.add(v);
        }
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn chunked_matches_plain_for_short_streams() {
        let vals: Vec<Complex64> = (0..100)
            .map(|k| Complex64::new(1.0 / (k as f64 + 1.0), (k as f64).sin()))
            .collect();
        let mut chunked = ChunkedComplexSum::new();
        let mut plain = ComplexCompensated::new();
        for &v in &vals {
            chunked.add(v);
            plain.add(v);
        }
        assert_eq!(chunked.value(), plain.value());
    }

    #[test]
    fn pairwise_is_shape_stable() {
        let vals: Vec<Complex64> = (0..10_000)
            .map(|k| Complex64::new((k as f64 * 0.37).cos(), (k as f64 * 0.11).sin()))
            .collect();
        let a = pairwise_complex(&vals);
        let b = pairwise_complex(&vals);
        assert_eq!(a, b);
    }

    #[test]
    fn cexpm1_over_limit_and_branches() {
        assert_eq!(
            cexpm1_over(Complex64::new(0.0, 0.0)),
            Complex64::new(1.0, 0.0)
        );
        // Series vs direct agree where both are accurate.
        for w in [
            Complex64::new(0.49, 0.0),
            Complex64::new(0.3, -0.3),
            Complex64::new(-0.45, 0.1),
        ] {
            let series = cexpm1_over(w);
            let direct = (w.exp() - 1.0) / w;
            assert!((series - direct).norm() < 1e-14);
        }
        // Tiny argument: first-order expansion 1 + w/2.
        let w = Complex64::new(1e-9, -2e-9);
        assert!((cexpm1_over(w) - (Complex64::new(1.0, 0.0) + w / 2.0)).norm() < 1e-17);
        // Large argument uses the direct form.
        let w = Complex64::new(3.0, 1.0);
        assert!((cexpm1_over(w) - (w.exp() - 1.0) / w).norm() == 0.0);
    }

    #[test]
    fn chunk_boundary_is_seamless() {
        // Stream lengths straddling the chunk size agree with a compensated
        // reference to near machine precision.
        for n in [SUM_CHUNK - 1, SUM_CHUNK, SUM_CHUNK + 1, 3 * SUM_CHUNK + 7] {
            let vals: Vec<Complex64> = (0..n)
                .map(|k| Complex64::new(((k * k) as f64).sin() / 3.0, 1.0 / (k as f64 + 2.0)))
                .collect();
            let mut chunked = ChunkedComplexSum::new();
            let mut reference = ComplexCompensated::new();
            for &v in &vals {
                chunked.add(v);
                reference.add(v);
            }
            let d = chunked.value() - reference.value();
            assert!(d.norm() <= 1e-12, "n={n}, delta={d}");
        }
    }
}
