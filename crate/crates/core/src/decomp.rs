//! The character-table linear system over residue classes.
//!
//! Prime powers coprime to q are bucketed into residue-class sums S_a; the
//! character table M turns those into per-character rows M·S whose real
//! parts carry the zero spikes of the corresponding L-functions, and the
//! adjoint turns the rows back into single-class indicators.  Rows for
//! non-primitive characters are off from their primitive parent by missing
//! Euler factors at the extra primes; `Compensation` carries the elementary
//! geometric-series and constant corrections that realign them.

use crate::characters::{
    character_group, conductor_and_parent, product_character, CharacterTable, DirichletCharacter,
    Rotation,
};
use crate::digamma::{smooth_density, Parity, SmoothParity, SmoothTermSpec};
use crate::error::{Error, Result};
use crate::indicator::{cis, exponential_noise, EpsilonMode, Grid, OscillatorBank};
use crate::primes::{prime_powers, Cutoff, ResidueFilter};
use crate::sum::ChunkedComplexSum;
use num_complex::Complex64;

/// Geometric-tail constant 1/(1 - 2^{-1/2}) in the truncation bound: every
/// ratio in the dropped tails has magnitude at most 2^{-1/2}.
pub const GEOM_TAIL_C: f64 = 3.414_213_562_373_095;

/// Residue-class sums S_a(y) = sum over p^n <= limit, p^n = a mod q of
/// (log p) p^{-n(1/2+eps)} e^{-iyn log p}, one entry per invertible class in
/// `table.residues()` order.  A trivial character twist gives the plain
/// class sums; a twist by chi mod q1 (coprime to q) gives the mixed-system
/// entries chi(p^n) (log p) p^{-n(1/2+eps)} e^{-iyn log p}.
pub fn twisted_class_sums(
    cutoff: &Cutoff,
    eps: f64,
    table: &CharacterTable,
    twist: Option<&DirichletCharacter>,
    y: f64,
) -> Result<Vec<Complex64>> {
    let mut buckets = vec![ChunkedComplexSum::new(); table.phi()];
    for term in prime_powers(cutoff, &ResidueFilter::none())? {
        let Some(k) = table.residue_index(term.value) else {
            continue;
        };
        let amp =
            cutoff.boundary_scale(term.value) * term.weight * (-(0.5 + eps) * term.freq).exp();
        let phase = cis(-y * term.freq);
        match twist {
            None => buckets[k].add(amp * phase),
            Some(chi) => match chi.rotation(term.value as i64) {
                Some(rot) => buckets[k].add(rot.to_complex() * amp * phase),
                None => continue,
            },
        }
    }
    Ok(buckets.into_iter().map(|b| b.value()).collect())
}

/// Plain residue-class sums mod `table.modulus()`.
pub fn class_sums(
    cutoff: &Cutoff,
    eps: f64,
    table: &CharacterTable,
    y: f64,
) -> Result<Vec<Complex64>> {
    twisted_class_sums(cutoff, eps, table, None, y)
}

/// One scan-ready oscillator bank per residue class, in `residues()` order.
pub(crate) fn class_banks(
    cutoff: &Cutoff,
    eps: f64,
    table: &CharacterTable,
) -> Result<Vec<OscillatorBank>> {
    table
        .residues()
        .iter()
        .map(|&a| {
            let filter = ResidueFilter::new(table.modulus(), &[a])?;
            Ok(OscillatorBank::build(cutoff, eps, &filter, None))
        })
        .collect()
}

/// The full character prime sum sum_{p^n <= limit} chi(p^n) (log p)
/// p^{-n(1/2+eps)} e^{-iyn log p}, evaluated directly from the stream.
pub fn character_prime_sum(
    cutoff: &Cutoff,
    eps: f64,
    chi: &DirichletCharacter,
    y: f64,
) -> Complex64 {
    OscillatorBank::build(cutoff, eps, &ResidueFilter::none(), Some(chi)).eval(y)
}

/// A missing Euler factor at one extra prime: the parent character value at
/// p together with how much of the geometric series the cutoff admits.
#[derive(Clone, Copy, Debug)]
pub struct PoissonTerm {
    pub p: u64,
    /// (log p)/2, the weight on the Poisson kernel (1+u)/(1-u).
    pub weight: f64,
    /// chi_parent(p), exact.
    pub parent_value: Rotation,
    /// Largest n with p^n <= limit (0 when p exceeds the limit).
    pub max_n: u32,
    /// Boundary weight of the top power (1/2 when p^max_n lands on a halved
    /// cutoff, 1 otherwise).
    pub top_scale: f64,
}

impl PoissonTerm {
    /// u = chi_parent(p) p^{-1/2-eps-iy}, the common ratio.
    fn ratio(&self, eps: f64, y: f64) -> Complex64 {
        let lp = (self.p as f64).ln();
        self.parent_value.to_complex() * (-(0.5 + eps) * lp).exp() * cis(-y * lp)
    }
}

/// Elementary corrections aligning a non-primitive character row with its
/// primitive parent: per-prime Poisson kernels (or their truncated
/// geometric series) plus a nonnegative constant.
#[derive(Clone, Debug)]
pub struct Compensation {
    modulus: u64,
    conductor: u64,
    limit: u64,
    poisson_terms: Vec<PoissonTerm>,
    /// Asymptotic-form constant: sum of ((k-1)/2) log p over extra primes
    /// with p not dividing the conductor plus ((k-l)/2) log p over the rest.
    constant_asym: f64,
    /// Exact-form constant (1/2) log(q/f).
    constant_exact: f64,
}

/// Build the compensation record for `chi` at the given cutoff.  Primitive
/// characters (and the character mod 1) get an empty record whose value is
/// identically zero.
pub fn compensation_for(chi: &DirichletCharacter, cutoff: &Cutoff) -> Result<Compensation> {
    let record = conductor_and_parent(chi)?;
    let q = chi.modulus();
    let f = chi.conductor();
    let limit = cutoff.limit();
    let mut poisson_terms = Vec::new();
    let mut constant_asym = 0.0;
    for extra in &record.extra_primes {
        let lp = (extra.p as f64).ln();
        if extra.parent_exp == 0 {
            constant_asym += (extra.child_exp - 1) as f64 / 2.0 * lp;
            let parent_value = record
                .parent
                .rotation(extra.p as i64)
                .expect("extra prime is coprime to the conductor");
            let mut max_n = 0u32;
            let mut top = 1u64;
            let mut pw = extra.p as u128;
            while pw <= limit as u128 {
                max_n += 1;
                top = pw as u64;
                pw *= extra.p as u128;
            }
            let top_scale = if max_n > 0 {
                cutoff.boundary_scale(top)
            } else {
                1.0
            };
            poisson_terms.push(PoissonTerm {
                p: extra.p,
                weight: lp / 2.0,
                parent_value,
                max_n,
                top_scale,
            });
        } else {
            constant_asym += (extra.child_exp - extra.parent_exp) as f64 / 2.0 * lp;
        }
    }
    let constant_exact = 0.5 * ((q as f64).ln() - (f as f64).ln());
    debug_assert!(constant_asym >= 0.0 && constant_exact >= -1e-15);
    Ok(Compensation {
        modulus: q,
        conductor: f,
        limit,
        poisson_terms,
        constant_asym,
        constant_exact,
    })
}

impl Compensation {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn poisson_terms(&self) -> &[PoissonTerm] {
        &self.poisson_terms
    }

    /// The additive constant of the requested form.
    pub fn constant(&self, exact: bool) -> f64 {
        if exact {
            self.constant_exact
        } else {
            self.constant_asym
        }
    }

    /// The truncated geometric series the cutoff actually admits:
    /// sum_p log p * sum_{1<=n<=max_n} u^n, top term boundary-weighted.
    /// This is exactly the child-minus-parent prime-sum defect (negated).
    pub fn series(&self, eps: f64, y: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.poisson_terms {
            let u = term.ratio(eps, y);
            let lp = 2.0 * term.weight;
            let mut upow = u;
            for n in 1..=term.max_n {
                let scale = if n == term.max_n { term.top_scale } else { 1.0 };
                acc += upow * (scale * lp);
                upow *= u;
            }
        }
        acc
    }

    /// Complex compensation value: exact form uses the truncated series and
    /// (1/2) log(q/f); asymptotic form uses the full Poisson kernels
    /// (log p/2)(1+u)/(1-u) and the asymptotic constant.  Real parts agree
    /// up to the truncation bound.
    pub fn complex_value(&self, eps: f64, y: f64, exact: bool) -> Complex64 {
        if exact {
            self.series(eps, y) + self.constant_exact
        } else {
            let mut acc = Complex64::new(self.constant_asym, 0.0);
            for term in &self.poisson_terms {
                let u = term.ratio(eps, y);
                let one = Complex64::new(1.0, 0.0);
                acc += (one + u) / (one - u) * term.weight;
            }
            acc
        }
    }

    /// Real compensation added to a row indicator.
    pub fn value(&self, eps: f64, y: f64, exact: bool) -> f64 {
        self.complex_value(eps, y, exact).re
    }

    /// Bound on |asymptotic - exact|: the dropped geometric tails total at
    /// most GEOM_TAIL_C * log q / limit^{1/2+eps}.  Zero when there are no
    /// Euler factors to truncate.
    pub fn truncation_bound(&self, eps: f64) -> f64 {
        if self.poisson_terms.is_empty() {
            return 0.0;
        }
        GEOM_TAIL_C * (self.modulus as f64).ln() * (self.limit as f64).powf(-(0.5 + eps))
    }
}

/// One assembled row of the linear system: the real parts of the character
/// sum and of everything subtracted from or added to it.
#[derive(Clone, Debug)]
pub struct SystemRow {
    /// Label of the row's character (in its own modulus' table).
    pub label: usize,
    pub parity: Parity,
    pub conductor: u64,
    pub primitive: bool,
    /// Re of the row of M . S.
    pub row_re: f64,
    /// Re of the exponential noise N; nonzero only on the principal row.
    pub noise_re: f64,
    /// Smooth density at the row's parity and modulus.
    pub smooth: f64,
    /// Compensation value applied (zero for primitive rows).
    pub compensation: f64,
    /// row_re - noise_re - smooth + compensation.
    pub indicator: f64,
}

/// The decomposed system at one ordinate: class sums, row sums, and the
/// fully corrected per-character indicators.
#[derive(Clone, Debug)]
pub struct DecompositionSystem {
    pub modulus: u64,
    pub y: f64,
    pub epsilon: f64,
    pub predicted_depth: f64,
    pub class_sums: Vec<Complex64>,
    pub row_sums: Vec<Complex64>,
    pub rows: Vec<SystemRow>,
}

fn build_rows(
    cutoff: &Cutoff,
    eps: f64,
    row_chars: &[DirichletCharacter],
    row_sums: &[Complex64],
    y: f64,
    exact: bool,
) -> Result<Vec<SystemRow>> {
    let noise = exponential_noise(cutoff, eps, y);
    let mut rows = Vec::with_capacity(row_chars.len());
    for (chi, &t) in row_chars.iter().zip(row_sums) {
        let comp = compensation_for(chi, cutoff)?;
        let spec = SmoothTermSpec::new(SmoothParity::from_parity(chi.parity()), chi.modulus())?;
        let smooth = smooth_density(y, &spec);
        let noise_re = if chi.is_principal() { noise.re } else { 0.0 };
        let compensation = comp.value(eps, y, exact);
        rows.push(SystemRow {
            label: chi.label(),
            parity: chi.parity(),
            conductor: chi.conductor(),
            primitive: chi.is_primitive(),
            row_re: t.re,
            noise_re,
            smooth,
            compensation,
            indicator: t.re - noise_re - smooth + compensation,
        });
    }
    Ok(rows)
}

/// Assemble the mod-q system at ordinate y: class sums, M . S, and per
/// character the indicator Re(M.S)_j - delta_j0 Re N - G_{parity} + comp_j.
/// q = 1 and q = 2 degenerate to a single principal row.
pub fn assemble_system(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    q: u64,
    y: f64,
    exact: bool,
) -> Result<DecompositionSystem> {
    mode.validate()?;
    let table = character_group(q)?;
    let eps = mode.epsilon(cutoff);
    let s = class_sums(cutoff, eps, &table, y)?;
    let t = table.mat_vec(&s);
    let rows = build_rows(cutoff, eps, table.characters(), &t, y, exact)?;
    Ok(DecompositionSystem {
        modulus: q,
        y,
        epsilon: eps,
        predicted_depth: mode.predicted_depth(cutoff),
        class_sums: s,
        row_sums: t,
        rows,
    })
}

/// The mixed-modulus subsystem: class sums mod q2 twisted by a primitive
/// chi mod q1, decomposed by the mod-q2 table into rows for the product
/// characters chi * psi_j mod q1 q2.  No row carries noise unless its
/// product character is principal (which requires q1 = 1, where this
/// degenerates to `assemble_system(q2)`).
pub fn mixed_subsystem(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    chi: &DirichletCharacter,
    q2: u64,
    y: f64,
    exact: bool,
) -> Result<DecompositionSystem> {
    mode.validate()?;
    if !chi.is_primitive() {
        return Err(Error::NonPrimitive {
            modulus: chi.modulus(),
            label: chi.label(),
            conductor: chi.conductor(),
        });
    }
    let table2 = character_group(q2)?;
    let q1 = chi.modulus();
    if crate::primes::gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime { a: q1, b: q2 });
    }
    let eps = mode.epsilon(cutoff);
    let twist = if q1 == 1 { None } else { Some(chi) };
    let s = twisted_class_sums(cutoff, eps, &table2, twist, y)?;
    let t = table2.mat_vec(&s);
    let row_chars: Vec<DirichletCharacter> = table2
        .characters()
        .iter()
        .map(|psi| product_character(chi, psi))
        .collect::<Result<_>>()?;
    let rows = build_rows(cutoff, eps, &row_chars, &t, y, exact)?;
    Ok(DecompositionSystem {
        modulus: q1 * q2,
        y,
        epsilon: eps,
        predicted_depth: mode.predicted_depth(cutoff),
        class_sums: s,
        row_sums: t,
        rows,
    })
}

/// A single residue-class indicator sample, the inversion of the system at
/// one class: every subtracted piece is reported separately.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ClassSample {
    pub y: f64,
    /// class_sum_re - noise_share - smooth_even - smooth_odd + compensation.
    pub total: f64,
    pub class_sum_re: f64,
    /// Re N / phi(q): the class' share of the principal row's noise.
    pub noise_share: f64,
    /// Averaged even-parity smooth density reaching this class.
    pub smooth_even: f64,
    pub smooth_odd: f64,
    /// Averaged compensation (1/phi) sum_j Re[conj chi_j(a) comp_j(y)].
    pub compensation: f64,
    /// Expected dip at a zero of any constituent L-function: depth/phi(q).
    pub predicted_depth: f64,
}

/// Everything about the inversion that does not depend on the ordinate.
struct ClassInverter {
    table: CharacterTable,
    col: usize,
    eps: f64,
    exact: bool,
    depth: f64,
    conj_at_class: Vec<Complex64>,
    even_weight: f64,
    odd_weight: f64,
    even_spec: SmoothTermSpec,
    odd_spec: SmoothTermSpec,
    comps: Vec<Compensation>,
}

impl ClassInverter {
    fn new(
        cutoff: &Cutoff,
        mode: EpsilonMode,
        q: u64,
        class: u64,
        exact: bool,
    ) -> Result<ClassInverter> {
        mode.validate()?;
        let table = character_group(q)?;
        let col = table
            .residue_index(class)
            .ok_or(Error::InvalidClass { class, modulus: q })?;
        let a = table.residues()[col] as i64;
        let conj_at_class: Vec<Complex64> = table
            .characters()
            .iter()
            .map(|chi| chi.evaluate(a).conj())
            .collect();
        let phi = table.phi() as f64;
        let mut even_sum = Complex64::new(0.0, 0.0);
        let mut odd_sum = Complex64::new(0.0, 0.0);
        for (chi, &c) in table.characters().iter().zip(&conj_at_class) {
            match chi.parity() {
                Parity::Even => even_sum += c,
                Parity::Odd => odd_sum += c,
            }
        }
        // Full-parity character sums over a fixed class are real.
        debug_assert!(even_sum.im.abs() < 1e-12 && odd_sum.im.abs() < 1e-12);
        let comps = table
            .characters()
            .iter()
            .map(|chi| compensation_for(chi, cutoff))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassInverter {
            col,
            eps: mode.epsilon(cutoff),
            exact,
            depth: mode.predicted_depth(cutoff) / phi,
            conj_at_class,
            even_weight: even_sum.re / phi,
            odd_weight: odd_sum.re / phi,
            even_spec: SmoothTermSpec::new(SmoothParity::Even, q)?,
            odd_spec: SmoothTermSpec::new(SmoothParity::Odd, q)?,
            comps,
            table,
        })
    }

    fn sample(&self, y: f64, s: &[Complex64], noise: Complex64) -> ClassSample {
        let phi = self.table.phi() as f64;
        let class_sum_re = s[self.col].re;
        let noise_share = noise.re / phi;
        let smooth_even = self.even_weight * smooth_density(y, &self.even_spec);
        let smooth_odd = self.odd_weight * smooth_density(y, &self.odd_spec);
        let mut comp = 0.0;
        for (c, comp_j) in self.conj_at_class.iter().zip(&self.comps) {
            comp += (c * comp_j.complex_value(self.eps, y, self.exact)).re;
        }
        let compensation = comp / phi;
        ClassSample {
            y,
            total: class_sum_re - noise_share - smooth_even - smooth_odd + compensation,
            class_sum_re,
            noise_share,
            smooth_even,
            smooth_odd,
            compensation,
            predicted_depth: self.depth,
        }
    }
}

/// Invert the system to one residue class at one ordinate.
pub fn invert_to_class(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    q: u64,
    class: u64,
    y: f64,
    exact: bool,
) -> Result<ClassSample> {
    let inv = ClassInverter::new(cutoff, mode, q, class, exact)?;
    let s = class_sums(cutoff, inv.eps, &inv.table, y)?;
    let noise = exponential_noise(cutoff, inv.eps, y);
    Ok(inv.sample(y, &s, noise))
}

/// Residue-class indicator over a grid; the per-class sums are scanned with
/// the blockwise phase recurrence, everything else is closed-form per point.
pub fn class_scan(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    q: u64,
    class: u64,
    grid: &Grid,
    exact: bool,
) -> Result<Vec<ClassSample>> {
    let inv = ClassInverter::new(cutoff, mode, q, class, exact)?;
    let banks = class_banks(cutoff, inv.eps, &inv.table)?;
    let scans: Vec<Vec<Complex64>> = banks.iter().map(|b| b.scan(grid)).collect();
    let mut out = Vec::with_capacity(grid.len());
    let mut s = vec![Complex64::new(0.0, 0.0); banks.len()];
    for (i, y) in grid.points().enumerate() {
        for (k, scan) in scans.iter().enumerate() {
            s[k] = scan[i];
        }
        let noise = exponential_noise(cutoff, inv.eps, y);
        out.push(inv.sample(y, &s, noise));
    }
    Ok(out)
}

/// The quadratic split at one ordinate: prime powers bucketed by the sign
/// of a primitive quadratic character, and the 2x2 reconstruction of the
/// zeta row (compensated principal) and the character row.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct QsplitSample {
    pub y: f64,
    /// Re of the sum over prime powers with chi(p^n) = +1.
    pub plus_re: f64,
    /// Re of the sum over prime powers with chi(p^n) = -1.
    pub minus_re: f64,
    /// Re(S+ + S-) - Re N - G_e + principal compensation.
    pub zeta_row: f64,
    /// Re(S+ - S-) - G_{parity(chi)}.
    pub chi_row: f64,
    pub predicted_depth: f64,
}

struct QsplitParts {
    modulus: u64,
    eps: f64,
    exact: bool,
    depth: f64,
    plus_classes: Vec<u64>,
    minus_classes: Vec<u64>,
    principal_comp: Compensation,
    even_spec: SmoothTermSpec,
    chi_spec: SmoothTermSpec,
}

impl QsplitParts {
    fn new(
        cutoff: &Cutoff,
        mode: EpsilonMode,
        chi: &DirichletCharacter,
        exact: bool,
    ) -> Result<QsplitParts> {
        mode.validate()?;
        if chi.order() != 2 {
            return Err(Error::NotQuadratic {
                modulus: chi.modulus(),
                label: chi.label(),
                order: chi.order(),
            });
        }
        if !chi.is_primitive() {
            return Err(Error::NonPrimitive {
                modulus: chi.modulus(),
                label: chi.label(),
                conductor: chi.conductor(),
            });
        }
        let q = chi.modulus();
        let table = character_group(q)?;
        let mut plus_classes = Vec::new();
        let mut minus_classes = Vec::new();
        for &a in table.residues() {
            let rot = chi.rotation(a as i64).expect("residue is invertible");
            if rot.is_one() {
                plus_classes.push(a);
            } else {
                debug_assert!(rot.is_minus_one());
                minus_classes.push(a);
            }
        }
        let principal_comp = compensation_for(table.character(0)?, cutoff)?;
        Ok(QsplitParts {
            modulus: q,
            eps: mode.epsilon(cutoff),
            exact,
            depth: mode.predicted_depth(cutoff),
            plus_classes,
            minus_classes,
            principal_comp,
            even_spec: SmoothTermSpec::new(SmoothParity::Even, q)?,
            chi_spec: SmoothTermSpec::new(SmoothParity::from_parity(chi.parity()), q)?,
        })
    }

    fn sample(&self, cutoff: &Cutoff, y: f64, plus: Complex64, minus: Complex64) -> QsplitSample {
        let noise = exponential_noise(cutoff, self.eps, y);
        let comp = self.principal_comp.value(self.eps, y, self.exact);
        QsplitSample {
            y,
            plus_re: plus.re,
            minus_re: minus.re,
            zeta_row: (plus + minus).re - noise.re - smooth_density(y, &self.even_spec) + comp,
            chi_row: (plus - minus).re - smooth_density(y, &self.chi_spec),
            predicted_depth: self.depth,
        }
    }
}

/// Split prime powers by the sign of a primitive quadratic character and
/// reconstruct the two indicators at one ordinate.
pub fn quadratic_split(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    chi: &DirichletCharacter,
    y: f64,
    exact: bool,
) -> Result<QsplitSample> {
    let parts = QsplitParts::new(cutoff, mode, chi, exact)?;
    let mut plus = ChunkedComplexSum::new();
    let mut minus = ChunkedComplexSum::new();
    for term in prime_powers(cutoff, &ResidueFilter::none())? {
        let Some(rot) = chi.rotation(term.value as i64) else {
            continue;
        };
        let amp = cutoff.boundary_scale(term.value)
            * term.weight
            * (-(0.5 + parts.eps) * term.freq).exp();
        let v = amp * cis(-y * term.freq);
        if rot.is_one() {
            plus.add(v);
        } else {
            minus.add(v);
        }
    }
    Ok(parts.sample(cutoff, y, plus.value(), minus.value()))
}

/// Quadratic split over a grid.
pub fn quadratic_split_scan(
    cutoff: &Cutoff,
    mode: EpsilonMode,
    chi: &DirichletCharacter,
    grid: &Grid,
    exact: bool,
) -> Result<Vec<QsplitSample>> {
    let parts = QsplitParts::new(cutoff, mode, chi, exact)?;
    let plus_bank = OscillatorBank::build(
        cutoff,
        parts.eps,
        &ResidueFilter::new(parts.modulus, &parts.plus_classes)?,
        None,
    );
    let minus_bank = OscillatorBank::build(
        cutoff,
        parts.eps,
        &ResidueFilter::new(parts.modulus, &parts.minus_classes)?,
        None,
    );
    let plus = plus_bank.scan(grid);
    let minus = minus_bank.scan(grid);
    Ok(grid
        .points()
        .enumerate()
        .map(|(i, y)| parts.sample(cutoff, y, plus[i], minus[i]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::{dirichlet_indicator, main_term, zeta_indicator};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cutoff(limit: u64) -> Cutoff {
        Cutoff::new(limit).unwrap()
    }

    #[test]
    fn hand_class_sums_mod_four_limit_ten() {
        // Coprime prime powers up to 10 are {3, 5, 7, 9}; 9 carries weight
        // log 3 and value 1/sqrt(9).
        let table = character_group(4).unwrap();
        let s = class_sums(&cutoff(10), 0.0, &table, 0.0).unwrap();
        let expect_1 = 5f64.ln() / 5f64.sqrt() + 3f64.ln() / 3.0;
        let expect_3 = 3f64.ln() / 3f64.sqrt() + 7f64.ln() / 7f64.sqrt();
        let k1 = table.residue_index(1).unwrap();
        let k3 = table.residue_index(3).unwrap();
        assert_abs_diff_eq!(s[k1].re, expect_1, epsilon = 1e-14);
        assert_abs_diff_eq!(s[k3].re, expect_3, epsilon = 1e-14);
        assert!(s[k1].im.abs() < 1e-15 && s[k3].im.abs() < 1e-15);
    }

    #[test]
    fn class_sums_total_the_coprime_stream() {
        let table = character_group(12).unwrap();
        let cut = cutoff(10_000);
        let y = 1.3;
        let s = class_sums(&cut, 0.0, &table, y).unwrap();
        let total: Complex64 = s.iter().sum();
        let coprime: Vec<u64> = table.residues().to_vec();
        let filter = ResidueFilter::new(12, &coprime).unwrap();
        let direct = OscillatorBank::build(&cut, 0.0, &filter, None).eval(y);
        assert_abs_diff_eq!(total.re, direct.re, epsilon = 1e-12);
        assert_abs_diff_eq!(total.im, direct.im, epsilon = 1e-12);
    }

    #[test]
    fn q_one_is_the_full_prime_sum() {
        let table = character_group(1).unwrap();
        let cut = cutoff(5_000);
        let s = class_sums(&cut, 0.1, &table, 2.4).unwrap();
        assert_eq!(s.len(), 1);
        let direct = OscillatorBank::build(&cut, 0.1, &ResidueFilter::none(), None).eval(2.4);
        assert_abs_diff_eq!(s[0].re, direct.re, epsilon = 1e-12);
        assert_abs_diff_eq!(s[0].im, direct.im, epsilon = 1e-12);
    }

    #[test]
    fn rows_match_direct_character_sums_mod_five() {
        let table = character_group(5).unwrap();
        let cut = cutoff(10_000);
        let y = 2.7;
        let s = class_sums(&cut, 0.0, &table, y).unwrap();
        let t = table.mat_vec(&s);
        for (j, chi) in table.characters().iter().enumerate() {
            let direct = character_prime_sum(&cut, 0.0, chi, y);
            assert!(
                (t[j] - direct).norm() < 1e-9,
                "row {j}: {} vs {}",
                t[j],
                direct
            );
        }
    }

    #[test]
    fn round_trip_inversion_is_tight() {
        for q in [7u64, 11, 12, 24, 36, 60] {
            let table = character_group(q).unwrap();
            let cut = cutoff(2_000);
            let s = class_sums(&cut, 0.05, &table, 5.11).unwrap();
            let t = table.mat_vec(&s);
            let back = table.invert(&t);
            for (a, b) in s.iter().zip(&back) {
                assert!((a - b).norm() < 1e-10, "q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn principal_mod_four_compensation_structure() {
        let table = character_group(4).unwrap();
        let comp = compensation_for(table.character(0).unwrap(), &cutoff(1_000)).unwrap();
        assert_eq!(comp.poisson_terms().len(), 1);
        let term = comp.poisson_terms()[0];
        assert_eq!(term.p, 2);
        assert_abs_diff_eq!(term.weight, 2f64.ln() / 2.0, epsilon = 1e-15);
        assert!(term.parent_value.is_one());
        assert_eq!(term.max_n, 9); // 2^9 = 512 <= 1000 < 1024
        assert_abs_diff_eq!(comp.constant(false), 2f64.ln() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(comp.constant(true), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn mod_eight_from_mod_four_is_constant_only() {
        // Characters mod 8 with conductor 4: extra prime 2 with l = 2 < k = 3.
        let table = character_group(8).unwrap();
        let chi = table
            .characters()
            .iter()
            .find(|c| c.conductor() == 4)
            .expect("mod 8 induces a conductor-4 character");
        let comp = compensation_for(chi, &cutoff(1_000)).unwrap();
        assert!(comp.poisson_terms().is_empty());
        assert_abs_diff_eq!(comp.constant(false), 2f64.ln() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(comp.constant(true), 2f64.ln() / 2.0, epsilon = 1e-15);
        assert_eq!(comp.truncation_bound(0.0), 0.0);
    }

    #[test]
    fn primitive_compensation_is_zero() {
        let table = character_group(5).unwrap();
        for chi in table.characters().iter().skip(1) {
            let comp = compensation_for(chi, &cutoff(100)).unwrap();
            assert!(comp.poisson_terms().is_empty());
            assert_eq!(comp.constant(true), 0.0);
            assert_eq!(comp.constant(false), 0.0);
            assert_eq!(comp.value(0.3, 1.0, true), 0.0);
            assert_eq!(comp.value(0.3, 1.0, false), 0.0);
        }
    }

    #[test]
    fn child_minus_parent_is_the_negated_series() {
        // The defining identity of the exact compensation, on a spread of
        // non-primitive characters.
        let cut = cutoff(1_000);
        for q in [4u64, 8, 9, 12, 15, 16, 45] {
            let table = character_group(q).unwrap();
            for chi in table.characters() {
                if chi.is_primitive() {
                    continue;
                }
                let record = conductor_and_parent(chi).unwrap();
                let comp = compensation_for(chi, &cut).unwrap();
                for &(eps, y) in &[(0.0, 0.0), (0.2, 1.1), (0.0, 7.3)] {
                    let child = character_prime_sum(&cut, eps, chi, y);
                    let parent = character_prime_sum(&cut, eps, &record.parent, y);
                    let defect = child - parent + comp.series(eps, y);
                    assert!(
                        defect.norm() < 1e-12,
                        "q={q} label={} eps={eps} y={y}: defect {defect}",
                        chi.label()
                    );
                }
            }
        }
    }

    #[test]
    fn asymptotic_value_is_within_the_truncation_bound() {
        let cut = cutoff(1_000);
        let table = character_group(4).unwrap();
        let comp = compensation_for(table.character(0).unwrap(), &cut).unwrap();
        for &(eps, y) in &[(0.0, 0.0), (0.0, 3.7), (0.15, 12.0)] {
            let exact = comp.value(eps, y, true);
            let asym = comp.value(eps, y, false);
            let bound = comp.truncation_bound(eps);
            assert!(
                (exact - asym).abs() <= bound,
                "eps={eps} y={y}: |{exact} - {asym}| > {bound}"
            );
        }
    }

    #[test]
    fn principal_row_matches_the_zeta_path() {
        // Row identity at q = 4: restoring the truncated 2-power series
        // recovers the full zeta prime sum, and the assembled indicator
        // differs from the zeta indicator total exactly by the main-term /
        // noise bookkeeping.
        let cut = cutoff(10_000);
        let y = 3.0;
        let sys = assemble_system(&cut, EpsilonMode::Zero, 4, y, true).unwrap();
        let row = &sys.rows[0];
        let table = character_group(4).unwrap();
        let comp = compensation_for(table.character(0).unwrap(), &cut).unwrap();
        let zeta = zeta_indicator(y, &cut, EpsilonMode::Zero).unwrap();
        assert_abs_diff_eq!(
            row.row_re + comp.series(0.0, y).re,
            zeta.prime_sum_re,
            epsilon = 1e-12
        );
        let main = main_term(&cut, 0.0, y).unwrap();
        let noise = exponential_noise(&cut, 0.0, y);
        assert_abs_diff_eq!(
            row.indicator,
            zeta.total + main.re - noise.re,
            epsilon = 1e-12
        );
    }

    #[test]
    fn primitive_row_matches_the_dirichlet_path() {
        let cut = cutoff(10_000);
        let y = 6.0;
        let sys = assemble_system(&cut, EpsilonMode::Zero, 4, y, true).unwrap();
        let row = &sys.rows[1];
        assert!(row.primitive);
        let table = character_group(4).unwrap();
        let chi = table.character(1).unwrap();
        let sample = dirichlet_indicator(y, &cut, EpsilonMode::Zero, chi).unwrap();
        assert_abs_diff_eq!(row.row_re, sample.prime_sum_re, epsilon = 1e-9);
        assert_eq!(row.compensation, 0.0);
        assert_abs_diff_eq!(row.indicator, sample.total, epsilon = 1e-9);
    }

    #[test]
    fn rows_are_real_at_the_origin_for_real_characters() {
        let cut = cutoff(2_000);
        let sys = assemble_system(&cut, EpsilonMode::Zero, 12, 0.0, true).unwrap();
        for t in &sys.row_sums {
            assert!(t.im.abs() < 1e-12, "imaginary leak {t}");
        }
    }

    #[test]
    fn parity_dispatch_is_structural() {
        let cut = cutoff(500);
        let y = 4.2;
        for q in 1..=60u64 {
            let sys = assemble_system(&cut, EpsilonMode::Zero, q, y, true).unwrap();
            let even = smooth_density(y, &SmoothTermSpec::new(SmoothParity::Even, q).unwrap());
            let odd = smooth_density(y, &SmoothTermSpec::new(SmoothParity::Odd, q).unwrap());
            for row in &sys.rows {
                let want = match row.parity {
                    Parity::Even => even,
                    Parity::Odd => odd,
                };
                assert_eq!(row.smooth, want, "q={q} label={}", row.label);
            }
        }
    }

    #[test]
    fn poisson_kernel_bound_and_period_mean() {
        for &p in &[2u64, 3, 5] {
            let lp = (p as f64).ln();
            for &eps in &[0.0, 0.07, 0.5] {
                let r = (p as f64).powf(-(0.5 + eps));
                // Bound check across scattered ordinates.
                for k in 0..200 {
                    let y = -30.0 + 0.31 * k as f64;
                    let w = r * cis(-y * lp);
                    let one = Complex64::new(1.0, 0.0);
                    let kernel = ((one + w) / (one - w)).re;
                    assert!(kernel.abs() <= (1.0 + r) / (1.0 - r) + 1e-12);
                }
                // Mean value over one full period is the value at w = 0.
                let period = 2.0 * std::f64::consts::PI / lp;
                let n = 4096;
                let h = period / n as f64;
                let mut acc = 0.0;
                for i in 0..n {
                    let w = r * cis(-(i as f64 + 0.5) * h * lp);
                    let one = Complex64::new(1.0, 0.0);
                    acc += ((one + w) / (one - w)).re;
                }
                let mean = acc / n as f64;
                assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn class_totals_sum_to_the_principal_row() {
        // Summing the inverted indicator over all classes collapses the
        // character average to the principal row, exactly.
        let cut = cutoff(3_000);
        let q = 12u64;
        let y = 9.4;
        let sys = assemble_system(&cut, EpsilonMode::Zero, q, y, true).unwrap();
        let table = character_group(q).unwrap();
        let mut total = 0.0;
        for &a in table.residues() {
            total += invert_to_class(&cut, EpsilonMode::Zero, q, a, y, true)
                .unwrap()
                .total;
        }
        assert_abs_diff_eq!(total, sys.rows[0].indicator, epsilon = 1e-10);
    }

    #[test]
    fn invert_components_by_hand_at_q_four() {
        let cut = cutoff(10);
        let sample = invert_to_class(&cut, EpsilonMode::Zero, 4, 1, 0.0, true).unwrap();
        let x = cut.x();
        assert_abs_diff_eq!(
            sample.class_sum_re,
            5f64.ln() / 5f64.sqrt() + 3f64.ln() / 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            sample.noise_share,
            4.0 * (x / 2.0).sinh() / 2.0,
            epsilon = 1e-12
        );
        // Both characters hit class 1 with weight +1, so each parity gets
        // half the corresponding density.
        let even = smooth_density(0.0, &SmoothTermSpec::new(SmoothParity::Even, 4).unwrap());
        let odd = smooth_density(0.0, &SmoothTermSpec::new(SmoothParity::Odd, 4).unwrap());
        assert_abs_diff_eq!(sample.smooth_even, even / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sample.smooth_odd, odd / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sample.predicted_depth, x / 2.0, epsilon = 1e-15);
        let table = character_group(4).unwrap();
        let comp = compensation_for(table.character(0).unwrap(), &cut).unwrap();
        assert_abs_diff_eq!(
            sample.compensation,
            comp.value(0.0, 0.0, true) / 2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn invalid_class_is_rejected() {
        let cut = cutoff(100);
        match invert_to_class(&cut, EpsilonMode::Zero, 4, 2, 0.0, true) {
            Err(Error::InvalidClass {
                class: 2,
                modulus: 4,
            }) => {}
            other => panic!("expected InvalidClass, got {other:?}"),
        }
    }

    #[test]
    fn class_scan_matches_pointwise_inversion() {
        let cut = cutoff(2_000);
        let grid = Grid::from_bounds(3.0, 4.0, 0.25).unwrap();
        let scan = class_scan(&cut, EpsilonMode::Paper, 4, 3, &grid, true).unwrap();
        assert_eq!(scan.len(), 5);
        for (i, y) in grid.points().enumerate() {
            let point = invert_to_class(&cut, EpsilonMode::Paper, 4, 3, y, true).unwrap();
            assert_abs_diff_eq!(scan[i].total, point.total, epsilon = 1e-10);
            assert_abs_diff_eq!(scan[i].class_sum_re, point.class_sum_re, epsilon = 1e-10);
        }
    }

    #[test]
    fn quadratic_split_hand_values_limit_ten() {
        let table = character_group(4).unwrap();
        let chi = table.character(1).unwrap();
        let s = quadratic_split(&cutoff(10), EpsilonMode::Zero, chi, 0.0, true).unwrap();
        assert_abs_diff_eq!(
            s.plus_re,
            5f64.ln() / 5f64.sqrt() + 3f64.ln() / 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            s.minus_re,
            3f64.ln() / 3f64.sqrt() + 7f64.ln() / 7f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn quadratic_split_matches_the_system_paths() {
        let cut = cutoff(10_000);
        let table = character_group(5).unwrap();
        let chi = table
            .characters()
            .iter()
            .find(|c| c.order() == 2)
            .expect("mod 5 has a quadratic character");
        let y = 4.9;
        let s = quadratic_split(&cut, EpsilonMode::Zero, chi, y, true).unwrap();
        let sys = assemble_system(&cut, EpsilonMode::Zero, 5, y, true).unwrap();
        // S+ + S- totals the coprime stream = principal row; S+ - S- is the
        // character row.
        assert_abs_diff_eq!(s.zeta_row, sys.rows[0].indicator, epsilon = 1e-9);
        assert_abs_diff_eq!(s.chi_row, sys.rows[chi.label()].indicator, epsilon = 1e-9);
        let direct = dirichlet_indicator(y, &cut, EpsilonMode::Zero, chi).unwrap();
        assert_abs_diff_eq!(s.chi_row, direct.total, epsilon = 1e-9);
    }

    #[test]
    fn quadratic_split_scan_matches_pointwise() {
        let cut = cutoff(2_000);
        let table = character_group(4).unwrap();
        let chi = table.character(1).unwrap();
        let grid = Grid::from_bounds(0.0, 2.0, 0.5).unwrap();
        let scan = quadratic_split_scan(&cut, EpsilonMode::Zero, chi, &grid, false).unwrap();
        for (i, y) in grid.points().enumerate() {
            let point = quadratic_split(&cut, EpsilonMode::Zero, chi, y, false).unwrap();
            assert_abs_diff_eq!(scan[i].zeta_row, point.zeta_row, epsilon = 1e-10);
            assert_abs_diff_eq!(scan[i].chi_row, point.chi_row, epsilon = 1e-10);
        }
    }

    #[test]
    fn quadratic_split_rejects_bad_characters() {
        let cut = cutoff(100);
        let m5 = character_group(5).unwrap();
        match quadratic_split(&cut, EpsilonMode::Zero, m5.character(0).unwrap(), 0.0, true) {
            Err(Error::NotQuadratic { order: 1, .. }) => {}
            other => panic!("principal should be rejected, got {other:?}"),
        }
        match quadratic_split(&cut, EpsilonMode::Zero, m5.character(1).unwrap(), 0.0, true) {
            Err(Error::NotQuadratic { order: 4, .. }) => {}
            other => panic!("quartic should be rejected, got {other:?}"),
        }
        let m8 = character_group(8).unwrap();
        let induced = m8
            .characters()
            .iter()
            .find(|c| c.order() == 2 && !c.is_primitive())
            .unwrap();
        match quadratic_split(&cut, EpsilonMode::Zero, induced, 0.0, true) {
            Err(Error::NonPrimitive { .. }) => {}
            other => panic!("induced quadratic should be rejected, got {other:?}"),
        }
    }

    #[test]
    fn mixed_with_trivial_twist_degenerates_to_the_plain_system() {
        let cut = cutoff(2_000);
        let one = character_group(1).unwrap();
        let chi = one.character(0).unwrap();
        let y = 3.3;
        let mixed = mixed_subsystem(&cut, EpsilonMode::Zero, chi, 5, y, true).unwrap();
        let plain = assemble_system(&cut, EpsilonMode::Zero, 5, y, true).unwrap();
        assert_eq!(mixed.modulus, 5);
        for (a, b) in mixed.class_sums.iter().zip(&plain.class_sums) {
            assert_eq!(a, b);
        }
        for (ra, rb) in mixed.rows.iter().zip(&plain.rows) {
            assert_eq!(ra.indicator, rb.indicator);
            assert_eq!(ra.noise_re, rb.noise_re);
        }
    }

    #[test]
    fn mixed_rows_match_the_mod_twelve_characters() {
        let cut = cutoff(10_000);
        let m4 = character_group(4).unwrap();
        let chi = m4.character(1).unwrap();
        let y = 5.6;
        let mixed = mixed_subsystem(&cut, EpsilonMode::Zero, chi, 3, y, true).unwrap();
        assert_eq!(mixed.modulus, 12);
        let m12 = character_group(12).unwrap();
        for row in &mixed.rows {
            let product = m12.character(row.label).unwrap();
            // Two-path row sum.
            let direct = character_prime_sum(&cut, 0.0, product, y);
            assert_abs_diff_eq!(row.row_re, direct.re, epsilon = 1e-9);
            // No noise anywhere: chi is primitive mod 4, so no product is
            // principal.
            assert_eq!(row.noise_re, 0.0);
            // The primitive product matches the direct indicator path.
            if row.primitive {
                let sample = dirichlet_indicator(y, &cut, EpsilonMode::Zero, product).unwrap();
                assert_abs_diff_eq!(row.indicator, sample.total, epsilon = 1e-9);
            } else {
                // The conductor-4 product must be compensated toward chi
                // itself: parent sum equals child sum plus the series.
                let comp = compensation_for(product, &cut).unwrap();
                let parent = character_prime_sum(&cut, 0.0, chi, y);
                assert_abs_diff_eq!(
                    row.row_re + comp.series(0.0, y).re,
                    parent.re,
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn mixed_rejects_bad_arguments() {
        let cut = cutoff(100);
        let m4 = character_group(4).unwrap();
        match mixed_subsystem(
            &cut,
            EpsilonMode::Zero,
            m4.character(1).unwrap(),
            6,
            0.0,
            true,
        ) {
            Err(Error::NotCoprime { a: 4, b: 6 }) => {}
            other => panic!("expected NotCoprime, got {other:?}"),
        }
        match mixed_subsystem(
            &cut,
            EpsilonMode::Zero,
            m4.character(0).unwrap(),
            3,
            0.0,
            true,
        ) {
            Err(Error::NonPrimitive { modulus: 4, .. }) => {}
            other => panic!("expected NonPrimitive, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_child_minus_parent_identity(
            q in 3u64..40,
            eps in 0f64..0.8,
            y in -20f64..20.0,
            label_seed in 0usize..1000,
        ) {
            let cut = Cutoff::new(500).unwrap();
            let table = character_group(q).unwrap();
            let non_primitive: Vec<_> =
                table.characters().iter().filter(|c| !c.is_primitive()).collect();
            prop_assume!(!non_primitive.is_empty());
            let chi = non_primitive[label_seed % non_primitive.len()];
            let record = conductor_and_parent(chi).unwrap();
            let comp = compensation_for(chi, &cut).unwrap();
            let child = character_prime_sum(&cut, eps, chi, y);
            let parent = character_prime_sum(&cut, eps, &record.parent, y);
            let defect = child - parent + comp.series(eps, y);
            prop_assert!(defect.norm() < 1e-10);
        }
    }
}
