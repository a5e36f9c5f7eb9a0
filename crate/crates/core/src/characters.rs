//! Dirichlet characters mod q with exact root-of-unity arithmetic.
//!
//! The unit group (Z/qZ)^x is represented as a direct product of cyclic
//! factors: the canonical {-1, 5} presentation for the 2-part (trivial for
//! 2^1, one order-2 factor for 2^2, a 2 x 2^{k-2} pair for 2^k, k >= 3) and
//! the smallest primitive root for each odd prime-power part, all lifted to
//! residues mod q by CRT. A full discrete-log table (one mixed-radix code per
//! invertible residue) is built once per group, so character evaluation is a
//! table lookup plus exact angle arithmetic.
//!
//! Character values are stored as exact rotations `num/den` of the unit
//! circle (the value is `e^{2 pi i num/den}`) and materialized to complex
//! floats only on demand. Labels enumerate exponent tuples on the listed
//! generators lexicographically, so label 0 is always the principal
//! character.

use crate::digamma::Parity;
use crate::error::{Error, Result};
use crate::primes::gcd;
use crate::sum::ComplexCompensated;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Largest modulus for which a character table will be constructed.
pub const MAX_MODULUS: u64 = 1 << 22;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Modular inverse by extended Euclid; `a` must be invertible mod `n`.
fn inv_mod(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "not invertible");
    t0.rem_euclid(n as i128) as u64
}

/// x = a mod m, x = b mod n for coprime m, n; result in [0, m n).
fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    let inv = inv_mod(m % n, n);
    let diff = ((b as i128 - (a % n) as i128).rem_euclid(n as i128)) as u64;
    a + m * mulmod(diff, inv, n)
}

/// Smallest primitive root mod p^k for odd prime p.
fn primitive_root(p: u64, k: u32) -> u64 {
    let pk = p.pow(k);
    let phi = pk / p * (p - 1);
    let prime_divs: Vec<u64> = factorize(phi).into_iter().map(|(q, _)| q).collect();
    let mut g = 2u64;
    loop {
        if !g.is_multiple_of(p) && prime_divs.iter().all(|&l| powmod(g, phi / l, pk) != 1) {
            return g;
        }
        g += 1;
    }
}

/// Exact rotation `e^{2 pi i num/den}`, kept reduced with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rotation {
    num: u64,
    den: u64,
}

impl Rotation {
    pub fn new(num: u64, den: u64) -> Rotation {
        debug_assert!(den > 0);
        let num = num % den;
        if num == 0 {
            return Rotation { num: 0, den: 1 };
        }
        let g = gcd(num, den);
        Rotation {
            num: num / g,
            den: den / g,
        }
    }

    pub fn zero() -> Rotation {
        Rotation { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn is_minus_one(&self) -> bool {
        self.num == 1 && self.den == 2
    }

    /// Is the value real (+1 or -1)?
    pub fn is_real(&self) -> bool {
        self.den <= 2
    }

    /// Value raised to the e-th power.
    pub fn pow(self, e: u64) -> Rotation {
        Rotation::new(mulmod(self.num, e % self.den, self.den), self.den)
    }

    pub fn conj(self) -> Rotation {
        if self.num == 0 {
            self
        } else {
            Rotation {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }

    /// Materialize as a complex float. Quarter turns are exact.
    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, 1) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (num, den) => {
                let (s, c) = (TAU * num as f64 / den as f64).sin_cos();
                Complex64::new(c, s)
            }
        }
    }
}

/// Value multiplication (angle addition).
impl std::ops::Mul for Rotation {
    type Output = Rotation;

    fn mul(self, other: Rotation) -> Rotation {
        let den = lcm(self.den, other.den);
        let num =
            (mulmod(self.num, den / self.den, den) + mulmod(other.num, den / other.den, den)) % den;
        Rotation::new(num, den)
    }
}

impl std::fmt::Display for Rotation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug)]
struct CyclicFactor {
    /// Generator lifted to a residue mod q.
    generator: u64,
    order: u64,
    prime: u64,
    /// The p^k component of q this factor came from.
    prime_pow: u64,
}

/// The unit group (Z/qZ)^x with generators and a full discrete-log table.
#[derive(Debug)]
pub struct UnitGroup {
    q: u64,
    phi: u64,
    /// Exponent of the group (lcm of factor orders).
    exponent: u64,
    factors: Vec<CyclicFactor>,
    /// residue -> mixed-radix exponent code, u32::MAX for non-invertible.
    log_code: Vec<u32>,
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<UnitGroup> {
        if q == 0 {
            return Err(Error::InvalidModulus { modulus: q });
        }
        if q > MAX_MODULUS {
            return Err(Error::ModulusTooLarge {
                modulus: q,
                max: MAX_MODULUS,
            });
        }
        let mut factors = Vec::new();
        let parts = factorize(q);
        // 2-part first: {-1, 5} presentation.
        for &(p, k) in &parts {
            if p != 2 {
                continue;
            }
            let pk = 2u64.pow(k);
            if k == 2 {
                factors.push(CyclicFactor {
                    generator: lift(3, pk, q),
                    order: 2,
                    prime: 2,
                    prime_pow: pk,
                });
            } else if k >= 3 {
                factors.push(CyclicFactor {
                    generator: lift(pk - 1, pk, q),
                    order: 2,
                    prime: 2,
                    prime_pow: pk,
                });
                factors.push(CyclicFactor {
                    generator: lift(5, pk, q),
                    order: 2u64.pow(k - 2),
                    prime: 2,
                    prime_pow: pk,
                });
            }
        }
        // Odd parts: smallest primitive root per prime power, ascending p.
        for &(p, k) in &parts {
            if p == 2 {
                continue;
            }
            let pk = p.pow(k);
            factors.push(CyclicFactor {
                generator: lift(primitive_root(p, k), pk, q),
                order: pk / p * (p - 1),
                prime: p,
                prime_pow: pk,
            });
        }

        let phi: u64 = factors.iter().map(|f| f.order).product();
        let exponent = factors.iter().fold(1u64, |l, f| lcm(l, f.order));
        let mut log_code = vec![u32::MAX; q as usize];
        let rank = factors.len();
        let mut digits = vec![0u64; rank];
        let mut residue = 1 % q;
        for code in 0..phi {
            debug_assert_eq!(log_code[residue as usize], u32::MAX);
            log_code[residue as usize] = code as u32;
            if code + 1 == phi {
                break;
            }
            // Odometer step: each changed digit multiplies its generator in
            // (wrapping uses g^order = 1).
            for i in (0..rank).rev() {
                residue = mulmod(residue, factors[i].generator, q);
                digits[i] += 1;
                if digits[i] < factors[i].order {
                    break;
                }
                digits[i] = 0;
            }
        }
        Ok(UnitGroup {
            q,
            phi,
            exponent,
            factors,
            log_code,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn generators(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.generator).collect()
    }

    /// Cyclic decomposition as `(component p^k, lifted generator, order)`.
    pub fn structure(&self) -> Vec<(u64, u64, u64)> {
        self.factors
            .iter()
            .map(|f| (f.prime_pow, f.generator, f.order))
            .collect()
    }

    fn decode(&self, mut code: u64) -> Vec<u64> {
        let mut digits = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            digits[i] = code % self.factors[i].order;
            code /= self.factors[i].order;
        }
        digits
    }

    fn code_of(&self, residue: u64) -> Option<u64> {
        let c = self.log_code[residue as usize];
        if c == u32::MAX {
            None
        } else {
            Some(c as u64)
        }
    }
}

fn lift(g_local: u64, pk: u64, q: u64) -> u64 {
    let other = q / pk;
    if other == 1 {
        g_local % q
    } else {
        crt(g_local, pk, 1, other)
    }
}

/// A Dirichlet character mod q, identified by its exponent tuple on the
/// group generators. Self-contained for evaluation via a shared group.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    label: usize,
    exponents: Vec<u64>,
    parity: Parity,
    conductor: u64,
    order: u64,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.group.q
    }

    pub fn is_principal(&self) -> bool {
        self.label == 0
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exact value at m as a rotation; None when gcd(m, q) > 1.
    pub fn rotation(&self, m: i64) -> Option<Rotation> {
        let q = self.group.q;
        let r = m.rem_euclid(q as i64) as u64;
        let code = self.group.code_of(r)?;
        let digits = self.group.decode(code);
        let l = self.group.exponent;
        let mut num: u128 = 0;
        for (i, fac) in self.group.factors.iter().enumerate() {
            num += self.exponents[i] as u128 * digits[i] as u128 * (l / fac.order) as u128;
        }
        Some(Rotation::new((num % l as u128) as u64, l))
    }

    /// chi(m), with 0 at non-invertible residues.
    pub fn evaluate(&self, m: i64) -> Complex64 {
        match self.rotation(m) {
            Some(rot) => rot.to_complex(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Value rotations at the group generators, `(generator, rotation)`.
    pub fn generator_values(&self) -> Vec<(u64, Rotation)> {
        self.group
            .factors
            .iter()
            .enumerate()
            .map(|(i, fac)| {
                let l = self.group.exponent;
                let num = mulmod(self.exponents[i], l / fac.order, l);
                (fac.generator, Rotation::new(num, l))
            })
            .collect()
    }
}

/// The full dual group mod q: phi(q) characters in label order together with
/// the ordered residue list (index 0 is the residue 1).
#[derive(Clone, Debug)]
pub struct CharacterTable {
    group: Arc<UnitGroup>,
    characters: Vec<DirichletCharacter>,
    residues: Vec<u64>,
    residue_col: Vec<u32>,
}

impl CharacterTable {
    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn phi(&self) -> usize {
        self.characters.len()
    }

    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    pub fn character(&self, label: usize) -> Result<&DirichletCharacter> {
        self.characters.get(label).ok_or(Error::NoSuchLabel {
            modulus: self.group.q,
            label,
            phi: self.group.phi,
        })
    }

    /// Ordered invertible residues; `residues()[0] == 1`.
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// Column index of a value's residue class, None if not invertible.
    pub fn residue_index(&self, value: u64) -> Option<usize> {
        let r = value % self.group.q.max(1);
        let c = self.residue_col[r as usize];
        if c == u32::MAX {
            None
        } else {
            Some(c as usize)
        }
    }

    /// Matrix entry M[j][k] = chi_j(a_k).
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.characters[j].evaluate(self.residues[k] as i64)
    }

    /// One matrix row as complex values.
    pub fn row(&self, j: usize) -> Vec<Complex64> {
        self.residues
            .iter()
            .map(|&a| self.characters[j].evaluate(a as i64))
            .collect()
    }

    /// M . s
    pub fn mat_vec(&self, s: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(s.len(), self.phi());
        (0..self.phi())
            .map(|j| {
                let mut acc = ComplexCompensated::new();
                for (k, &sv) in s.iter().enumerate() {
                    acc.add(self.entry(j, k) * sv);
                }
                acc.value()
            })
            .collect()
    }

    /// (1/phi) M^* . v  — the exact inverse of `mat_vec`.
    pub fn invert(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.phi());
        let scale = 1.0 / self.phi() as f64;
        (0..self.phi())
            .map(|k| {
                let mut acc = ComplexCompensated::new();
                for (j, &vj) in v.iter().enumerate() {
                    acc.add(self.entry(j, k).conj() * vj);
                }
                acc.value() * scale
            })
            .collect()
    }

    /// max |(M M^*)_{j j'} - phi(q) delta_{j j'}| over all entries.
    pub fn orthogonality_defect(&self) -> f64 {
        let phi = self.phi();
        let rows: Vec<Vec<Complex64>> = (0..phi).map(|j| self.row(j)).collect();
        let mut worst = 0.0f64;
        for j in 0..phi {
            for jp in 0..phi {
                let mut acc = ComplexCompensated::new();
                for (a, b) in rows[j].iter().zip(&rows[jp]) {
                    acc.add(a * b.conj());
                }
                let want = if j == jp { phi as f64 } else { 0.0 };
                worst = worst.max((acc.value() - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    /// Characters whose exact value at m equals the given rotation.
    pub fn find_by_rotation(&self, m: i64, rot: Rotation) -> Vec<&DirichletCharacter> {
        self.characters
            .iter()
            .filter(|chi| chi.rotation(m) == Some(rot))
            .collect()
    }
}

fn conductor_of(group: &UnitGroup, exps: &[u64]) -> u64 {
    let mut f = 1u64;
    let mut i = 0;
    while i < group.factors.len() {
        let fac = &group.factors[i];
        if fac.prime == 2 && i + 1 < group.factors.len() && group.factors[i + 1].prime == 2 {
            // 2^k, k >= 3: (eps on <-1>) x (b on <5>)
            let eps = exps[i];
            let b = exps[i + 1];
            let m = group.factors[i + 1].order;
            f *= if b == 0 {
                if eps == 0 {
                    1
                } else {
                    4
                }
            } else {
                let t = valuation(m / gcd(b, m), 2);
                1u64 << (t + 2)
            };
            i += 2;
        } else if fac.prime == 2 {
            // 2^2: single order-2 factor
            f *= if exps[i] == 0 { 1 } else { 4 };
            i += 1;
        } else {
            let b = exps[i];
            if b != 0 {
                let ord = fac.order / gcd(b, fac.order);
                let a = valuation(ord, fac.prime);
                f *= fac.prime.pow(a + 1);
            }
            i += 1;
        }
    }
    f
}

/// Construct the full character table mod q.
pub fn character_group(q: u64) -> Result<CharacterTable> {
    let group = Arc::new(UnitGroup::new(q)?);
    let phi = group.phi;
    let exponent = group.exponent;
    let minus_one_code = if q >= 3 { group.code_of(q - 1) } else { None };

    let mut characters = Vec::with_capacity(phi as usize);
    for label in 0..phi {
        let exps = group.decode(label);
        let conductor = conductor_of(&group, &exps);
        let order = group
            .factors
            .iter()
            .zip(&exps)
            .fold(1u64, |l, (fac, &b)| lcm(l, fac.order / gcd(b, fac.order)));
        let parity = match minus_one_code {
            None => Parity::Even,
            Some(code) => {
                let digits = group.decode(code);
                let mut num: u128 = 0;
                for (i, fac) in group.factors.iter().enumerate() {
                    num += exps[i] as u128 * digits[i] as u128 * (exponent / fac.order) as u128;
                }
                if num.is_multiple_of(exponent as u128) {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            }
        };
        characters.push(DirichletCharacter {
            group: group.clone(),
            label: label as usize,
            exponents: exps,
            parity,
            conductor,
            order,
        });
    }

    let residues: Vec<u64> = (1..=q).filter(|&r| gcd(r % q, q) == 1).collect();
    debug_assert_eq!(residues.len(), phi as usize);
    debug_assert_eq!(residues.first().copied(), Some(1));
    let mut residue_col = vec![u32::MAX; q as usize];
    for (k, &r) in residues.iter().enumerate() {
        residue_col[(r % q) as usize] = k as u32;
    }

    Ok(CharacterTable {
        group,
        characters,
        residues,
        residue_col,
    })
}

/// How a character is induced: its primitive parent plus the primes where
/// child and parent moduli differ, with the exponent of p in each.
#[derive(Clone, Debug)]
pub struct ExtraPrime {
    pub p: u64,
    /// exponent of p in the child modulus
    pub child_exp: u32,
    /// exponent of p in the conductor (0 when p does not divide it)
    pub parent_exp: u32,
}

#[derive(Clone, Debug)]
pub struct InductionRecord {
    pub child: DirichletCharacter,
    pub parent: DirichletCharacter,
    pub extra_primes: Vec<ExtraPrime>,
}

/// Locate the primitive parent of `chi` and record the extra primes.
pub fn conductor_and_parent(chi: &DirichletCharacter) -> Result<InductionRecord> {
    let q = chi.modulus();
    let f = chi.conductor();
    let parent = if f == q {
        chi.clone()
    } else {
        let table = character_group(f)?;
        let gens = chi.group.generators();
        let found = table
            .characters()
            .iter()
            .find(|psi| {
                psi.is_primitive()
                    && gens
                        .iter()
                        .all(|&g| psi.rotation(g as i64) == chi.rotation(g as i64))
            })
            .cloned();
        found.expect("every character has a unique primitive parent")
    };
    let mut extra_primes = Vec::new();
    for (p, k) in factorize(q) {
        let l = valuation(f, p);
        if l == 0 || k > l {
            extra_primes.push(ExtraPrime {
                p,
                child_exp: k,
                parent_exp: l,
            });
        }
    }
    Ok(InductionRecord {
        child: chi.clone(),
        parent,
        extra_primes,
    })
}

/// The character mod q1*q2 whose values are chi1(m) chi2(m); moduli must be
/// coprime.
pub fn product_character(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
) -> Result<DirichletCharacter> {
    let (q1, q2) = (chi1.modulus(), chi2.modulus());
    if gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime { a: q1, b: q2 });
    }
    let table = character_group(q1 * q2)?;
    let gens = table.group.generators();
    let found = table
        .characters()
        .iter()
        .find(|chi| {
            gens.iter().all(|&g| {
                let want = chi1.rotation(g as i64).expect("generator coprime to q1")
                    * chi2.rotation(g as i64).expect("generator coprime to q2");
                chi.rotation(g as i64) == Some(want)
            })
        })
        .cloned();
    Ok(found.expect("the dual group is complete"))
}
