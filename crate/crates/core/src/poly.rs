//! Dense univariate polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Coefficients are stored in ascending powers of the variable `b` and the
//! representation never keeps a zero leading coefficient, so equality is
//! plain vector equality. The zero polynomial is the empty vector; its
//! degree is a distinguished marker rather than an integer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    /// Exact division was requested but the divisor does not divide the
    /// dividend in Z[b]. Downstream identities depend on divisibility, so
    /// callers treat this as a fatal inconsistency rather than a value.
    #[error("polynomial division left a remainder")]
    NotDivisible,
    /// A computation would exceed the configured size guard.
    #[error("computation needs about {needed} coefficient bit-volume but the guard allows {cap}")]
    ResourceExhausted { needed: u128, cap: u128 },
}

/// Degree of a polynomial. The zero polynomial gets `MinusInfinity`, which
/// compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(n) => Some(n),
        }
    }

    /// The finite value; panics on the zero polynomial's degree.
    pub fn unwrap(self) -> usize {
        self.finite().expect("degree of the zero polynomial")
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => write!(f, "-inf"),
            Degree::Finite(n) => write!(f, "{n}"),
        }
    }
}

fn zero_big() -> &'static BigInt {
    static ZERO: OnceLock<BigInt> = OnceLock::new();
    ZERO.get_or_init(BigInt::zero)
}

/// A polynomial in Z[b], stored densely in ascending powers of b.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds a polynomial from ascending coefficients, trimming zero
    /// leading coefficients.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// `c * b^power`.
    pub fn monomial(c: BigInt, power: usize) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); power + 1];
        coeffs[power] = c;
        IntPoly { coeffs }
    }

    /// Convenience constructor from ascending machine-word coefficients.
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::MinusInfinity
        } else {
            Degree::Finite(self.coeffs.len() - 1)
        }
    }

    /// Coefficient of b^i, with zeros beyond the degree.
    pub fn coeff(&self, i: usize) -> &BigInt {
        self.coeffs.get(i).unwrap_or_else(|| zero_big())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Leading coefficient; panics on the zero polynomial.
    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("leading coefficient of the zero polynomial")
    }

    /// Number of zero coefficients below the lowest nonzero one, i.e. the
    /// multiplicity of b as a factor. Zero polynomial: 0 by convention.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let mut out = long.clone();
        for (i, c) in short.iter().enumerate() {
            out[i] += c;
        }
        IntPoly::new(out)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.coeffs.clone();
        if out.len() < other.coeffs.len() {
            out.resize(other.coeffs.len(), BigInt::zero());
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        IntPoly::new(out)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        IntPoly::new(mul_slices(&self.coeffs, &other.coeffs))
    }

    pub fn mul_scalar(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by b^k.
    pub fn shift_up(&self, k: usize) -> IntPoly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    /// `f^k` by binary powering; `pow(f, 0)` is 1 for every f.
    pub fn pow(&self, k: u64) -> IntPoly {
        if k == 0 {
            return IntPoly::one();
        }
        let mut acc: Option<IntPoly> = None;
        let mut sq = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc.unwrap()
    }

    /// Exact division in Z[b]. Returns `NotDivisible` if the divisor does
    /// not divide the dividend (either a fractional quotient coefficient or
    /// a nonzero remainder). Panics if `divisor` is zero.
    pub fn exact_div(&self, divisor: &IntPoly) -> Result<IntPoly, PolyError> {
        assert!(!divisor.is_zero(), "exact_div by the zero polynomial");
        if self.is_zero() {
            return Ok(IntPoly::zero());
        }
        let df = self.coeffs.len() - 1;
        let dg = divisor.coeffs.len() - 1;
        if df < dg {
            return Err(PolyError::NotDivisible);
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); df - dg + 1];
        for k in (0..=df - dg).rev() {
            let cur = std::mem::replace(&mut rem[k + dg], BigInt::zero());
            if cur.is_zero() {
                continue;
            }
            let (t, r) = cur.div_rem(lead);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            for (j, gc) in divisor.coeffs.iter().enumerate().take(dg) {
                rem[k + j] -= &t * gc;
            }
            quot[k] = t;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(PolyError::NotDivisible);
        }
        Ok(IntPoly::new(quot))
    }

    /// Formal derivative with respect to b.
    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Positive gcd of all coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content, keeping signs as they are. The zero
    /// polynomial stays zero.
    pub fn primitive_part(&self) -> (IntPoly, BigInt) {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return (self.clone(), c);
        }
        let prim = IntPoly {
            coeffs: self.coeffs.iter().map(|a| a / &c).collect(),
        };
        (prim, c)
    }

    /// Evaluates at an integer point.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Bit length of the largest coefficient magnitude.
    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Size measure used by the guard: coefficient count times the largest
    /// coefficient bit length.
    pub fn bit_volume(&self) -> u128 {
        self.coeffs.len() as u128 * self.max_coeff_bits().max(1) as u128
    }

    /// Interchange-format dump: degree plus ascending decimal coefficient
    /// strings. The zero polynomial dumps with a null degree.
    pub fn dump(&self) -> PolyDump {
        PolyDump {
            degree: self.degree().finite().map(|n| n as u64),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }
}

const KARATSUBA_CUTOFF: usize = 32;

fn mul_schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn add_assign_shifted(acc: &mut Vec<BigInt>, part: &[BigInt], shift: usize) {
    if acc.len() < part.len() + shift {
        acc.resize(part.len() + shift, BigInt::zero());
    }
    for (i, c) in part.iter().enumerate() {
        acc[i + shift] += c;
    }
}

fn sub_assign_shifted(acc: &mut Vec<BigInt>, part: &[BigInt], shift: usize) {
    if acc.len() < part.len() + shift {
        acc.resize(part.len() + shift, BigInt::zero());
    }
    for (i, c) in part.iter().enumerate() {
        acc[i + shift] -= c;
    }
}

fn add_slices(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (i, c) in short.iter().enumerate() {
        out[i] += c;
    }
    out
}

/// Karatsuba above the cutoff, schoolbook below. Inputs are nonempty.
fn mul_slices(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.len().min(b.len()) <= KARATSUBA_CUTOFF {
        return mul_schoolbook(a, b);
    }
    let split = a.len().max(b.len()) / 2;
    let (a_lo, a_hi) = a.split_at(split.min(a.len()));
    let (b_lo, b_hi) = b.split_at(split.min(b.len()));
    // (a_lo + a_hi X)(b_lo + b_hi X) with X = b^split.
    let z0 = mul_slices(a_lo, b_lo);
    let z2 = if a_hi.is_empty() || b_hi.is_empty() {
        Vec::new()
    } else {
        mul_slices(a_hi, b_hi)
    };
    let a_sum = add_slices(a_lo, a_hi);
    let b_sum = add_slices(b_lo, b_hi);
    let z1 = mul_slices(&a_sum, &b_sum);

    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    add_assign_shifted(&mut out, &z0, 0);
    add_assign_shifted(&mut out, &z1, split);
    sub_assign_shifted(&mut out, &z0, split);
    if !z2.is_empty() {
        sub_assign_shifted(&mut out, &z2, split);
        add_assign_shifted(&mut out, &z2, 2 * split);
    }
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::add(self, rhs)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::sub(self, rhs)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::mul(self, rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::neg(self)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag.is_one() {
                        write!(f, "b")?;
                    } else {
                        write!(f, "{mag}*b")?;
                    }
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// JSON interchange form of a polynomial: `degree` (null for the zero
/// polynomial) and ascending coefficients as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyDump {
    pub degree: Option<u64>,
    pub coeffs: Vec<String>,
}

/// Guard against runaway coefficient growth. The budget is a bit-volume:
/// coefficient count times maximal coefficient bit length. Operations that
/// would clearly overshoot it abort with `ResourceExhausted` instead of
/// thrashing memory.
#[derive(Debug, Clone, Copy)]
pub struct SizeGuard {
    max_bit_volume: u128,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard {
            // Roughly a quarter gigabyte for a single polynomial, far above
            // anything the shipped checks need but low enough to stop an
            // accidental m+3 request before it swaps.
            max_bit_volume: 1 << 31,
        }
    }
}

impl SizeGuard {
    pub fn new(max_bit_volume: u128) -> Self {
        SizeGuard { max_bit_volume }
    }

    pub fn unlimited() -> Self {
        SizeGuard {
            max_bit_volume: u128::MAX,
        }
    }

    pub fn cap(&self) -> u128 {
        self.max_bit_volume
    }

    fn admit(&self, needed: u128) -> Result<(), PolyError> {
        if needed > self.max_bit_volume {
            Err(PolyError::ResourceExhausted {
                needed,
                cap: self.max_bit_volume,
            })
        } else {
            Ok(())
        }
    }

    pub fn check_poly(&self, f: &IntPoly) -> Result<(), PolyError> {
        self.admit(f.bit_volume())
    }

    /// Upper estimate for the product's bit-volume.
    pub fn check_mul(&self, f: &IntPoly, g: &IntPoly) -> Result<(), PolyError> {
        if f.is_zero() || g.is_zero() {
            return Ok(());
        }
        let len = (f.coeffs.len() + g.coeffs.len() - 1) as u128;
        let bits = f.max_coeff_bits() as u128
            + g.max_coeff_bits() as u128
            + u128::from((f.coeffs.len().min(g.coeffs.len()) as u64).next_power_of_two().trailing_zeros())
            + 1;
        self.admit(len * bits)
    }

    pub fn check_pow(&self, f: &IntPoly, k: u64) -> Result<(), PolyError> {
        if f.is_zero() || k == 0 {
            return Ok(());
        }
        let len = (f.coeffs.len() as u128 - 1) * k as u128 + 1;
        let bits = f.max_coeff_bits().max(1) as u128 * k as u128
            + u128::from((f.coeffs.len() as u64).next_power_of_two().trailing_zeros()) * k as u128;
        self.admit(len * bits)
    }
}

/// Guarded multiplication: pre-checks the estimated result size.
pub fn mul_guarded(f: &IntPoly, g: &IntPoly, guard: &SizeGuard) -> Result<IntPoly, PolyError> {
    guard.check_mul(f, g)?;
    Ok(f.mul(g))
}

/// Guarded binary powering with a size check before each interior product.
pub fn pow_guarded(f: &IntPoly, k: u64, guard: &SizeGuard) -> Result<IntPoly, PolyError> {
    guard.check_pow(f, k)?;
    if k == 0 {
        return Ok(IntPoly::one());
    }
    let mut acc: Option<IntPoly> = None;
    let mut sq = f.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => mul_guarded(&a, &sq, guard)?,
            });
        }
        e >>= 1;
        if e > 0 {
            sq = mul_guarded(&sq, &sq, guard)?;
        }
    }
    Ok(acc.unwrap())
}
