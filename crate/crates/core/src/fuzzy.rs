//! Triangular fuzzy numbers, alpha-cuts and closed-interval arithmetic.
//!
//! A triangular fuzzy number `(a_l, a_m, a_r)` has a piecewise-linear membership
//! function that rises from 0 at `a_l` to 1 at `a_m` and falls back to 0 at
//! `a_r`. Its alpha-cut at level `alpha` is the closed interval
//!
//! ```text
//! [a_l + (a_m - a_l) * alpha,  a_r - (a_r - a_m) * alpha]
//! ```
//!
//! Arithmetic on fuzzy numbers is carried out level by level on these
//! intervals with ordinary endpoint interval arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("invalid interval: lower bound {lo} exceeds upper bound {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid triangular fuzzy number ({a_l}, {a_m}, {a_r}): need a_l <= a_m <= a_r")]
    InvalidTfn { a_l: f64, a_m: f64, a_r: f64 },
    #[error("alpha level {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("division by an interval containing zero: [{lo}, {hi}]")]
    DivisionByZero { lo: f64, hi: f64 },
    #[error("negative tolerance {0}")]
    NegativeTolerance(f64),
    #[error("invalid alpha levels: {0}")]
    InvalidAlphaLevels(String),
}

fn f64_of<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Closed real interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self, FuzzyError> {
        // Written so that NaN endpoints are rejected too.
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(FuzzyError::InvalidInterval {
                lo: f64_of(lo),
                hi: f64_of(hi),
            })
        }
    }

    /// Degenerate interval `[v, v]`.
    pub fn point(v: T) -> Self {
        Self { lo: v, hi: v }
    }

    /// Smallest interval containing both values, in either order.
    pub fn spanning(a: T, b: T) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) / T::lit(2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: T) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `self ⊆ other`, allowing each endpoint to stick out by at most `tol`.
    pub fn is_within(&self, other: &Self, tol: T) -> bool {
        self.lo >= other.lo - tol && self.hi <= other.hi + tol
    }

    /// Interval hull of `self` and `other`.
    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Extends the interval to cover `v`.
    pub fn include(&self, v: T) -> Self {
        Self {
            lo: self.lo.min(v),
            hi: self.hi.max(v),
        }
    }

    /// Fails when `other` contains zero.
    pub fn checked_div(&self, other: &Self) -> Result<Self, FuzzyError> {
        if other.contains(T::zero()) {
            return Err(FuzzyError::DivisionByZero {
                lo: f64_of(other.lo),
                hi: f64_of(other.hi),
            });
        }
        Ok(Self::hull_of4(
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        ))
    }

    /// Multiplication by a real scalar; endpoints swap for negative `l`.
    pub fn scale(&self, l: T) -> Self {
        if l >= T::zero() {
            Self {
                lo: l * self.lo,
                hi: l * self.hi,
            }
        } else {
            Self {
                lo: l * self.hi,
                hi: l * self.lo,
            }
        }
    }

    fn hull_of4(a: T, b: T, c: T, d: T) -> Self {
        Self {
            lo: a.min(b).min(c.min(d)),
            hi: a.max(b).max(c.max(d)),
        }
    }
}

impl<T: Scalar> Add for Interval<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl<T: Scalar> Sub for Interval<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }
}

impl<T: Scalar> Mul for Interval<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::hull_of4(
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        )
    }
}

impl<T: Scalar> Neg for Interval<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Triangular fuzzy number `(a_l, a_m, a_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularFuzzyNumber<T> {
    a_l: T,
    a_m: T,
    a_r: T,
}

impl<T: Scalar> TriangularFuzzyNumber<T> {
    pub fn new(a_l: T, a_m: T, a_r: T) -> Result<Self, FuzzyError> {
        if a_l <= a_m && a_m <= a_r {
            Ok(Self { a_l, a_m, a_r })
        } else {
            Err(FuzzyError::InvalidTfn {
                a_l: f64_of(a_l),
                a_m: f64_of(a_m),
                a_r: f64_of(a_r),
            })
        }
    }

    pub fn crisp(v: T) -> Self {
        Self {
            a_l: v,
            a_m: v,
            a_r: v,
        }
    }

    /// `v ± pct·|v|`, e.g. `(1.2, 0.05)` gives `(1.14, 1.2, 1.26)`.
    pub fn from_tolerance(v: T, pct: T) -> Result<Self, FuzzyError> {
        if !(pct >= T::zero()) {
            return Err(FuzzyError::NegativeTolerance(f64_of(pct)));
        }
        let lower = v * (T::one() - pct);
        let upper = v * (T::one() + pct);
        Ok(Self {
            a_l: lower.min(upper),
            a_m: v,
            a_r: lower.max(upper),
        })
    }

    pub fn left(&self) -> T {
        self.a_l
    }

    pub fn modal(&self) -> T {
        self.a_m
    }

    pub fn right(&self) -> T {
        self.a_r
    }

    pub fn is_crisp(&self) -> bool {
        self.a_l == self.a_r
    }

    /// Degree of membership of `x`, in `[0, 1]`.
    ///
    /// A degenerate leg (`a_l == a_m` or `a_m == a_r`) acts as a step: the
    /// membership is 1 at `a_m` and 0 on the collapsed side.
    pub fn membership(&self, x: T) -> T {
        if x < self.a_l || x > self.a_r {
            return T::zero();
        }
        if x == self.a_m {
            return T::one();
        }
        if x < self.a_m {
            // a_l <= x < a_m, so the left leg has positive length here.
            (x - self.a_l) / (self.a_m - self.a_l)
        } else {
            (self.a_r - x) / (self.a_r - self.a_m)
        }
    }

    /// Interval of values with membership at least `alpha`.
    ///
    /// `alpha = 1` returns exactly `[a_m, a_m]` and `alpha = 0` exactly
    /// `[a_l, a_r]`.
    pub fn alpha_cut(&self, alpha: T) -> Result<Interval<T>, FuzzyError> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(FuzzyError::AlphaOutOfRange(f64_of(alpha)));
        }
        if alpha == T::one() {
            return Ok(Interval::point(self.a_m));
        }
        let lo = self.a_l + (self.a_m - self.a_l) * alpha;
        let hi = self.a_r - (self.a_r - self.a_m) * alpha;
        // Rounding must never push the cut past the modal value.
        Ok(Interval {
            lo: lo.min(self.a_m),
            hi: hi.max(self.a_m),
        })
    }

    pub fn support(&self) -> Interval<T> {
        Interval {
            lo: self.a_l,
            hi: self.a_r,
        }
    }
}

impl<T: Scalar> fmt::Display for TriangularFuzzyNumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a_l, self.a_m, self.a_r)
    }
}

/// Strictly increasing alpha levels in `[0, 1]` that include both 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaLevels<T> {
    levels: Vec<T>,
}

impl<T: Scalar> AlphaLevels<T> {
    pub fn new(levels: Vec<T>) -> Result<Self, FuzzyError> {
        let bad = |msg: &str| Err(FuzzyError::InvalidAlphaLevels(msg.to_string()));
        if levels.len() < 2 {
            return bad("at least two levels (0 and 1) are required");
        }
        if levels.iter().any(|&a| !(a >= T::zero() && a <= T::one())) {
            return bad("every level must lie in [0, 1]");
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return bad("levels must be strictly increasing");
        }
        if levels[0] != T::zero() || levels[levels.len() - 1] != T::one() {
            return bad("levels must start at 0 and end at 1");
        }
        Ok(Self { levels })
    }

    /// `count` equally spaced levels `0, 1/(count-1), ..., 1`.
    pub fn uniform(count: usize) -> Result<Self, FuzzyError> {
        if count < 2 {
            return Err(FuzzyError::InvalidAlphaLevels(format!(
                "{count} level(s) requested; at least 2 are required"
            )));
        }
        let last = count - 1;
        let levels = (0..count)
            .map(|i| {
                if i == last {
                    T::one()
                } else {
                    T::from_count(i) / T::from_count(last)
                }
            })
            .collect();
        Self::new(levels)
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.levels.iter().copied()
    }
}

impl<T: Scalar> Default for AlphaLevels<T> {
    /// `{0, 0.1, ..., 1}`.
    fn default() -> Self {
        Self::uniform(11).expect("11 levels are valid")
    }
}
