//! Extended-real scalar arithmetic.
//!
//! Every numeric routine in the crate is generic over [`Scalar`], which is
//! satisfied by `f32` and `f64`. Infinities carry the usual convex-analysis
//! conventions: `+∞ + (−∞) = +∞`, `0·(+∞) = +∞` and `0·(−∞) = 0`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the duality toolkit.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `a + b` with `+∞ + (−∞) = +∞`.
#[inline]
pub fn ext_add<T: Scalar>(a: T, b: T) -> T {
    if a == T::infinity() || b == T::infinity() {
        T::infinity()
    } else {
        a + b
    }
}

/// `a − b` under the same convention, i.e. `a + (−b)`.
#[inline]
pub fn ext_sub<T: Scalar>(a: T, b: T) -> T {
    ext_add(a, -b)
}

/// `r · a` with `0·(+∞) = +∞` and `0·(−∞) = 0`.
#[inline]
pub fn ext_mul<T: Scalar>(r: T, a: T) -> T {
    if r == T::zero() || a == T::zero() {
        let other = if r == T::zero() { a } else { r };
        if other == T::infinity() {
            T::infinity()
        } else {
            T::zero()
        }
    } else {
        r * a
    }
}

/// Relative closeness test used for exact-form identities.
///
/// Two equal infinities are close; an infinity is never close to a finite
/// value.
#[inline]
pub fn close<T: Scalar>(a: T, b: T, tol: T) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale
}

/// `|a − b|` where equal infinities have distance zero and unequal ones
/// distance `+∞`.
#[inline]
pub fn ext_dist<T: Scalar>(a: T, b: T) -> T {
    if a.is_infinite() || b.is_infinite() {
        if a == b {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        (a - b).abs()
    }
}

/// Euclidean pairing `⟨x, y⟩`.
#[inline]
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        let inf = f64::INFINITY;
        assert_eq!(ext_add(inf, -inf), inf);
        assert_eq!(ext_add(-inf, inf), inf);
        assert_eq!(ext_mul(0.0, inf), inf);
        assert_eq!(ext_mul(0.0, -inf), 0.0);
        assert_eq!(ext_mul(2.0, -inf), -inf);
        assert_eq!(ext_sub(inf, inf), inf);
    }

    #[test]
    fn closeness() {
        assert!(close(1.0, 1.0 + 1e-12, 1e-9));
        assert!(!close(1.0, 1.1, 1e-9));
        assert!(close(f64::INFINITY, f64::INFINITY, 1e-9));
        assert!(!close(f64::INFINITY, 1e300, 1e-9));
        assert_eq!(ext_dist(f64::NEG_INFINITY, f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn generic_over_f32() {
        assert_eq!(ext_add(f32::INFINITY, f32::NEG_INFINITY), f32::INFINITY);
        assert_eq!(dot(&[1.0f32, 2.0], &[3.0, 4.0]), 11.0);
    }
}
