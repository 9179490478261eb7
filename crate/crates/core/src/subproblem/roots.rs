//! Scalar root finding for increasing functions: geometric bracketing
//! followed by a safeguarded secant/bisection iteration.

use crate::error::Error;

pub(crate) const EXPANSION_FACTOR: f64 = 4.0;
pub(crate) const EXPANSION_STEPS: usize = 60;
const MAX_REFINE_STEPS: usize = 200;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub f_lo: f64,
    pub hi: f64,
    pub f_hi: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Bracketed {
    Exact(f64),
    Interval(Bracket),
}

/// Brackets the root of an increasing `f` on `(0, ∞)` by multiplying or
/// dividing `x0` by [`EXPANSION_FACTOR`].
///
/// Fails with [`Error::NoPositiveRoot`] when `f` stays nonnegative while
/// shrinking toward zero and [`Error::BracketingFailure`] when it stays
/// negative while growing.
pub(crate) fn bracket_increasing(
    f: &mut impl FnMut(f64) -> f64,
    x0: f64,
) -> Result<Bracketed, Error> {
    let f0 = f(x0);
    if f0 == 0.0 {
        return Ok(Bracketed::Exact(x0));
    }
    if f0 < 0.0 {
        let (mut lo, mut f_lo) = (x0, f0);
        for _ in 0..EXPANSION_STEPS {
            let hi = lo * EXPANSION_FACTOR;
            let f_hi = f(hi);
            if f_hi == 0.0 {
                return Ok(Bracketed::Exact(hi));
            }
            if f_hi > 0.0 {
                return Ok(Bracketed::Interval(Bracket { lo, f_lo, hi, f_hi }));
            }
            if f_hi.is_nan() {
                break;
            }
            lo = hi;
            f_lo = f_hi;
        }
        Err(Error::BracketingFailure { best_e: lo })
    } else if f0 > 0.0 {
        let (mut hi, mut f_hi) = (x0, f0);
        for _ in 0..EXPANSION_STEPS {
            let lo = hi / EXPANSION_FACTOR;
            let f_lo = f(lo);
            if f_lo == 0.0 {
                return Ok(Bracketed::Exact(lo));
            }
            if f_lo < 0.0 {
                return Ok(Bracketed::Interval(Bracket { lo, f_lo, hi, f_hi }));
            }
            if f_lo.is_nan() {
                break;
            }
            hi = lo;
            f_hi = f_lo;
        }
        Err(Error::NoPositiveRoot { best_e: hi })
    } else {
        Err(Error::BracketingFailure { best_e: x0 })
    }
}

/// Refines a sign-change bracket `f(lo) < 0 < f(hi)` until `|f| <= tol` or
/// the bracket has collapsed to rounding level. Secant steps use the
/// Illinois weighting so that neither end sticks; a step that fails to halve
/// the bracket twice in a row is replaced by bisection.
pub(crate) fn secant_bisection(
    f: &mut impl FnMut(f64) -> f64,
    bracket: Bracket,
    tol: f64,
) -> (f64, f64) {
    let Bracket {
        mut lo,
        mut f_lo,
        mut hi,
        mut f_hi,
    } = bracket;
    debug_assert!(f_lo < 0.0 && f_hi > 0.0);

    let (mut best, mut f_best) = if -f_lo < f_hi { (lo, f_lo) } else { (hi, f_hi) };
    // which end was kept by the last secant step: -1 low, +1 high
    let mut kept = 0i8;
    let mut slow_steps = 0;

    for _ in 0..MAX_REFINE_STEPS {
        if f_best.abs() <= tol {
            break;
        }
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
        let mut x = hi - f_hi * width / (f_hi - f_lo);
        if slow_steps >= 2 || !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
            slow_steps = 0;
            kept = 0;
        }
        let fx = f(x);
        if fx.is_nan() {
            break;
        }
        if fx.abs() < f_best.abs() {
            best = x;
            f_best = fx;
        }
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            if kept == 1 {
                f_hi *= 0.5;
            }
            kept = 1;
        } else {
            hi = x;
            f_hi = fx;
            if kept == -1 {
                f_lo *= 0.5;
            }
            kept = -1;
        }
        if hi - lo > 0.5 * width {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
    }
    (best, f_best)
}

/// Larger root of `b1 e² + b2 e + b3 = 0` for `b1 > 0`, computed without
/// cancellation.
pub(crate) fn larger_root(b1: f64, b2: f64, b3: f64) -> Result<f64, Error> {
    let disc = b2 * b2 - 4.0 * b1 * b3;
    let scale = b2 * b2 + (4.0 * b1 * b3).abs();
    let disc = if disc < 0.0 && disc >= -8.0 * f64::EPSILON * scale {
        0.0
    } else {
        disc
    };
    if disc < 0.0 || disc.is_nan() {
        return Err(Error::NegativeDiscriminant(disc));
    }
    let sq = disc.sqrt();
    if b2 <= 0.0 {
        Ok((-b2 + sq) / (2.0 * b1))
    } else {
        Ok(-2.0 * b3 / (b2 + sq))
    }
}
