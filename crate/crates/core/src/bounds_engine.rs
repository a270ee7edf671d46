//! Lower bounds for the bottom of the form spectrum on quotients
//! `Gamma \ H^n_K`, expressed through the critical exponent `delta`.
//!
//! The floating-point entry points take a measured or hypothetical
//! `delta`. The [`exact`] submodule repeats the same formulas over
//! `Rational64` so identities between the bounds can be checked without
//! rounding.

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::space_constants::{
    alpha_p, curvature_term_min, rational_to_f64, ConstantsError, Field, SpaceDescriptor,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("critical exponent {delta} outside [0, 2 rho] = [0, {max}]")]
    DeltaOutOfRange { delta: f64, max: f64 },
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

/// Lower bound on the p-form spectrum from alpha_p and delta, with its middle-degree flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremBBound {
    /// Bound after clamping at zero.
    pub bound: f64,
    /// `alpha_p - (delta - rho)^2` (or `alpha_p` below `rho`) before clamping.
    pub raw: f64,
    pub clamped: bool,
    pub zero_possible: bool,
    pub zero_isolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub space: SpaceDescriptor,
    pub p: i64,
    pub delta: f64,
    pub theorem_b_bound: f64,
    pub theorem_b_raw: f64,
    pub clamped: bool,
    pub zero_possible: bool,
    pub zero_isolated: bool,
    pub sullivan_corlette_lambda00: f64,
    pub bochner_bound: Option<f64>,
    pub difference: Option<f64>,
}

fn check_delta(space: &SpaceDescriptor, delta: f64) -> Result<(), BoundsError> {
    let max = 2.0 * space.rho_f64();
    if !(0.0..=max).contains(&delta) || delta.is_nan() {
        return Err(BoundsError::DeltaOutOfRange { delta, max });
    }
    Ok(())
}

/// Bottom of the function spectrum: `rho^2` for `delta <= rho`, otherwise
/// `delta (2 rho - delta)`.
pub fn sullivan_corlette(space: &SpaceDescriptor, delta: f64) -> Result<f64, BoundsError> {
    check_delta(space, delta)?;
    let rho = space.rho_f64();
    Ok(if delta <= rho {
        rho * rho
    } else {
        delta * (2.0 * rho - delta)
    })
}

pub fn theorem_b_lower_bound(
    space: &SpaceDescriptor,
    p: i64,
    delta: f64,
) -> Result<TheoremBBound, BoundsError> {
    check_delta(space, delta)?;
    let alpha = alpha_p(space, p)?;
    let alpha_f = rational_to_f64(&alpha);
    let rho = space.rho_f64();
    let excess = delta - rho;
    let raw = if excess <= 0.0 {
        alpha_f
    } else {
        alpha_f - excess * excess
    };
    let zero_possible = space.is_middle_degree(p);
    // delta < rho + sqrt(alpha), written without the square root.
    let below_threshold = excess < 0.0 || excess * excess < alpha_f;
    Ok(TheoremBBound {
        bound: raw.max(0.0),
        raw,
        clamped: raw < 0.0,
        zero_possible,
        zero_isolated: zero_possible && below_threshold,
    })
}

/// `lambda_0^0 + R^p_min`, unclamped.
pub fn bochner_lower_bound(space: &SpaceDescriptor, p: i64, delta: f64) -> Result<f64, BoundsError> {
    let curvature = curvature_term_min(space, p)?;
    Ok(sullivan_corlette(space, delta)? + rational_to_f64(&curvature))
}

/// Side-by-side report. The Bochner column is left empty for the
/// quaternionic and octonionic spaces, where no curvature minimum is known.
pub fn compare(space: &SpaceDescriptor, p: i64, delta: f64) -> Result<BoundsReport, BoundsError> {
    let tb = theorem_b_lower_bound(space, p, delta)?;
    let sc = sullivan_corlette(space, delta)?;
    let bochner = match space.field {
        Field::Real | Field::Complex => Some(bochner_lower_bound(space, p, delta)?),
        Field::Quaternion | Field::Octonion => None,
    };
    Ok(BoundsReport {
        space: *space,
        p,
        delta,
        theorem_b_bound: tb.bound,
        theorem_b_raw: tb.raw,
        clamped: tb.clamped,
        zero_possible: tb.zero_possible,
        zero_isolated: tb.zero_isolated,
        sullivan_corlette_lambda00: sc,
        bochner_bound: bochner,
        difference: bochner.map(|b| tb.raw - b),
    })
}

/// Exact rational versions of the bounds.
pub mod exact {
    use super::*;

    fn check(space: &SpaceDescriptor, delta: Rational64) -> Result<(), BoundsError> {
        let max = space.rho * 2;
        if delta < Rational64::from_integer(0) || delta > max {
            return Err(BoundsError::DeltaOutOfRange {
                delta: rational_to_f64(&delta),
                max: rational_to_f64(&max),
            });
        }
        Ok(())
    }

    pub fn sullivan_corlette(space: &SpaceDescriptor, delta: Rational64) -> Result<Rational64, BoundsError> {
        check(space, delta)?;
        let rho = space.rho;
        Ok(if delta <= rho {
            rho * rho
        } else {
            delta * (rho * 2 - delta)
        })
    }

    /// Form-degree bound before clamping at zero.
    pub fn theorem_b_raw(space: &SpaceDescriptor, p: i64, delta: Rational64) -> Result<Rational64, BoundsError> {
        check(space, delta)?;
        let alpha = alpha_p(space, p)?;
        let excess = delta - space.rho;
        Ok(if excess <= Rational64::from_integer(0) {
            alpha
        } else {
            alpha - excess * excess
        })
    }

    pub fn bochner(space: &SpaceDescriptor, p: i64, delta: Rational64) -> Result<Rational64, BoundsError> {
        Ok(sullivan_corlette(space, delta)? + curvature_term_min(space, p)?)
    }

    pub fn difference(space: &SpaceDescriptor, p: i64, delta: Rational64) -> Result<Rational64, BoundsError> {
        Ok(theorem_b_raw(space, p, delta)? - bochner(space, p, delta)?)
    }

    /// `delta < rho + sqrt(alpha_p)` decided exactly.
    pub fn below_isolation_threshold(
        space: &SpaceDescriptor,
        p: i64,
        delta: Rational64,
    ) -> Result<bool, BoundsError> {
        let alpha = alpha_p(space, p)?;
        let excess = delta - space.rho;
        Ok(excess < Rational64::from_integer(0) || excess * excess < alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_constants::make_space;

    fn sp(f: Field, n: i64) -> SpaceDescriptor {
        make_space(f, n).unwrap()
    }

    #[test]
    fn sullivan_corlette_examples() {
        let c2 = sp(Field::Complex, 2);
        assert_eq!(sullivan_corlette(&c2, 1.0).unwrap(), 4.0);
        assert_eq!(sullivan_corlette(&c2, 4.0).unwrap(), 0.0);
        assert_eq!(sullivan_corlette(&c2, 3.0).unwrap(), 3.0);
        assert!(sullivan_corlette(&c2, 4.5).is_err());
        assert!(sullivan_corlette(&c2, -0.1).is_err());
    }

    #[test]
    fn theorem_b_examples() {
        let r5 = sp(Field::Real, 5);
        let b = theorem_b_lower_bound(&r5, 1, 2.5).unwrap();
        assert!((b.bound - 0.75).abs() < 1e-15);
        assert!(!b.zero_possible);
        let c2 = sp(Field::Complex, 2);
        assert_eq!(theorem_b_lower_bound(&c2, 1, 1.5).unwrap().bound, 1.0);
        let b = theorem_b_lower_bound(&r5, 2, 2.0).unwrap();
        assert_eq!(b.bound, 0.0);
        assert!(!b.zero_possible);
    }

    #[test]
    fn clamping_keeps_raw() {
        let c2 = sp(Field::Complex, 2);
        // alpha_1 = 1, rho = 2: past delta = 3 the raw bound is negative.
        let b = theorem_b_lower_bound(&c2, 1, 3.5).unwrap();
        assert!(b.clamped);
        assert_eq!(b.bound, 0.0);
        assert!((b.raw + 1.25).abs() < 1e-15);
    }

    #[test]
    fn middle_degree_isolation() {
        let c2 = sp(Field::Complex, 2);
        // p = 2 = dim/2, alpha_2 = 1, rho = 2.
        let b = theorem_b_lower_bound(&c2, 2, 2.5).unwrap();
        assert!(b.zero_possible && b.zero_isolated);
        let b = theorem_b_lower_bound(&c2, 2, 3.0).unwrap();
        assert!(b.zero_possible && !b.zero_isolated);
        assert!(!exact::below_isolation_threshold(&c2, 2, Rational64::from_integer(3)).unwrap());
    }

    #[test]
    fn bochner_examples() {
        let r5 = sp(Field::Real, 5);
        assert_eq!(bochner_lower_bound(&r5, 1, 2.0).unwrap(), 0.0);
        let c2 = sp(Field::Complex, 2);
        assert_eq!(bochner_lower_bound(&c2, 1, 1.0).unwrap(), -2.0);
        assert_eq!(bochner_lower_bound(&c2, 0, 0.5).unwrap(), 4.0);
        assert!(bochner_lower_bound(&sp(Field::Quaternion, 2), 1, 1.0).is_err());
    }

    #[test]
    fn compare_examples() {
        let r5 = sp(Field::Real, 5);
        assert_eq!(compare(&r5, 1, 2.0).unwrap().difference, Some(1.0));
        let c3 = sp(Field::Complex, 3);
        assert_eq!(compare(&c3, 2, 3.0).unwrap().difference, Some(8.0));
        assert_eq!(compare(&c3, 0, 4.2).unwrap().difference.map(|d| d.abs() < 1e-12), Some(true));
        let h2 = sp(Field::Quaternion, 2);
        let rep = compare(&h2, 1, 6.0).unwrap();
        assert_eq!(rep.bochner_bound, None);
        assert_eq!(rep.theorem_b_bound, 16.0);
        assert!(compare(&sp(Field::Octonion, 2), 4, 1.0).is_err());
    }

    #[test]
    fn continuity_at_rho() {
        for field in [Field::Real, Field::Complex, Field::Quaternion] {
            for n in 2..=6 {
                let s = sp(field, n);
                for p in 0..=s.dim {
                    let a = exact::theorem_b_raw(&s, p, s.rho).unwrap();
                    assert_eq!(a, alpha_p(&s, p).unwrap());
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn theorem_b_monotone_past_rho(n in 2i64..8, p_frac in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
                let s = sp(Field::Complex, n);
                let p = (p_frac * s.dim as f64).floor() as i64;
                let rho = s.rho_f64();
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let x = theorem_b_lower_bound(&s, p, rho + lo * rho).unwrap();
                let y = theorem_b_lower_bound(&s, p, rho + hi * rho).unwrap();
                prop_assert!(y.raw <= x.raw + 1e-12);
                prop_assert!(y.bound <= x.bound + 1e-12);
            }

            #[test]
            fn sullivan_corlette_maximal_below_rho(n in 2i64..8, t in 0.0f64..1.0) {
                let s = sp(Field::Real, n);
                let rho = s.rho_f64();
                let v = sullivan_corlette(&s, 2.0 * rho * t).unwrap();
                prop_assert!(v <= rho * rho + 1e-12);
                if 2.0 * t <= 1.0 {
                    prop_assert_eq!(v, rho * rho);
                }
            }
        }
    }
}
