//! Structure constants of the rank-one symmetric spaces `H^n_K` and the
//! spectral constants derived from them.
//!
//! Everything here is exact: values are `Rational64` and no floating point
//! is involved. Downstream code converts at its own boundary.

use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstantsError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("degree p = {p} outside [0, {dim}]")]
    DegreeOutOfRange { p: i64, dim: i64 },
    #[error("alpha_p for the octonionic plane is unknown at p = {p}")]
    UnknownConstant { p: i64 },
    #[error("{0} is not available for this field")]
    NotImplemented(&'static str),
    #[error("invalid representation index: {0}")]
    InvalidIndex(String),
}

/// The division algebra `K` over which the hyperbolic space is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Field {
    Real,
    Complex,
    Quaternion,
    Octonion,
}

impl Field {
    /// Real dimension of the algebra.
    pub fn real_dim(self) -> i64 {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
            Field::Quaternion => 4,
            Field::Octonion => 8,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Field::Real => "R",
            Field::Complex => "C",
            Field::Quaternion => "H",
            Field::Octonion => "O",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Field {
    type Err = ConstantsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" | "real" | "Real" => Ok(Field::Real),
            "C" | "c" | "complex" | "Complex" => Ok(Field::Complex),
            "H" | "h" | "quaternion" | "Quaternion" => Ok(Field::Quaternion),
            "O" | "o" | "octonion" | "Octonion" => Ok(Field::Octonion),
            other => Err(ConstantsError::InvalidSpace(format!("unknown field {other:?}"))),
        }
    }
}

/// `H^n_K` together with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub field: Field,
    pub n: i64,
    pub d: i64,
    /// Real dimension `d n` of the space.
    pub dim: i64,
    pub m_alpha: i64,
    pub m_2alpha: i64,
    #[serde(with = "rational_serde")]
    pub rho: Rational64,
}

impl SpaceDescriptor {
    pub fn rho_f64(&self) -> f64 {
        self.rho.to_f64().unwrap_or(f64::NAN)
    }

    pub fn rho_squared(&self) -> Rational64 {
        self.rho * self.rho
    }

    /// `d(n-1)/2`, the shift appearing in the Green kernel parameters.
    pub fn half_m_alpha(&self) -> Rational64 {
        Rational64::new(self.m_alpha, 2)
    }

    /// True when `p` is the middle degree `dim/2`.
    pub fn is_middle_degree(&self, p: i64) -> bool {
        2 * p == self.dim
    }

    fn check_degree(&self, p: i64) -> Result<(), ConstantsError> {
        if p < 0 || p > self.dim {
            return Err(ConstantsError::DegreeOutOfRange { p, dim: self.dim });
        }
        Ok(())
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H^{}_{}", self.n, self.field)
    }
}

/// M-type labels: exterior powers of the standard representation of
/// `SO(n-1)` in the real case, and the primitive `(r, s)` types in the
/// complex case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MTypeLabel {
    ExteriorPower { q: i64 },
    LefschetzType { r: i64, s: i64 },
}

pub fn make_space(field: Field, n: i64) -> Result<SpaceDescriptor, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::InvalidSpace(format!("n = {n} < 2")));
    }
    if field == Field::Octonion && n != 2 {
        return Err(ConstantsError::InvalidSpace(format!(
            "the octonionic hyperbolic space only exists for n = 2 (got {n})"
        )));
    }
    let d = field.real_dim();
    let m_alpha = d * (n - 1);
    let m_2alpha = d - 1;
    Ok(SpaceDescriptor {
        field,
        n,
        d,
        dim: d * n,
        m_alpha,
        m_2alpha,
        rho: Rational64::new(m_alpha, 2) + m_2alpha,
    })
}

/// Bottom of the continuous spectrum of the Hodge Laplacian on `p`-forms.
pub fn alpha_p(space: &SpaceDescriptor, p: i64) -> Result<Rational64, ConstantsError> {
    space.check_degree(p)?;
    // Hodge duality: alpha_p = alpha_{dim - p}.
    let p = p.min(space.dim - p);
    let n = space.n;
    let sq = |x: Rational64| x * x;
    let value = match space.field {
        Field::Real => sq(Rational64::new(n - 1, 2) - p),
        Field::Complex => {
            if p == n {
                Rational64::from_integer(1)
            } else {
                Rational64::from_integer((n - p) * (n - p))
            }
        }
        Field::Quaternion => {
            let cut = (4 * n - 1) / 6;
            let v = if p == 0 {
                (2 * n + 1) * (2 * n + 1)
            } else if p <= cut {
                (2 * n - p) * (2 * n - p) + 8 * (n - p)
            } else if p <= n {
                (2 * n + 1 - p) * (2 * n + 1 - p)
            } else if p < 2 * n {
                (2 * n - p) * (2 * n - p)
            } else {
                1
            };
            Rational64::from_integer(v)
        }
        Field::Octonion => match p {
            // rho = 11 and alpha_0 = rho^2 on every rank-one space.
            0 => Rational64::from_integer(121),
            // Known value for the Cayley plane; higher degrees are open.
            1 => Rational64::from_integer(97),
            _ => return Err(ConstantsError::UnknownConstant { p }),
        },
    };
    Ok(value)
}

/// Casimir value of `Lambda^q` of `SO(n-1)`: `q(n-1-q)`.
pub fn casimir_m_exterior(space: &SpaceDescriptor, q: i64) -> Result<Rational64, ConstantsError> {
    if space.field != Field::Real {
        return Err(ConstantsError::NotImplemented(
            "exterior-power Casimir values (real field only)",
        ));
    }
    let m = space.n - 1;
    if q < 0 || q > m {
        return Err(ConstantsError::InvalidIndex(format!("q = {q} outside [0, {m}]")));
    }
    Ok(Rational64::from_integer(q * (m - q)))
}

/// Casimir value of the primitive `(r, s)` K-type of `U(n)`.
///
/// For `r + s > n` the type is replaced by its Hodge dual `(n - s, n - r)`.
pub fn casimir_tau_prime(n: i64, r: i64, s: i64) -> Result<Rational64, ConstantsError> {
    if n < 1 || r < 0 || s < 0 {
        return Err(ConstantsError::InvalidIndex(format!("(n, r, s) = ({n}, {r}, {s})")));
    }
    if r + s > 2 * n || r > n || s > n {
        return Err(ConstantsError::InvalidIndex(format!(
            "(r, s) = ({r}, {s}) is not a form type on C^{n}"
        )));
    }
    let (r, s) = if r + s > n { (n - s, n - r) } else { (r, s) };
    Ok(Rational64::from_integer(2 * (r + s) * (n + 1) - 4 * r * s))
}

/// Infimum of the curvature term in the Bochner-Weitzenboeck formula.
pub fn curvature_term_min(space: &SpaceDescriptor, p: i64) -> Result<Rational64, ConstantsError> {
    space.check_degree(p)?;
    let n = space.n;
    let v = match space.field {
        Field::Real => -p * (space.dim - p),
        Field::Complex => {
            if p <= n {
                -2 * p * (n + 1)
            } else {
                -2 * (2 * n - p) * (n + 1)
            }
        }
        Field::Quaternion | Field::Octonion => {
            return Err(ConstantsError::NotImplemented(
                "the Bochner curvature minimum (real and complex fields only)",
            ))
        }
    };
    Ok(Rational64::from_integer(v))
}

/// Render a rational as `a` or `a/b`.
pub fn rational_string(x: &Rational64) -> String {
    if x.denom() == &1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_to_f64(x: &Rational64) -> f64 {
    if x.is_zero() {
        0.0
    } else {
        *x.numer() as f64 / *x.denom() as f64
    }
}

mod rational_serde {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::rational_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<Rational64>().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64) -> Rational64 {
        Rational64::from_integer(a)
    }

    #[test]
    fn rho_values() {
        assert_eq!(make_space(Field::Real, 3).unwrap().rho, r(1));
        assert_eq!(make_space(Field::Real, 4).unwrap().rho, Rational64::new(3, 2));
        assert_eq!(make_space(Field::Complex, 3).unwrap().rho, r(3));
        assert_eq!(make_space(Field::Quaternion, 2).unwrap().rho, r(5));
        assert_eq!(make_space(Field::Octonion, 2).unwrap().rho, r(11));
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(make_space(Field::Octonion, 3).is_err());
        assert!(make_space(Field::Real, 1).is_err());
        assert!(make_space(Field::Complex, 0).is_err());
    }

    #[test]
    fn multiplicities() {
        let h = make_space(Field::Quaternion, 3).unwrap();
        assert_eq!((h.d, h.dim, h.m_alpha, h.m_2alpha), (4, 12, 8, 3));
        let re = make_space(Field::Real, 5).unwrap();
        assert_eq!(re.m_2alpha, 0);
    }

    #[test]
    fn alpha_examples() {
        let sp = |f, n| make_space(f, n).unwrap();
        assert_eq!(alpha_p(&sp(Field::Real, 5), 2).unwrap(), r(0));
        assert_eq!(alpha_p(&sp(Field::Complex, 3), 3).unwrap(), r(1));
        assert_eq!(alpha_p(&sp(Field::Quaternion, 2), 1).unwrap(), r(17));
        assert_eq!(alpha_p(&sp(Field::Octonion, 2), 1).unwrap(), r(97));
        assert_eq!(alpha_p(&sp(Field::Octonion, 2), 15).unwrap(), r(97));
        assert_eq!(alpha_p(&sp(Field::Octonion, 2), 16).unwrap(), r(121));
        assert_eq!(
            alpha_p(&sp(Field::Octonion, 2), 7),
            Err(ConstantsError::UnknownConstant { p: 7 })
        );
        assert!(alpha_p(&sp(Field::Real, 3), 4).is_err());
    }

    #[test]
    fn alpha_zero_only_for_real_half_degrees() {
        for field in [Field::Real, Field::Complex, Field::Quaternion] {
            for n in 2..=8 {
                let s = make_space(field, n).unwrap();
                for p in 0..=s.dim {
                    let zero = alpha_p(&s, p).unwrap().is_zero();
                    let expected = field == Field::Real && (2 * p == n - 1 || 2 * p == n + 1);
                    assert_eq!(zero, expected, "{s} p={p}");
                }
            }
        }
    }

    #[test]
    fn casimir_examples() {
        let r5 = make_space(Field::Real, 5).unwrap();
        let r7 = make_space(Field::Real, 7).unwrap();
        assert_eq!(casimir_m_exterior(&r5, 0).unwrap(), r(0));
        assert_eq!(casimir_m_exterior(&r5, 1).unwrap(), r(3));
        assert_eq!(casimir_m_exterior(&r7, 2).unwrap(), r(8));
        assert!(casimir_m_exterior(&make_space(Field::Complex, 2).unwrap(), 1).is_err());
        assert!(casimir_m_exterior(&r5, 5).is_err());
    }

    #[test]
    fn tau_prime_examples() {
        assert_eq!(casimir_tau_prime(2, 1, 0).unwrap(), r(6));
        assert_eq!(casimir_tau_prime(3, 0, 0).unwrap(), r(0));
        assert_eq!(casimir_tau_prime(3, 1, 1).unwrap(), r(12));
        // Hodge reflection: (2, 2) on C^3 is dual to (1, 1).
        assert_eq!(casimir_tau_prime(3, 2, 2).unwrap(), r(12));
        assert!(casimir_tau_prime(3, -1, 0).is_err());
        assert!(casimir_tau_prime(3, 4, 3).is_err());
    }

    #[test]
    fn curvature_examples() {
        let r5 = make_space(Field::Real, 5).unwrap();
        let c2 = make_space(Field::Complex, 2).unwrap();
        assert_eq!(curvature_term_min(&r5, 1).unwrap(), r(-4));
        assert_eq!(curvature_term_min(&c2, 1).unwrap(), r(-6));
        assert_eq!(curvature_term_min(&c2, 0).unwrap(), r(0));
        assert_eq!(curvature_term_min(&c2, 3).unwrap(), r(-6));
        assert!(curvature_term_min(&make_space(Field::Quaternion, 2).unwrap(), 1).is_err());
    }

    #[test]
    fn complex_max_lefschetz_casimir() {
        for n in 1..=8 {
            for p in 0..=n {
                let mut best = r(-1);
                for rr in 0..=p {
                    let ss = p - rr;
                    for k in 0..=rr.min(ss) {
                        best = best.max(casimir_tau_prime(n, rr - k, ss - k).unwrap());
                    }
                }
                let c = make_space(Field::Complex, n.max(2)).unwrap();
                assert_eq!(best, r(2 * p * (n + 1)));
                if n >= 2 {
                    assert_eq!(best, -curvature_term_min(&c, p).unwrap());
                }
            }
        }
    }

    #[test]
    fn real_alpha_matches_casimir_max() {
        for n in 2..=10 {
            let s = make_space(Field::Real, n).unwrap();
            for p in 0..=(n - 1) / 2 {
                let c = casimir_m_exterior(&s, p).unwrap();
                assert_eq!(alpha_p(&s, p).unwrap(), s.rho_squared() - c);
            }
        }
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(rational_string(&Rational64::new(9, 4)), "9/4");
        assert_eq!(rational_string(&r(-3)), "-3");
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hodge_symmetry(fi in 0usize..3, n in 2i64..12, p_frac in 0.0f64..1.0) {
                let field = [Field::Real, Field::Complex, Field::Quaternion][fi];
                let s = make_space(field, n).unwrap();
                let p = (p_frac * s.dim as f64).floor() as i64;
                prop_assert_eq!(alpha_p(&s, p).unwrap(), alpha_p(&s, s.dim - p).unwrap());
            }
        }
    }
}
