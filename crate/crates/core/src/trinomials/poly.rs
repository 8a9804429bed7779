//! Dense integer polynomials, resultants and discriminants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Integer polynomial with coefficients stored from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    /// `x^n + a x^m + b`
    pub fn trinomial(n: usize, m: usize, a: i64, b: i64) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] += 1;
        c[m] += a;
        c[0] += b;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `self(x^d)`
    pub fn compose_power(&self, d: usize) -> Self {
        assert!(d >= 1);
        let Some(deg) = self.degree() else {
            return Self::zero();
        };
        let mut out = vec![BigInt::zero(); deg * d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * d] = c.clone();
        }
        Self::new(out)
    }

    /// Quotient and remainder over `Z`, if every step of the long division is exact.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let lc = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        match self.div_rem(divisor) {
            Some((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = c.abs();
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                _ if !unit => write!(f, "{mag}*")?,
                _ => {}
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Determinant by fraction-free Gaussian elimination.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `Res(f, g) = lc(f)^deg(g) * prod g(alpha)` over the roots of `f`, via the
/// Sylvester matrix.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (Some(df), Some(dg)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    if df == 0 {
        return f.leading().pow(dg as u32);
    }
    if dg == 0 {
        return g.leading().pow(df as u32);
    }
    let size = df + dg;
    let mut rows = Vec::with_capacity(size);
    for (poly, shifts, deg) in [(f, dg, df), (g, df, dg)] {
        for s in 0..shifts {
            let mut row = vec![BigInt::zero(); size];
            for (i, c) in poly.coeffs.iter().enumerate() {
                row[s + deg - i] = c.clone();
            }
            rows.push(row);
        }
    }
    bareiss_determinant(rows)
}

/// `Res(f, f') / lc(f)`, the discriminant without the sign `(-1)^(d(d-1)/2)`.
/// This is the normalization under which
/// `Disc(gh) = (-1)^(deg g deg h) Disc(g) Disc(h) Res(g, h)^2`.
pub fn unsigned_discriminant(f: &IntPoly) -> BigInt {
    let lc = f.leading();
    assert!(!lc.is_zero(), "discriminant of the zero polynomial");
    resultant(f, &f.derivative()) / lc
}

/// Standard discriminant `(-1)^(d(d-1)/2) Res(f, f') / lc(f)`; `1` in degree 0 and 1.
pub fn discriminant(f: &IntPoly) -> BigInt {
    let d = f.degree().expect("discriminant of the zero polynomial");
    if d == 0 {
        return BigInt::one();
    }
    let r = unsigned_discriminant(f);
    if (d * (d - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn resultant_examples() {
        for (a, b) in [(3i64, 5i64), (-2, 7), (0, 0)] {
            assert_eq!(resultant(&p(&[-a, 1]), &p(&[-b, 1])), BigInt::from(a - b));
        }
        assert_eq!(resultant(&p(&[1, 1, 1]), &p(&[-1, 1])), BigInt::from(3));
        let f = IntPoly::trinomial(7, 5, 1, 1);
        let g = p(&[1, 1, 1]);
        let h = f.div_exact(&g).unwrap();
        assert_eq!(resultant(&g, &h), BigInt::from(13));
        assert_eq!(resultant(&p(&[2]), &p(&[1, 0, 1])), BigInt::from(4));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p(&[1, 1, 1])), BigInt::from(-3));
        assert_eq!(discriminant(&p(&[-1, -1, 0, 0, 0, 1])), BigInt::from(2869));
        // b^2 - 4ac
        assert_eq!(discriminant(&p(&[5, -3, 2])), BigInt::from(9 - 40));
        // cubic x^3 + px + q: -4p^3 - 27q^2
        assert_eq!(discriminant(&p(&[2, -3, 0, 1])), BigInt::from(108 - 108));
        assert_eq!(discriminant(&p(&[1, 1, 0, 1])), BigInt::from(-4 - 27));
    }

    #[test]
    fn standard_discriminant_product_has_no_sign() {
        let f = p(&[0, 1]);
        let g = p(&[-1, 1]);
        let fg = f.mul(&g);
        let res = resultant(&f, &g);
        assert_eq!(discriminant(&fg), discriminant(&f) * discriminant(&g) * &res * &res);
        assert_eq!(
            unsigned_discriminant(&fg),
            -unsigned_discriminant(&f) * unsigned_discriminant(&g) * &res * &res
        );
    }

    #[test]
    fn division_and_display() {
        let f = IntPoly::trinomial(5, 1, 1, 1);
        let (q, r) = f.div_rem(&p(&[1, 1, 1])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q.to_string(), "x^3 - x^2 + 1");
        assert_eq!(p(&[-3, 0, 2]).to_string(), "2*x^2 - 3");
        assert!(p(&[1, 0, 1]).div_rem(&p(&[1, 2])).is_none());
        assert_eq!(p(&[1, 1, 1]).compose_power(2), p(&[1, 0, 1, 0, 1]));
    }

    fn poly_strategy() -> impl Strategy<Value = IntPoly> {
        (prop::collection::vec(-5i64..=5, 1..=6), 1i64..=3)
            .prop_map(|(mut c, lead)| {
                c.push(lead);
                c
            })
            .prop_map(|c| IntPoly::from_i64(&c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn product_formula(f in poly_strategy(), g in poly_strategy()) {
            let (df, dg) = (f.degree().unwrap(), g.degree().unwrap());
            let fg = f.mul(&g);
            let res = resultant(&f, &g);
            let rhs = unsigned_discriminant(&f) * unsigned_discriminant(&g) * &res * &res;
            let rhs = if df * dg % 2 == 1 { -rhs } else { rhs };
            prop_assert_eq!(unsigned_discriminant(&fg), rhs);
            prop_assert_eq!(
                discriminant(&fg),
                discriminant(&f) * discriminant(&g) * &res * &res
            );
        }

        #[test]
        fn resultant_matches_root_product_for_split_f(
            roots in prop::collection::vec(-6i64..=6, 1..=4),
            g in poly_strategy(),
        ) {
            let f = roots.iter().fold(p(&[1]), |acc, &r| acc.mul(&p(&[-r, 1])));
            let expect = roots.iter().fold(BigInt::one(), |acc, &r| acc * g.eval(&BigInt::from(r)));
            prop_assert_eq!(resultant(&f, &g), expect);
        }
    }
}
