//! Polynomials and truncated Laurent series over F_p, continued fractions in
//! K((1/t)), the continued-fraction deficiency oracle, and the quadratic
//! identities satisfied by the Paper-Folding and Pagoda series over F_2.

use crate::field::{det_mod, Modulus};
use crate::seq::SequenceSource;
use crate::Error;

/// A polynomial over F_p, constant term first, no trailing zeros stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u64>,
    modulus: Modulus,
}

impl Poly {
    pub fn new(modulus: Modulus, mut coeffs: Vec<u64>) -> Poly {
        for c in &mut coeffs {
            *c %= modulus.get();
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs, modulus }
    }

    pub fn zero(modulus: Modulus) -> Poly {
        Poly {
            coeffs: Vec::new(),
            modulus,
        }
    }

    /// The monomial c * t^d.
    pub fn monomial(modulus: Modulus, c: u64, d: usize) -> Poly {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        Poly::new(modulus, coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let m = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| m.add_raw(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::new(m, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let m = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| m.sub_raw(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::new(m, coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let m = self.modulus;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(m);
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = m.add_raw(coeffs[i + j], m.mul_raw(a, b));
            }
        }
        Poly::new(m, coeffs)
    }

    /// Euclidean division: (quotient, remainder) with deg rem < deg divisor.
    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly), Error> {
        let m = self.modulus;
        let dd = match divisor.degree() {
            Some(d) => d,
            None => return Err(Error::DivisionByZero),
        };
        let lead_inv = m.inv_raw(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        let nd = self.coeffs.len();
        if nd < dd + 1 {
            return Ok((Poly::zero(m), self.clone()));
        }
        let mut quot = vec![0u64; nd - dd];
        for i in (dd..nd).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = m.mul_raw(c, lead_inv);
            quot[i - dd] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = m.sub_raw(rem[idx], m.mul_raw(q, dc));
            }
        }
        Ok((Poly::new(m, quot), Poly::new(m, rem)))
    }
}

/// The fractional part of a Laurent series, known exactly to order t^{-N}:
/// coefficients theta_1..theta_N of sum theta_n t^{-n}.
#[derive(Debug, Clone)]
pub struct LaurentTruncation {
    modulus: Modulus,
    coeffs: Vec<u64>,
}

impl LaurentTruncation {
    pub fn new(modulus: Modulus, coeffs: Vec<u64>) -> Result<LaurentTruncation, Error> {
        if coeffs.is_empty() {
            return Err(Error::Config("truncation precision must be at least 1".into()));
        }
        if coeffs.iter().any(|&c| c >= modulus.get()) {
            return Err(Error::Config("series coefficient out of range".into()));
        }
        Ok(LaurentTruncation { modulus, coeffs })
    }

    /// The series sum_{n>=1} theta_{n+shift} t^{-n} truncated at t^{-N};
    /// with shift = k this is the fractional part of t^k * Theta.
    pub fn from_source(
        source: &SequenceSource,
        shift: i64,
        precision: usize,
    ) -> Result<LaurentTruncation, Error> {
        let coeffs = (1..=precision as i64)
            .map(|n| source.eval(n + shift))
            .collect::<Result<Vec<_>, _>>()?;
        LaurentTruncation::new(source.modulus(), coeffs)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

/// Partial-quotient degrees of a continued fraction expansion, with the count
/// of quotients certified correct at the working precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFProfile {
    pub degrees: Vec<usize>,
    pub certified: usize,
}

impl CFProfile {
    pub fn max_certified_degree(&self) -> usize {
        self.degrees[..self.certified].iter().copied().max().unwrap_or(0)
    }
}

/// Full expansion data: the successive partial quotients themselves.
pub fn cf_quotients(theta: &LaurentTruncation, max_terms: usize) -> (Vec<Poly>, usize) {
    let m = theta.modulus;
    let n = theta.precision();
    // Theta ~ P / t^N with P = sum theta_n t^{N-n}.
    let mut a = Poly::monomial(m, 1, n);
    let mut b = Poly::new(m, theta.coeffs.iter().rev().copied().collect());
    let mut quotients = Vec::new();
    let mut budget = 0usize; // 2 * sum of certified degrees so far
    let mut certified = 0usize;
    while !b.is_zero() && quotients.len() < max_terms {
        let (q, r) = a.divmod(&b).expect("divisor checked nonzero");
        let d = q.degree().unwrap_or(0);
        // a quotient is trusted only while the accumulated degree budget
        // stays strictly below the precision
        if certified == quotients.len() && budget + d < n {
            certified += 1;
            budget += 2 * d;
        }
        quotients.push(q);
        a = b;
        b = r;
    }
    (quotients, certified)
}

/// Degrees of successive partial quotients of the fractional series, with the
/// certified cutoff at the given precision.
pub fn continued_fraction(theta: &LaurentTruncation, max_terms: usize) -> CFProfile {
    let (quotients, certified) = cf_quotients(theta, max_terms);
    CFProfile {
        degrees: quotients.iter().map(|q| q.degree().unwrap_or(0)).collect(),
        certified,
    }
}

/// Max certified partial-quotient degree over the series t^k * Theta for
/// 0 <= k <= shifts — a lower bound on the deficiency, exact in the limit.
pub fn deficiency_via_cf(
    source: &SequenceSource,
    shifts: i64,
    precision: usize,
) -> Result<usize, Error> {
    let mut best = 0;
    for k in 0..=shifts {
        let theta = LaurentTruncation::from_source(source, k, precision)?;
        let profile = continued_fraction(&theta, precision + 1);
        best = best.max(profile.max_certified_degree());
    }
    Ok(best)
}

/// Determinant of the (l+1)x(l+1) Hankel matrix with top-left theta_n.
pub fn hankel_det(source: &SequenceSource, n: i64, l: usize) -> Result<u64, Error> {
    let dim = l + 1;
    let mut mat = Vec::with_capacity(dim * dim);
    for i in 0..dim as i64 {
        for j in 0..dim as i64 {
            mat.push(source.eval(n + i + j)?);
        }
    }
    Ok(det_mod(mat, dim, source.modulus()))
}

/// A truncated Laurent series in descending powers of t:
/// coeffs[i] is the coefficient of t^(top - i).
#[derive(Debug, Clone)]
struct Series {
    modulus: Modulus,
    top: i64,
    coeffs: Vec<u64>,
}

impl Series {
    fn bottom(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    fn coeff(&self, e: i64) -> u64 {
        if e > self.top || e < self.bottom() {
            0
        } else {
            self.coeffs[(self.top - e) as usize]
        }
    }

    fn add(&self, other: &Series) -> Series {
        let m = self.modulus;
        let top = self.top.max(other.top);
        let bottom = self.bottom().max(other.bottom());
        let coeffs = (bottom..=top)
            .rev()
            .map(|e| m.add_raw(self.coeff(e), other.coeff(e)))
            .collect();
        Series {
            modulus: m,
            top,
            coeffs,
        }
    }

    /// Product truncated where it stops being exact: terms below
    /// self.bottom() + other.top or other.bottom() + self.top would require
    /// unknown coefficients of one of the factors.
    fn mul(&self, other: &Series) -> Series {
        let m = self.modulus;
        let top = self.top + other.top;
        let bottom = (self.bottom() + other.top).max(other.bottom() + self.top);
        let mut coeffs = vec![0u64; (top - bottom + 1) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let e = top - (i + j) as i64;
                if e < bottom {
                    break;
                }
                let idx = (top - e) as usize;
                coeffs[idx] = m.add_raw(coeffs[idx], m.mul_raw(a, b));
            }
        }
        Series {
            modulus: m,
            top,
            coeffs,
        }
    }

    /// Expands num/den as a series in descending powers, down to t^bottom.
    fn from_ratio(num: &Poly, den: &Poly, bottom: i64) -> Result<Series, Error> {
        let m = num.modulus;
        let dn = num.degree().map(|d| d as i64).unwrap_or(i64::MIN);
        let dd = den
            .degree()
            .map(|d| d as i64)
            .ok_or(Error::DivisionByZero)?;
        let lead_inv = m.inv_raw(den.coeff(dd as usize))?;
        let top = dn - dd;
        if num.is_zero() || top < bottom {
            return Ok(Series {
                modulus: m,
                top: bottom,
                coeffs: vec![0],
            });
        }
        // long division in descending powers; remainder indexed by dn - e
        let mut rem = vec![0u64; (dn - bottom.min(0) + 1) as usize];
        for i in 0..=dn {
            rem[(dn - i) as usize] = num.coeff(i as usize);
        }
        let mut coeffs = vec![0u64; (top - bottom + 1) as usize];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            let e = top - i as i64;
            let lead = rem[(dn - (e + dd)) as usize];
            if lead == 0 {
                continue;
            }
            let q = m.mul_raw(lead, lead_inv);
            *slot = q;
            // rem -= q * t^e * den
            for j in 0..=dd {
                let idx = (dn - (e + j)) as usize;
                rem[idx] = m.sub_raw(rem[idx], m.mul_raw(q, den.coeff(j as usize)));
            }
        }
        Ok(Series {
            modulus: m,
            top,
            coeffs,
        })
    }
}

/// Which quadratic identity over F_2 to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticId {
    /// Phi^2 + Phi + t/(1+t^4) = 0 for the Paper-Folding series.
    Phi,
    /// Pi^2 + ((1+t^2)/t) Pi + 1/t = 0 for the Pagoda series.
    Pi,
}

/// Checks the chosen identity through order t^{-N} given the fractional
/// coefficients c_1, c_2, ... of the series (at least N + 4 of them).
pub fn quadratic_residual_zero(coeffs: &[u64], which: QuadraticId, n: usize) -> Result<bool, Error> {
    let m = Modulus::new(2)?;
    if coeffs.len() < n + 4 {
        return Err(Error::Config(
            "need at least N + 4 coefficients to certify order t^-N".into(),
        ));
    }
    if coeffs.iter().any(|&c| c > 1) {
        return Err(Error::Config("coefficients must be bits".into()));
    }
    let series = Series {
        modulus: m,
        top: -1,
        coeffs: coeffs.to_vec(),
    };
    let one = Poly::new(m, vec![1]);
    let residual = match which {
        QuadraticId::Phi => {
            // t / (1 + t^4)
            let num = Poly::monomial(m, 1, 1);
            let den = Poly::new(m, vec![1, 0, 0, 0, 1]);
            let tail = Series::from_ratio(&num, &den, -(n as i64) - 1)?;
            series.mul(&series).add(&series).add(&tail)
        }
        QuadraticId::Pi => {
            // (1 + t^2)/t = t + 1/t   and   1/t
            let lin = Series::from_ratio(&Poly::new(m, vec![1, 0, 1]), &Poly::monomial(m, 1, 1), -2)?;
            let inv_t = Series::from_ratio(&one, &Poly::monomial(m, 1, 1), -2)?;
            series.mul(&series).add(&series.mul(&lin)).add(&inv_t)
        }
    };
    let ok = (-(n as i64)..=residual.top).all(|e| residual.coeff(e) == 0);
    Ok(ok)
}

/// Checks the stated identity for the built-in series through order t^{-N}.
pub fn check_quadratic_f2(which: QuadraticId, n: usize) -> Result<bool, Error> {
    let m = Modulus::new(2)?;
    let source = match which {
        QuadraticId::Phi => SequenceSource::paper_folding(m),
        QuadraticId::Pi => SequenceSource::pagoda(m),
    };
    let coeffs = (1..=(n + 8) as i64)
        .map(|i| source.eval(i))
        .collect::<Result<Vec<_>, _>>()?;
    quadratic_residual_zero(&coeffs, which, n)
}
