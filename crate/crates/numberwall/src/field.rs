//! Exact arithmetic in the prime field F_p.

use crate::Error;

/// A prime modulus, checked at construction by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
}

impl Modulus {
    pub fn new(p: u64) -> Result<Self, Error> {
        if p < 2 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Modulus { p })
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn element(self, v: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            modulus: self,
        }
    }

    // Raw residue helpers for hot loops; inputs must already be reduced.

    #[inline]
    pub fn add_raw(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub_raw(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg_raw(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul_raw(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv_raw(self, a: u64) -> Result<u64, Error> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus is prime so gcd must be 1");
        Ok(t0.rem_euclid(self.p as i64) as u64)
    }

    /// `(-1)^e` as a residue.
    #[inline]
    pub fn sign(self, e: i64) -> u64 {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            self.neg_raw(1)
        }
    }
}

/// Determinant of an n x n matrix of residues, row-major, by Gaussian
/// elimination with partial pivoting. Consumes the scratch buffer.
pub fn det_mod(mut a: Vec<u64>, n: usize, modulus: Modulus) -> u64 {
    // Monomorphized fast paths for the small primes used in hot test loops.
    match modulus.get() {
        2 => det_const::<2>(&mut a, n),
        3 => det_const::<3>(&mut a, n),
        5 => det_const::<5>(&mut a, n),
        7 => det_const::<7>(&mut a, n),
        11 => det_const::<11>(&mut a, n),
        _ => det_generic(&mut a, n, modulus),
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn det_const<const P: u64>(a: &mut [u64], n: usize) -> u64 {
    let mut det = 1u64;
    let mut negate = false;
    for col in 0..n {
        let pivot = match (col..n).find(|&r| a[r * n + col] != 0) {
            Some(r) => r,
            None => return 0,
        };
        if pivot != col {
            for c in col..n {
                a.swap(pivot * n + c, col * n + c);
            }
            negate = !negate;
        }
        let pval = a[col * n + col];
        det = det * pval % P;
        let pinv = pow_mod(pval, P - 2, P);
        for r in col + 1..n {
            let f = a[r * n + col];
            if f != 0 {
                // factor to *add* so that column `col` cancels
                let mult = (P - f * pinv % P) % P;
                for c in col..n {
                    a[r * n + c] = (a[r * n + c] + mult * a[col * n + c]) % P;
                }
            }
        }
    }
    if negate && det != 0 {
        P - det
    } else {
        det
    }
}

fn det_generic(a: &mut [u64], n: usize, modulus: Modulus) -> u64 {
    let p = modulus.get();
    let mut det = 1u64;
    let mut negate = false;
    for col in 0..n {
        let pivot = match (col..n).find(|&r| a[r * n + col] != 0) {
            Some(r) => r,
            None => return 0,
        };
        if pivot != col {
            for c in col..n {
                a.swap(pivot * n + c, col * n + c);
            }
            negate = !negate;
        }
        let pval = a[col * n + col];
        det = det * pval % p;
        let pinv = modulus.inv_raw(pval).expect("pivot is nonzero");
        for r in col + 1..n {
            let f = a[r * n + col];
            if f != 0 {
                let mult = (p - f * pinv % p) % p;
                for c in col..n {
                    a[r * n + c] = (a[r * n + c] + mult * a[col * n + c]) % p;
                }
            }
        }
    }
    if negate && det != 0 {
        p - det
    } else {
        det
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An element of F_p. Immutable; safe to share between threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: Modulus,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldElement) -> Result<Modulus, Error> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        Ok(self.modulus)
    }

    pub fn add(self, other: FieldElement) -> Result<FieldElement, Error> {
        let m = self.check(other)?;
        Ok(m.element(0).with(m.add_raw(self.value, other.value)))
    }

    pub fn sub(self, other: FieldElement) -> Result<FieldElement, Error> {
        let m = self.check(other)?;
        Ok(m.element(0).with(m.sub_raw(self.value, other.value)))
    }

    pub fn mul(self, other: FieldElement) -> Result<FieldElement, Error> {
        let m = self.check(other)?;
        Ok(m.element(0).with(m.mul_raw(self.value, other.value)))
    }

    pub fn neg(self) -> FieldElement {
        self.with(self.modulus.neg_raw(self.value))
    }

    pub fn inv(self) -> Result<FieldElement, Error> {
        Ok(self.with(self.modulus.inv_raw(self.value)?))
    }

    #[inline]
    fn with(self, value: u64) -> FieldElement {
        FieldElement {
            value,
            modulus: self.modulus,
        }
    }
}
