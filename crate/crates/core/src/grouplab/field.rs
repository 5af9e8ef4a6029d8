//! Finite fields `F_{q^s}` with `q = p^d`, elements encoded as integers.
//!
//! An element `Σ c_i x^i` (coefficients in `0..p`, reduced modulo the defining
//! polynomial) is encoded as `Σ c_i p^i`. The defining polynomial of degree
//! `k = d·s` is the monic irreducible whose lower coefficients have the
//! smallest such encoding.

use serde::Serialize;

pub type Fe = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldSpec {
    pub p: u32,
    pub q: u32,
    pub ext: u32,
}

#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    d: u32,
    s: u32,
    k: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<Fe>,
    log: Vec<u32>,
    add_table: Option<Vec<Fe>>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.s == other.s
    }
}

impl Eq for FiniteField {}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| p % i != 0)
}

/// Polynomial arithmetic over `F_p`, coefficients low to high.
pub(crate) mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let c = r[r.len() - 1] * lead_inv % p;
            let shift = r.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        (1..p).find(|&x| a * x % p == 1).expect("unit")
    }

    pub fn from_index(mut x: u64, p: u32, len: usize) -> Vec<u32> {
        (0..len)
            .map(|_| {
                let c = (x % p as u64) as u32;
                x /= p as u64;
                c
            })
            .collect()
    }

    /// Monic polynomials of degree `deg`, in increasing encoding of the lower coefficients.
    pub fn monic(deg: usize, p: u32) -> impl Iterator<Item = Vec<u32>> {
        let count = (p as u64).pow(deg as u32);
        (0..count).map(move |x| {
            let mut v = from_index(x, p, deg);
            v.push(1);
            v
        })
    }

    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        for dg in 1..=deg / 2 {
            for g in monic(dg, p) {
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    pub fn smallest_irreducible(deg: usize, p: u32) -> Vec<u32> {
        monic(deg, p).find(|f| is_irreducible(f, p)).expect("irreducibles exist in every degree")
    }
}

impl FiniteField {
    /// `F_{q^s}` with `q = p^d`.
    pub fn new(p: u32, d: u32, s: u32) -> Result<Self, String> {
        if !is_prime(p) {
            return Err(format!("{p} is not prime"));
        }
        if d == 0 || s == 0 {
            return Err("degrees must be positive".into());
        }
        let k = d * s;
        let size = (p as u64).checked_pow(k).filter(|&x| x <= 1 << 24).ok_or("field too large")? as u32;
        let modulus = poly::smallest_irreducible(k as usize, p);
        let mut f = FiniteField { p, d, s, k, size, modulus, exp: Vec::new(), log: Vec::new(), add_table: None };
        f.build_tables();
        Ok(f)
    }

    /// Field of order `q^s` given `q` as an integer prime power.
    pub fn from_q(q: u32, s: u32) -> Result<Self, String> {
        let (p, d) = prime_power(q).ok_or_else(|| format!("{q} is not a prime power"))?;
        Self::new(p, d, s)
    }

    fn slow_mul(&self, a: Fe, b: Fe) -> Fe {
        let k = self.k as usize;
        let pa = poly::from_index(a as u64, self.p, k);
        let pb = poly::from_index(b as u64, self.p, k);
        let mut prod = vec![0u32; 2 * k];
        for (i, &x) in pa.iter().enumerate() {
            for (j, &y) in pb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let r = poly::rem(&prod, &self.modulus, self.p);
        self.encode(&r)
    }

    fn encode(&self, coeffs: &[u32]) -> Fe {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn build_tables(&mut self) {
        let n = self.size;
        if n <= 1024 {
            let mut t = vec![0; (n * n) as usize];
            for a in 0..n {
                for b in 0..n {
                    t[(a * n + b) as usize] = self.digit_add(a, b);
                }
            }
            self.add_table = Some(t);
        }
        let order = n - 1;
        for g in 1..n {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = 1;
            loop {
                exp.push(x);
                x = self.slow_mul(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() as u32 == order {
                let mut log = vec![0u32; n as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn digit_add(&self, mut a: Fe, mut b: Fe) -> Fe {
        if self.p == 2 {
            return a ^ b;
        }
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Order of the base field `F_q`.
    pub fn q(&self) -> u32 {
        self.p.pow(self.d)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn ext(&self) -> u32 {
        self.s
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, q: self.q(), ext: self.s }
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> Fe {
        if self.size == 2 {
            1
        } else {
            self.exp[1]
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.add_table {
            Some(t) => t[(a * self.size + b) as usize],
            None => self.digit_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let mut out = 0;
        let mut place = 1;
        let mut x = a;
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let o = self.size - 1;
        let e = (self.log[a as usize] + self.log[b as usize]) % o;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "division by zero");
        let o = self.size - 1;
        self.exp[((o - self.log[a as usize]) % o) as usize]
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let o = (self.size - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % o)) % o) as usize]
    }

    /// `x ↦ x^{q^e}`.
    pub fn frob(&self, a: Fe, e: u32) -> Fe {
        let mut x = a;
        for _ in 0..e % self.s.max(1) {
            x = self.pow(x, self.q() as u64);
        }
        x
    }

    pub fn from_int(&self, c: i64) -> Fe {
        c.rem_euclid(self.p as i64) as Fe
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.size
    }

    /// `{1, x, …, x^{k-1}}`, a basis of the field over `F_p`.
    pub fn additive_basis(&self) -> Vec<Fe> {
        (0..self.k).map(|i| self.p.pow(i)).collect()
    }

    /// Embedding of `small` into `self`; needs the degree of `small` to divide ours.
    pub fn embedding_from(&self, small: &FiniteField) -> Option<Vec<Fe>> {
        if small.p != self.p || self.k % small.k != 0 {
            return None;
        }
        let m = small.modulus();
        let root = self.elements().find(|&b| {
            let mut acc = 0;
            for &c in m.iter().rev() {
                acc = self.add(self.mul(acc, b), c);
            }
            acc == 0
        })?;
        let pw: Vec<Fe> = (0..small.k).map(|i| self.pow(root, i as u64)).collect();
        Some(
            small
                .elements()
                .map(|x| {
                    poly::from_index(x as u64, self.p, small.k as usize)
                        .iter()
                        .zip(&pw)
                        .fold(0, |acc, (&c, &b)| self.add(acc, self.mul(c, b)))
                })
                .collect(),
        )
    }
}

pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|&p| q % p == 0)?;
    let mut d = 0;
    let mut x = q;
    while x % p == 0 {
        x /= p;
        d += 1;
    }
    (x == 1).then_some((p, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for (p, d, s) in [(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 1, 2), (5, 1, 1), (2, 3, 1), (3, 2, 1)] {
            let f = FiniteField::new(p, d, s).unwrap();
            let n = f.size();
            assert_eq!(n, p.pow(d * s));
            for a in 0..n {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..n {
                    assert_eq!(f.mul(a, b), f.slow_mul(a, b));
                    for c in [0, 1, n - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        assert_eq!(lhs, f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_base_field() {
        let f = FiniteField::new(2, 1, 3).unwrap();
        let fixed: Vec<_> = f.elements().filter(|&a| f.frob(a, 1) == a).collect();
        assert_eq!(fixed, vec![0, 1]);
        let f = FiniteField::new(2, 2, 2).unwrap();
        assert_eq!(f.elements().filter(|&a| f.frob(a, 1) == a).count(), 4);
        for a in f.elements() {
            assert_eq!(f.frob(a, 2), a);
        }
    }

    #[test]
    fn modulus_choice() {
        let f = FiniteField::new(2, 2, 1).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let f = FiniteField::new(3, 2, 1).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::new(5, 1, 1).unwrap().modulus(), &[0, 1]);
        assert!(FiniteField::new(4, 1, 1).is_err());
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        let small = FiniteField::new(2, 2, 1).unwrap();
        let big = FiniteField::new(2, 2, 2).unwrap();
        let e = big.embedding_from(&small).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(e[small.add(a, b) as usize], big.add(e[a as usize], e[b as usize]));
                assert_eq!(e[small.mul(a, b) as usize], big.mul(e[a as usize], e[b as usize]));
            }
        }
        assert!(FiniteField::new(2, 1, 3).unwrap().embedding_from(&small).is_none());
    }
}
