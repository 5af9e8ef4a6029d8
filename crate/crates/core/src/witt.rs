//! Truncated Witt vectors `W_m(F_{p^d})` as the Galois ring `GR(p^m, d)`, and
//! the display groups acting on `GL_n` of it.
//!
//! The ring is `Z/p^m[y]/(g)` where `g` is the minimal polynomial of the
//! Teichmüller lift of a root of the smallest monic irreducible of degree `d`
//! over `F_p`. With that choice the Frobenius is `y ↦ y^p`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::grouplab::field::{is_prime, poly};
use crate::grouplab::{FiniteField, ZipDatumGroupLevel, GUARD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WittError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("element is not in the display group (its image is singular)")]
    NotInGroup,
    #[error("matrix is singular")]
    SingularZ,
    #[error("{what} needs {size} elements, above the exhaustion guard of {GUARD}")]
    TooLarge { what: String, size: u128 },
}

/// Ring elements are indices `Σ c_i (p^m)^i` of their coefficient vectors.
pub type Re = u32;

#[derive(Debug, Clone)]
pub struct GaloisRing {
    p: u32,
    d: usize,
    m: u32,
    pm: u32,
    modulus: Vec<u32>,
    size: u32,
    sigma_y: Vec<Vec<u32>>,
    mul_table: Option<Vec<Re>>,
}

const TABLE_LIMIT: u32 = 1024;

impl GaloisRing {
    pub fn new(p: u32, d: usize, m: u32) -> Result<Self, WittError> {
        if !is_prime(p) {
            return Err(WittError::NotPrime(p));
        }
        if d == 0 || m == 0 {
            return Err(WittError::BadParams("d and m must be positive".into()));
        }
        let pm = p.checked_pow(m).ok_or_else(|| WittError::BadParams("p^m overflows".into()))?;
        let size = (pm as u64).checked_pow(d as u32).filter(|&s| s <= u32::MAX as u64 / 2);
        let size = size.ok_or_else(|| WittError::BadParams("ring too large".into()))? as u32;
        let fbar = poly::smallest_irreducible(d, p);
        let modulus = teichmuller_modulus(&fbar, p, pm, d, m);
        let mut r = GaloisRing { p, d, m, pm, modulus, size, sigma_y: Vec::new(), mul_table: None };
        let y = if d == 1 { r.from_coeffs(&[r.teichmuller_root()]) } else { r.from_coeffs(&unit_vec(d, 1, 1)) };
        let yp = r.pow(y, p as u64);
        let mut acc = r.one();
        for _ in 0..d {
            r.sigma_y.push(r.coeffs(acc));
            acc = r.mul(acc, yp);
        }
        if size <= TABLE_LIMIT {
            let mut t = vec![0; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = r.mul_direct(a, b);
                }
            }
            r.mul_table = Some(t);
        }
        Ok(r)
    }

    /// For `d = 1` the ring is `Z/p^m` and the generator is the root of `g`, a constant.
    fn teichmuller_root(&self) -> u32 {
        (self.pm - self.modulus[0]) % self.pm
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn coeffs(&self, a: Re) -> Vec<u32> {
        poly::from_index(a as u64, self.pm, self.d)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Re {
        c.iter().rev().fold(0u32, |acc, &x| acc * self.pm + x % self.pm)
    }

    pub fn from_int(&self, c: i64) -> Re {
        let mut v = vec![0; self.d];
        v[0] = c.rem_euclid(self.pm as i64) as u32;
        self.from_coeffs(&v)
    }

    pub fn zero(&self) -> Re {
        0
    }

    pub fn one(&self) -> Re {
        1
    }

    pub fn add(&self, a: Re, b: Re) -> Re {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        self.from_coeffs(&x.iter().zip(&y).map(|(&u, &v)| (u + v) % self.pm).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: Re) -> Re {
        self.from_coeffs(&self.coeffs(a).iter().map(|&u| (self.pm - u) % self.pm).collect::<Vec<_>>())
    }

    pub fn sub(&self, a: Re, b: Re) -> Re {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Re, b: Re) -> Re {
        match &self.mul_table {
            Some(t) => t[(a * self.size + b) as usize],
            None => self.mul_direct(a, b),
        }
    }

    fn mul_direct(&self, a: Re, b: Re) -> Re {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let pm = self.pm as u64;
        let mut prod = vec![0u64; 2 * self.d - 1];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % pm;
            }
        }
        for k in (self.d..prod.len()).rev() {
            let c = prod[k];
            if c != 0 {
                for (i, &gi) in self.modulus[..self.d].iter().enumerate() {
                    prod[k - self.d + i] = (prod[k - self.d + i] + pm - c * gi as u64 % pm) % pm;
                }
                prod[k] = 0;
            }
        }
        self.from_coeffs(&prod[..self.d].iter().map(|&c| c as u32).collect::<Vec<_>>())
    }

    pub fn pow(&self, a: Re, mut e: u64) -> Re {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn scale_int(&self, c: u32, a: Re) -> Re {
        self.from_coeffs(&self.coeffs(a).iter().map(|&u| (u as u64 * c as u64 % self.pm as u64) as u32).collect::<Vec<_>>())
    }

    pub fn is_unit(&self, a: Re) -> bool {
        self.coeffs(a).iter().any(|&c| c % self.p != 0)
    }

    pub fn inv(&self, a: Re) -> Option<Re> {
        if !self.is_unit(a) {
            return None;
        }
        let q = (self.p as u64).pow(self.d as u32);
        let units = (self.size as u64 / q) * (q - 1);
        Some(self.pow(a, units - 1))
    }

    /// Frobenius: `Σ c_i y^i ↦ Σ c_i y^{pi}`.
    pub fn frobenius(&self, a: Re) -> Re {
        let c = self.coeffs(a);
        let mut out = vec![0u64; self.d];
        for (i, &ci) in c.iter().enumerate() {
            for (k, &s) in self.sigma_y[i].iter().enumerate() {
                out[k] = (out[k] + ci as u64 * s as u64) % self.pm as u64;
            }
        }
        self.from_coeffs(&out.iter().map(|&x| x as u32).collect::<Vec<_>>())
    }

    pub fn frobenius_pow(&self, a: Re, k: usize) -> Re {
        (0..k % self.d).fold(a, |x, _| self.frobenius(x))
    }

    pub fn frobenius_inv(&self, a: Re) -> Re {
        self.frobenius_pow(a, self.d - 1)
    }

    /// `V(x) = p·σ^{-1}(x)`.
    pub fn verschiebung(&self, a: Re) -> Re {
        self.scale_int(self.p, self.frobenius_inv(a))
    }

    /// Reduction modulo `p`, as an element of `F_{p^d}` in the matching encoding.
    pub fn residue(&self, a: Re) -> u32 {
        self.coeffs(a).iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Re> {
        0..self.size
    }
}

fn unit_vec(d: usize, k: usize, v: u32) -> Vec<u32> {
    let mut out = vec![0; d];
    out[k] = v;
    out
}

/// `Π_k (y − τ^{p^k})` with `τ = x^{q^{m-1}}` in `Z/p^m[x]/(f)`.
fn teichmuller_modulus(fbar: &[u32], p: u32, pm: u32, d: usize, m: u32) -> Vec<u32> {
    let pm64 = pm as u64;
    let mulmod = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &u) in a.iter().enumerate() {
            for (j, &v) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % pm64;
            }
        }
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            for i in 0..d {
                prod[k - d + i] = (prod[k - d + i] + pm64 - c * fbar[i] as u64 % pm64) % pm64;
            }
            prod[k] = 0;
        }
        prod.truncate(d);
        prod
    };
    let powmod = |a: &[u64], mut e: u128| -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = vec![0u64; d];
        acc[0] = 1 % pm64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base);
            }
            base = mulmod(&base, &base);
            e >>= 1;
        }
        acc
    };
    let x: Vec<u64> = if d == 1 { vec![(pm64 - fbar[0] as u64) % pm64] } else { unit_vec(d, 1, 1).iter().map(|&v| v as u64).collect() };
    let q = (p as u128).pow(d as u32);
    let tau = powmod(&x, q.pow(m - 1));
    // Polynomial in y with coefficients in the ring, low to high.
    let mut g: Vec<Vec<u64>> = vec![{
        let mut one = vec![0u64; d];
        one[0] = 1;
        one
    }];
    let mut root = tau;
    for _ in 0..d {
        let neg: Vec<u64> = root.iter().map(|&c| (pm64 - c) % pm64).collect();
        let mut next = vec![vec![0u64; d]; g.len() + 1];
        for (k, c) in g.iter().enumerate() {
            for (t, &v) in c.iter().enumerate() {
                next[k + 1][t] = (next[k + 1][t] + v) % pm64;
            }
            let prod = mulmod(c, &neg);
            for (t, &v) in prod.iter().enumerate() {
                next[k][t] = (next[k][t] + v) % pm64;
            }
        }
        g = next;
        root = powmod(&root, p as u128);
    }
    g.iter()
        .map(|c| {
            debug_assert!(c[1..].iter().all(|&v| v == 0), "Frobenius-fixed coefficients are constants");
            c[0] as u32
        })
        .collect()
}

/// Square matrices over a Galois ring, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RMat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Re>,
}

impl RMat {
    pub fn zeros(rows: usize, cols: usize) -> RMat {
        RMat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> RMat {
        let mut m = RMat::zeros(n, n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Re {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Re) {
        self.a[i * self.cols + j] = v;
    }

    pub fn key(&self, size: u32) -> u128 {
        self.a.iter().fold(0u128, |acc, &x| acc * size as u128 + x as u128)
    }

    pub fn from_key(mut key: u128, rows: usize, cols: usize, size: u32) -> RMat {
        let mut a = vec![0; rows * cols];
        for slot in a.iter_mut().rev() {
            *slot = (key % size as u128) as Re;
            key /= size as u128;
        }
        RMat { rows, cols, a }
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn blocks(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> RMat {
        let (r1, c1) = (a.rows, a.cols);
        let n = r1 + c.rows;
        let m = c1 + b.cols;
        let mut out = RMat::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                let v = match (i < r1, j < c1) {
                    (true, true) => a.get(i, j),
                    (true, false) => b.get(i, j - c1),
                    (false, true) => c.get(i - r1, j),
                    (false, false) => d.get(i - r1, j - c1),
                };
                out.set(i, j, v);
            }
        }
        out
    }
}

impl GaloisRing {
    pub fn mat_mul(&self, x: &RMat, y: &RMat) -> RMat {
        assert_eq!(x.cols, y.rows);
        let mut out = RMat::zeros(x.rows, y.cols);
        for i in 0..x.rows {
            for j in 0..y.cols {
                let mut acc = 0;
                for k in 0..x.cols {
                    acc = self.add(acc, self.mul(x.get(i, k), y.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mat_add(&self, x: &RMat, y: &RMat) -> RMat {
        RMat { rows: x.rows, cols: x.cols, a: x.a.iter().zip(&y.a).map(|(&u, &v)| self.add(u, v)).collect() }
    }

    pub fn mat_map(&self, x: &RMat, f: impl Fn(Re) -> Re) -> RMat {
        RMat { rows: x.rows, cols: x.cols, a: x.a.iter().map(|&u| f(u)).collect() }
    }

    /// Inverse by elimination with unit pivots; `None` when the residue matrix is singular.
    pub fn mat_inverse(&self, x: &RMat) -> Option<RMat> {
        let n = x.rows;
        let mut m = x.clone();
        let mut inv = RMat::identity(n);
        for c in 0..n {
            let pr = (c..n).find(|&i| self.is_unit(m.get(i, c)))?;
            for j in 0..n {
                m.a.swap(pr * n + j, c * n + j);
                inv.a.swap(pr * n + j, c * n + j);
            }
            let pinv = self.inv(m.get(c, c)).unwrap();
            for j in 0..n {
                m.set(c, j, self.mul(pinv, m.get(c, j)));
                inv.set(c, j, self.mul(pinv, inv.get(c, j)));
            }
            for i in 0..n {
                let f = m.get(i, c);
                if i != c && f != 0 {
                    for j in 0..n {
                        m.set(i, j, self.sub(m.get(i, j), self.mul(f, m.get(c, j))));
                        inv.set(i, j, self.sub(inv.get(i, j), self.mul(f, inv.get(c, j))));
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self, x: &RMat) -> bool {
        self.mat_inverse(x).is_some()
    }
}

/// Element of `K_{μ,m}`: blocks `A, B̃, C, D` with `B = V(B̃)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DisplayGroupElement {
    pub a: RMat,
    pub b_pre: RMat,
    pub c: RMat,
    pub d: RMat,
}

/// `K_{μ,m}` for `GL_n` with the cocharacter splitting `n = d_block + (n − d_block)`.
#[derive(Debug, Clone)]
pub struct DisplayGroup {
    pub ring: GaloisRing,
    pub n: usize,
    pub d_block: usize,
}

impl DisplayGroup {
    pub fn new(ring: GaloisRing, n: usize, d_block: usize) -> Result<Self, WittError> {
        if n == 0 || d_block > n {
            return Err(WittError::BadParams(format!("need 0 ≤ d ≤ n and n ≥ 1, got d = {d_block}, n = {n}")));
        }
        Ok(DisplayGroup { ring, n, d_block })
    }

    fn e(&self) -> usize {
        self.n - self.d_block
    }

    pub fn identity(&self) -> DisplayGroupElement {
        let (d, e) = (self.d_block, self.e());
        DisplayGroupElement { a: RMat::identity(d), b_pre: RMat::zeros(d, e), c: RMat::zeros(e, d), d: RMat::identity(e) }
    }

    fn p_sigma_inv(&self, x: &RMat) -> RMat {
        let r = &self.ring;
        r.mat_map(x, |u| r.verschiebung(u))
    }

    fn sigma(&self, x: &RMat) -> RMat {
        let r = &self.ring;
        r.mat_map(x, |u| r.frobenius(u))
    }

    fn iota_raw(&self, x: &DisplayGroupElement) -> RMat {
        RMat::blocks(&x.a, &self.p_sigma_inv(&x.b_pre), &x.c, &x.d)
    }

    fn sigma_mu_raw(&self, x: &DisplayGroupElement) -> RMat {
        let r = &self.ring;
        let pc = r.mat_map(&self.sigma(&x.c), |u| r.scale_int(r.p, u));
        RMat::blocks(&self.sigma(&x.a), &x.b_pre, &pc, &self.sigma(&x.d))
    }

    /// `(A, p·σ^{-1}(B̃); C, D)`.
    pub fn iota(&self, x: &DisplayGroupElement) -> Result<RMat, WittError> {
        let m = self.iota_raw(x);
        if self.ring.is_invertible(&m) {
            Ok(m)
        } else {
            Err(WittError::NotInGroup)
        }
    }

    /// `(σA, B̃; pσC, σD)`.
    pub fn sigma_mu(&self, x: &DisplayGroupElement) -> Result<RMat, WittError> {
        let m = self.sigma_mu_raw(x);
        if self.ring.is_invertible(&m) {
            Ok(m)
        } else {
            Err(WittError::NotInGroup)
        }
    }

    pub fn mul(&self, x: &DisplayGroupElement, y: &DisplayGroupElement) -> DisplayGroupElement {
        let r = &self.ring;
        let mm = |a: &RMat, b: &RMat| r.mat_mul(a, b);
        let add = |a: &RMat, b: &RMat| r.mat_add(a, b);
        DisplayGroupElement {
            a: add(&mm(&x.a, &y.a), &mm(&self.p_sigma_inv(&x.b_pre), &y.c)),
            b_pre: add(&mm(&self.sigma(&x.a), &y.b_pre), &mm(&x.b_pre, &self.sigma(&y.d))),
            c: add(&mm(&x.c, &y.a), &mm(&x.d, &y.c)),
            d: add(&mm(&x.c, &self.p_sigma_inv(&y.b_pre)), &mm(&x.d, &y.d)),
        }
    }

    fn split(&self, m: &RMat) -> (RMat, RMat, RMat, RMat) {
        let (d, e) = (self.d_block, self.e());
        let sub = |r0: usize, c0: usize, rows: usize, cols: usize| {
            let mut out = RMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    out.set(i, j, m.get(r0 + i, c0 + j));
                }
            }
            out
        };
        (sub(0, 0, d, d), sub(0, d, d, e), sub(d, 0, e, d), sub(d, d, e, e))
    }

    /// `A, C, D` from `ι(x)^{-1}`, `B̃` from `σ_μ(x)^{-1}`.
    pub fn inverse(&self, x: &DisplayGroupElement) -> Result<DisplayGroupElement, WittError> {
        let r = &self.ring;
        let i = r.mat_inverse(&self.iota(x)?).ok_or(WittError::NotInGroup)?;
        let s = r.mat_inverse(&self.sigma_mu(x)?).ok_or(WittError::NotInGroup)?;
        let (a, _, c, d) = self.split(&i);
        let (_, b_pre, _, _) = self.split(&s);
        Ok(DisplayGroupElement { a, b_pre, c, d })
    }

    /// `(x, z) ↦ ι(x)·z·σ_μ(x)^{-1}`.
    pub fn act(&self, x: &DisplayGroupElement, z: &RMat) -> Result<RMat, WittError> {
        let r = &self.ring;
        if !r.is_invertible(z) {
            return Err(WittError::SingularZ);
        }
        let si = r.mat_inverse(&self.sigma_mu(x)?).ok_or(WittError::NotInGroup)?;
        Ok(r.mat_mul(&r.mat_mul(&self.iota(x)?, z), &si))
    }

    fn size_bound(&self) -> u128 {
        (self.ring.size() as u128).saturating_pow((self.n * self.n) as u32)
    }

    /// Every element of `K_{μ,m}`.
    pub fn elements(&self) -> Result<Vec<DisplayGroupElement>, WittError> {
        let size = self.size_bound();
        if size > GUARD {
            return Err(WittError::TooLarge { what: "display group".into(), size });
        }
        let rs = self.ring.size();
        let (d, e) = (self.d_block, self.e());
        let mut out = Vec::new();
        for key in 0..size {
            let all = RMat::from_key(key, 1, self.n * self.n, rs).a;
            let (a, rest) = all.split_at(d * d);
            let (b, rest) = rest.split_at(d * e);
            let (c, dd) = rest.split_at(e * d);
            let x = DisplayGroupElement {
                a: RMat { rows: d, cols: d, a: a.to_vec() },
                b_pre: RMat { rows: d, cols: e, a: b.to_vec() },
                c: RMat { rows: e, cols: d, a: c.to_vec() },
                d: RMat { rows: e, cols: e, a: dd.to_vec() },
            };
            if self.ring.is_invertible(&self.iota_raw(&x)) {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Every point of `K_m = GL_n(W_m)`.
    pub fn points(&self) -> Result<Vec<RMat>, WittError> {
        let size = self.size_bound();
        if size > GUARD {
            return Err(WittError::TooLarge { what: "GL_n(W_m)".into(), size });
        }
        let rs = self.ring.size();
        Ok((0..size).map(|k| RMat::from_key(k, self.n, self.n, rs)).filter(|z| self.ring.is_invertible(z)).collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WittCensus {
    pub group_order: usize,
    pub orbits: Vec<Vec<u128>>,
}

/// Orbits of `K_{μ,m}` on `GL_n(W_m)`, each computed as the full image of a representative.
pub fn orbit_census_level(n: usize, p: u32, d: usize, m: u32, d_block: usize) -> Result<WittCensus, WittError> {
    let g = DisplayGroup::new(GaloisRing::new(p, d, m)?, n, d_block)?;
    let size = g.ring.size();
    let elems = g.elements()?;
    let pairs: Vec<(RMat, RMat)> = elems
        .iter()
        .map(|x| Ok((g.iota(x)?, g.ring.mat_inverse(&g.sigma_mu(x)?).ok_or(WittError::NotInGroup)?)))
        .collect::<Result<_, WittError>>()?;
    let points = g.points()?;
    let mut seen: HashSet<u128> = HashSet::new();
    let mut orbits = Vec::new();
    for z in &points {
        let k = z.key(size);
        if seen.contains(&k) {
            continue;
        }
        let mut o: Vec<u128> = pairs.iter().map(|(a, b)| g.ring.mat_mul(&g.ring.mat_mul(a, z), b).key(size)).collect();
        o.sort_unstable();
        o.dedup();
        seen.extend(o.iter().copied());
        orbits.push(o);
    }
    Ok(WittCensus { group_order: elems.len(), orbits })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub params: ReductionParams,
    pub orbits_m: usize,
    pub orbits_1: usize,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionParams {
    pub n: usize,
    pub p: u32,
    pub d: usize,
    pub m: u32,
    pub d_block: usize,
}

/// Reduction mod `p` of every level-`m` orbit must land in a single level-1 orbit.
pub fn check_reduction(n: usize, p: u32, d: usize, m: u32, d_block: usize) -> Result<ReductionReport, WittError> {
    let high = orbit_census_level(n, p, d, m, d_block)?;
    let low = orbit_census_level(n, p, d, 1, d_block)?;
    let rm = GaloisRing::new(p, d, m)?;
    let r1 = GaloisRing::new(p, d, 1)?;
    let mut index = HashMap::new();
    for (k, o) in low.orbits.iter().enumerate() {
        for &z in o {
            index.insert(z, k);
        }
    }
    let reduce = |key: u128| {
        let z = RMat::from_key(key, n, n, rm.size());
        let red = rm.mat_map(&z, |u| rm.residue(u));
        red.key(r1.size())
    };
    let mut violations = Vec::new();
    for (k, o) in high.orbits.iter().enumerate() {
        let targets: HashSet<usize> = o.iter().map(|&z| index[&reduce(z)]).collect();
        if targets.len() != 1 {
            let mut t: Vec<usize> = targets.into_iter().collect();
            t.sort_unstable();
            violations.push(format!("level-{m} orbit {k} reduces into level-1 orbits {t:?}"));
        }
    }
    Ok(ReductionReport {
        params: ReductionParams { n, p, d, m, d_block },
        orbits_m: high.orbits.len(),
        orbits_1: low.orbits.len(),
        violations,
    })
}

/// The level-1 census as a partition of `GL_n(F_{p^d})` in the grouplab encoding, next to the zip-action census.
pub fn level_one_partitions(n: usize, p: u32, d: usize, d_block: usize) -> Result<(Vec<Vec<u128>>, Vec<Vec<u128>>), WittError> {
    let census = orbit_census_level(n, p, d, 1, d_block)?;
    let blocks: Vec<usize> = [d_block, n - d_block].into_iter().filter(|&b| b > 0).collect();
    let datum = ZipDatumGroupLevel::gl(&blocks).map_err(|e| WittError::BadParams(e.to_string()))?;
    let field = FiniteField::from_q(p, d as u32).map_err(WittError::BadParams)?;
    let zip = datum.census(&field).map_err(|e| WittError::BadParams(e.to_string()))?;
    let mut a = census.orbits;
    a.sort();
    let mut b = zip.orbits;
    b.sort();
    Ok((a, b))
}
