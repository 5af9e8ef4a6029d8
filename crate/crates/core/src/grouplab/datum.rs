//! Group-level zip data on `GL_n` built from pattern subgroups.
//!
//! A pattern subgroup is the set of invertible matrices supported on a
//! fixed 0/1 mask. Block parabolics, their Levi factors and every group met
//! while running the reduction procedure are of this shape, so one type
//! covers the whole recursion.

use serde::Serialize;

use super::field::FiniteField;
use super::mat::{gl_order, Mat};
use super::{guard, partition_orbits, LabError, OrbitCensus};
use crate::coxeter::{Family, Parabolic, WeylElement, WeylGroup};
use crate::zipdatum::zip_from_cocharacter;

/// Composition `a ∘ b` of permutations of `0..n`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&k| a[k]).collect()
}

pub fn invert(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x] = i;
    }
    out
}

pub fn inversions(a: &[usize]) -> usize {
    (0..a.len()).map(|i| (i + 1..a.len()).filter(|&j| a[i] > a[j]).count()).sum()
}

/// 0-based permutation of a type-A Weyl element.
pub fn perm_of(w: &WeylElement) -> Vec<usize> {
    w.perm().iter().map(|&x| (x - 1) as usize).collect()
}

pub fn weyl_of_perm(g: &WeylGroup, p: &[usize]) -> WeylElement {
    g.element(p.iter().map(|&x| x as i8 + 1).collect()).expect("permutation of the right degree")
}

/// `I` for the block-diagonal Levi with the given block sizes (simple reflections are 1-based).
pub fn block_parabolic(blocks: &[usize]) -> Parabolic {
    let n: usize = blocks.iter().sum();
    let mut cut = std::collections::BTreeSet::new();
    let mut acc = 0;
    for &b in &blocks[..blocks.len().saturating_sub(1)] {
        acc += b;
        cut.insert(acc);
    }
    Parabolic((1..n).filter(|i| !cut.contains(i)).collect())
}

fn block_index(blocks: &[usize]) -> Vec<usize> {
    blocks.iter().enumerate().flat_map(|(k, &b)| std::iter::repeat(k).take(b)).collect()
}

fn check_blocks(blocks: &[usize]) -> Result<usize, LabError> {
    if blocks.is_empty() || blocks.contains(&0) {
        return Err(LabError::BadDatum(format!("block sizes must be positive, got {blocks:?}")));
    }
    Ok(blocks.iter().sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Pattern {
    n: usize,
    mask: Vec<bool>,
}

impl Pattern {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Pattern {
        let mask = (0..n * n).map(|k| k / n == k % n || f(k / n, k % n)).collect();
        Pattern { n, mask }
    }

    pub fn full(n: usize) -> Pattern {
        Pattern::from_fn(n, |_, _| true)
    }

    pub fn block_diagonal(blocks: &[usize]) -> Pattern {
        let b = block_index(blocks);
        Pattern::from_fn(b.len(), |i, j| b[i] == b[j])
    }

    pub fn upper_block(blocks: &[usize]) -> Pattern {
        let b = block_index(blocks);
        Pattern::from_fn(b.len(), |i, j| b[i] <= b[j])
    }

    pub fn lower_block(blocks: &[usize]) -> Pattern {
        let b = block_index(blocks);
        Pattern::from_fn(b.len(), |i, j| b[i] >= b[j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n + j]
    }

    pub fn levi(&self) -> Pattern {
        Pattern::from_fn(self.n, |i, j| self.has(i, j) && self.has(j, i))
    }

    pub fn unipotent_positions(&self) -> Vec<(usize, usize)> {
        self.positions().into_iter().filter(|&(i, j)| !self.has(j, i)).collect()
    }

    pub fn positions(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| (0..self.n).map(move |j| (i, j))).filter(|&(i, j)| self.has(i, j)).collect()
    }

    /// Coordinate blocks of the Levi factor, each sorted, ordered by first index.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for i in 0..self.n {
            if !seen[i] {
                let b: Vec<usize> = (0..self.n).filter(|&j| self.has(i, j) && self.has(j, i)).collect();
                for &j in &b {
                    seen[j] = true;
                }
                out.push(b);
            }
        }
        out
    }

    pub fn intersect(&self, other: &Pattern) -> Pattern {
        Pattern::from_fn(self.n, |i, j| self.has(i, j) && other.has(i, j))
    }

    pub fn is_subset(&self, other: &Pattern) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Mask of `x·P·x^{-1}` for the permutation matrix of `x`.
    pub fn conjugate(&self, x: &[usize]) -> Pattern {
        let xi = invert(x);
        Pattern::from_fn(self.n, |i, j| self.has(xi[i], xi[j]))
    }

    /// Number of points over a field with `big_q` elements.
    pub fn order(&self, big_q: u128) -> u128 {
        let levi: u128 = self.blocks().iter().map(|b| gl_order(b.len(), big_q)).product();
        levi * big_q.pow(self.unipotent_positions().len() as u32)
    }

    pub fn supports(&self, m: &Mat) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| m.get(i, j) == 0 || self.has(i, j)))
    }

    /// Levi projection: keep the entries on the Levi mask.
    pub fn project(&self, m: &Mat) -> Mat {
        let mut out = m.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if !(self.has(i, j) && self.has(j, i)) {
                    out.set(i, j, 0);
                }
            }
        }
        out
    }

    /// Every point over `f`.
    pub fn points(&self, f: &FiniteField) -> Result<Vec<Mat>, LabError> {
        let big_q = f.size() as u128;
        guard("pattern group", self.order(big_q))?;
        let mut levis = vec![Mat::zeros(self.n, self.n)];
        for b in self.blocks() {
            let k = b.len();
            guard("block matrices", big_q.pow((k * k) as u32))?;
            let inv: Vec<Mat> = (0..big_q.pow((k * k) as u32))
                .map(|key| Mat::from_key(key, k, f.size()))
                .filter(|m| f.is_invertible(m))
                .collect();
            let mut next = Vec::with_capacity(levis.len() * inv.len());
            for base in &levis {
                for m in &inv {
                    let mut x = base.clone();
                    for (r, &i) in b.iter().enumerate() {
                        for (c, &j) in b.iter().enumerate() {
                            x.set(i, j, m.get(r, c));
                        }
                    }
                    next.push(x);
                }
            }
            levis = next;
        }
        let unip = self.unipotent_positions();
        let mut out = levis;
        for &(i, j) in &unip {
            let mut next = Vec::with_capacity(out.len() * f.size() as usize);
            for base in &out {
                for c in f.elements() {
                    let mut x = base.clone();
                    x.set(i, j, c);
                    next.push(x);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Unipotent radical points `1 + N`, `N` supported on the unipotent positions.
    pub fn unipotent_points(&self, f: &FiniteField) -> Result<Vec<Mat>, LabError> {
        let unip = self.unipotent_positions();
        guard("unipotent radical", (f.size() as u128).pow(unip.len() as u32))?;
        let mut out = vec![Mat::identity(self.n)];
        for &(i, j) in &unip {
            out = out
                .iter()
                .flat_map(|base| {
                    f.elements().map(move |c| {
                        let mut x = base.clone();
                        x.set(i, j, c);
                        x
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Permutations of `0..n` preserving every Levi block: the Weyl group of the Levi factor.
    pub fn weyl_elements(&self) -> Vec<Vec<usize>> {
        let mut out = vec![(0..self.n).collect::<Vec<usize>>()];
        for b in self.blocks() {
            let perms = permutations(b.len());
            out = out
                .iter()
                .flat_map(|base| {
                    perms.iter().map(|p| {
                        let mut x = base.clone();
                        for (r, &i) in b.iter().enumerate() {
                            x[i] = b[p[r]];
                        }
                        x
                    })
                })
                .collect();
        }
        out
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// `y ↦ Frob^exp(π·y·π^{-1})`, with `Frob` the entrywise `q`-power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Twist {
    pub perm: Vec<usize>,
    pub exp: u32,
}

impl Twist {
    pub fn frobenius(n: usize) -> Twist {
        Twist { perm: (0..n).collect(), exp: 1 }
    }

    pub fn identity(n: usize) -> Twist {
        Twist { perm: (0..n).collect(), exp: 0 }
    }

    pub fn apply(&self, f: &FiniteField, y: &Mat) -> Mat {
        let n = y.rows;
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(self.perm[i], self.perm[j], f.frob(y.get(i, j), self.exp));
            }
        }
        out
    }

    /// The twist on permutation matrices, where the Frobenius acts trivially.
    pub fn apply_perm(&self, u: &[usize]) -> Vec<usize> {
        compose(&compose(&self.perm, u), &invert(&self.perm))
    }
}

/// Zip datum `(G, P, P', φ)` realized inside `GL_n`.
///
/// `ambient` is the group `G` (block diagonal), `p_right` is `P`, `p_left`
/// is `P'`, and `twist` maps the Levi of `P'` onto the Levi of `P`. The
/// base point `g0` is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ZipDatumGroupLevel {
    pub n: usize,
    pub ambient: Pattern,
    pub p_left: Pattern,
    pub p_right: Pattern,
    pub twist: Twist,
}

/// Action generator `g ↦ a·g·b_inv`.
pub type Generator = (Mat, Mat);

impl ZipDatumGroupLevel {
    pub fn new(ambient: Pattern, p_left: Pattern, p_right: Pattern, twist: Twist) -> Result<Self, LabError> {
        let n = ambient.n();
        if p_left.n() != n || p_right.n() != n || twist.perm.len() != n {
            return Err(LabError::BadDatum("size mismatch".into()));
        }
        if ambient.levi() != ambient {
            return Err(LabError::BadDatum("ambient group is not block diagonal".into()));
        }
        if !p_left.is_subset(&ambient) || !p_right.is_subset(&ambient) {
            return Err(LabError::BadDatum("parabolics must lie in the ambient group".into()));
        }
        let mut sorted = twist.perm.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(LabError::BadDatum("twist permutation is not a bijection".into()));
        }
        if p_left.levi().conjugate(&twist.perm) != p_right.levi() {
            return Err(LabError::BadDatum("twist does not carry the Levi of P' onto the Levi of P".into()));
        }
        Ok(ZipDatumGroupLevel { n, ambient, p_left, p_right, twist })
    }

    /// `GL_n` with `P` upper block, `P'` lower block and the Frobenius on the common Levi.
    pub fn gl(blocks: &[usize]) -> Result<Self, LabError> {
        let n = check_blocks(blocks)?;
        Self::new(Pattern::full(n), Pattern::lower_block(blocks), Pattern::upper_block(blocks), Twist::frobenius(n))
    }

    /// `P = P' = G`, so `E_Z` is the graph of the twist.
    pub fn terminal(n: usize, twist: Twist) -> Result<Self, LabError> {
        Self::new(Pattern::full(n), Pattern::full(n), Pattern::full(n), twist)
    }

    pub fn is_terminal(&self) -> bool {
        self.p_left == self.ambient && self.p_right == self.ambient
    }

    /// `|E_Z(F_Q)| = |P'(F_Q)|·Q^{dim U}`.
    pub fn zip_group_order(&self, big_q: u128) -> u128 {
        self.p_left.order(big_q) * big_q.pow(self.p_right.unipotent_positions().len() as u32)
    }

    pub fn act(&self, f: &FiniteField, pair: &(Mat, Mat), g: &Mat) -> Result<Mat, LabError> {
        let pinv = f.inverse(&pair.1).ok_or(LabError::Singular)?;
        Ok(f.mat_mul(&f.mat_mul(&pair.0, g), &pinv))
    }

    pub fn contains_pair(&self, f: &FiniteField, pair: &(Mat, Mat)) -> bool {
        let (a, b) = pair;
        f.is_invertible(a)
            && f.is_invertible(b)
            && self.p_left.supports(a)
            && self.p_right.supports(b)
            && self.p_right.project(b) == self.twist.apply(f, &self.p_left.project(a))
    }

    /// A generating set of `E_Z(F_Q)`, as pairs `(p', p^{-1})`.
    pub fn generators(&self, f: &FiniteField) -> Vec<Generator> {
        let n = self.n;
        let id = Mat::identity(n);
        let basis = f.additive_basis();
        let elem = |i: usize, j: usize, c| {
            let mut m = Mat::identity(n);
            m.set(i, j, c);
            m
        };
        let mut out = Vec::new();
        for &(i, j) in &self.p_left.unipotent_positions() {
            for &c in &basis {
                out.push((elem(i, j, c), id.clone()));
            }
        }
        for &(i, j) in &self.p_right.unipotent_positions() {
            for &c in &basis {
                out.push((id.clone(), elem(i, j, f.neg(c))));
            }
        }
        let levi = self.p_left.levi();
        let mut levi_gens = Vec::new();
        for (i, j) in levi.positions() {
            if i != j {
                for &c in &basis {
                    levi_gens.push(elem(i, j, c));
                }
            } else if f.size() > 2 {
                levi_gens.push(elem(i, i, f.primitive()));
            }
        }
        for l in levi_gens {
            let t = self.twist.apply(f, &l);
            let tinv = f.inverse(&t).expect("twist of an invertible matrix");
            out.push((l, tinv));
        }
        out
    }

    /// Every point of `E_Z(F_Q)`.
    pub fn zip_group_points(&self, f: &FiniteField) -> Result<Vec<(Mat, Mat)>, LabError> {
        guard("zip group", self.zip_group_order(f.size() as u128))?;
        let unip = self.p_right.unipotent_points(f)?;
        let mut out = Vec::new();
        for a in self.p_left.points(f)? {
            let l = self.twist.apply(f, &self.p_left.project(&a));
            for u in &unip {
                out.push((a.clone(), f.mat_mul(&l, u)));
            }
        }
        Ok(out)
    }

    /// Exact stabilizer of `g` inside `E_Z(F_Q)`.
    pub fn stabilizer(&self, f: &FiniteField, g: &Mat) -> Result<Vec<(Mat, Mat)>, LabError> {
        let ginv = f.inverse(g).ok_or(LabError::Singular)?;
        let mut out = Vec::new();
        for a in self.p_left.points(f)? {
            let b = f.mat_mul(&f.mat_mul(&ginv, &a), g);
            if self.p_right.supports(&b) && self.p_right.project(&b) == self.twist.apply(f, &self.p_left.project(&a)) {
                out.push((a, b));
            }
        }
        Ok(out)
    }

    /// Exact partition of `G(F_Q)` into `E_Z(F_Q)`-orbits, with stabilizers computed by enumeration.
    pub fn census(&self, f: &FiniteField) -> Result<OrbitCensus<u128>, LabError> {
        let size = f.size();
        let n = self.n;
        let elements: Vec<u128> = self.ambient.points(f)?.iter().map(|m| m.key(size)).collect();
        let gens = self.generators(f);
        let orbits = partition_orbits(&elements, |k| {
            let g = Mat::from_key(k, n, size);
            gens.iter().map(|(a, b)| f.mat_mul(&f.mat_mul(a, &g), b).key(size)).collect()
        });
        let mut stabilizer_orders = Vec::with_capacity(orbits.len());
        for o in &orbits {
            stabilizer_orders.push(self.stabilizer(f, &Mat::from_key(o[0], n, size))?.len() as u128);
        }
        Ok(OrbitCensus {
            action_tag: "zip".into(),
            group_order: self.zip_group_order(size as u128),
            orbits,
            stabilizer_orders,
        })
    }

    /// Canonical element of `W_{L'}·y·W_L` (fewest inversions, then lexicographic),
    /// with `u ∈ W_{L'}` and `v ∈ W_L` such that `y = u·x·v`.
    pub fn canonical_cell(&self, y: &[usize]) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>), LabError> {
        let left = self.p_left.levi().weyl_elements();
        let right = self.p_right.levi().weyl_elements();
        guard("double coset", (left.len() * right.len()) as u128)?;
        let mut best: Option<((usize, Vec<usize>), Vec<usize>, Vec<usize>)> = None;
        for a in &left {
            let ay = compose(a, y);
            for b in &right {
                let x = compose(&ay, b);
                let key = (inversions(&x), x);
                if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
                    best = Some((key, invert(a), invert(b)));
                }
            }
        }
        let ((_, x), u, v) = best.expect("nonempty double coset");
        Ok((x, u, v))
    }

    /// Bruhat cell `P'·ẋ·P` of an invertible matrix, as the canonical permutation `x`.
    ///
    /// Needs `P'` to contain the lower and `P` the upper triangular matrices. The
    /// rank of every top-left submatrix is invariant under `B^-×B`, and for a
    /// permutation matrix these ranks determine the permutation.
    pub fn bruhat_cell(&self, f: &FiniteField, g: &Mat) -> Result<Vec<usize>, LabError> {
        let n = self.n;
        let lower = Pattern::from_fn(n, |i, j| i >= j);
        let upper = Pattern::from_fn(n, |i, j| i <= j);
        if !lower.is_subset(&self.p_left) || !upper.is_subset(&self.p_right) {
            return Err(LabError::BadDatum("cell extraction needs P' ⊇ B^- and P ⊇ B".into()));
        }
        if !f.is_invertible(g) {
            return Err(LabError::Singular);
        }
        let rank = |i: usize, j: usize| -> usize {
            if i == 0 || j == 0 {
                return 0;
            }
            let rows: Vec<Vec<_>> = (0..i).map(|r| (0..j).map(|c| g.get(r, c)).collect()).collect();
            f.rank(&Mat::from_rows(&rows))
        };
        let mut w = vec![0; n];
        for (j, slot) in w.iter_mut().enumerate() {
            *slot = (1..=n).find(|&i| rank(i, j + 1) > rank(i, j)).expect("invertible matrix has full column rank") - 1;
        }
        Ok(self.canonical_cell(&w)?.0)
    }

    /// The datum `(L, Q, Q', ψ)` attached to the cell of `x`.
    pub fn reduce(&self, x: &[usize]) -> Result<ZipDatumGroupLevel, LabError> {
        let l = self.p_right.levi();
        let lp = self.p_left.levi();
        let q_left = l.intersect(&self.p_left.conjugate(&invert(x)));
        let q_right = lp.intersect(&self.p_right.conjugate(x)).conjugate(&self.twist.perm);
        let twist = Twist { perm: compose(&self.twist.perm, x), exp: self.twist.exp };
        ZipDatumGroupLevel::new(l, q_left, q_right, twist)
    }

    /// For a permutation `y`: its cell `x` and a slice `l ∈ W_L` with `ẏ` in the orbit of `ẋ·l`.
    pub fn slice(&self, y: &[usize]) -> Result<(Vec<usize>, Vec<usize>), LabError> {
        let (x, u, v) = self.canonical_cell(y)?;
        let l = compose(&v, &self.twist.apply_perm(&u));
        Ok((x, l))
    }

    /// Sequence of cells met by the reduction procedure starting from the permutation `y`.
    pub fn chain(&self, y: &[usize]) -> Result<Vec<Vec<usize>>, LabError> {
        let mut out = Vec::new();
        let mut d = self.clone();
        let mut y = y.to_vec();
        while !d.is_terminal() {
            let (x, l) = d.slice(&y)?;
            d = d.reduce(&x)?;
            out.push(x);
            y = l;
        }
        Ok(out)
    }

    /// Number of `F_Q`-points of the stratum through the permutation `y`.
    ///
    /// Each reduction step multiplies by `|E_Z| / (Q^k·|E_{Z_n}|)` with `k`
    /// the dimension of `U' ∩ xUx^{-1}`; the terminal stratum is the whole
    /// ambient group.
    pub fn stratum_count(&self, y: &[usize], big_q: u128) -> Result<u128, LabError> {
        if self.is_terminal() {
            return Ok(self.ambient.order(big_q));
        }
        let (x, l) = self.slice(y)?;
        let next = self.reduce(&x)?;
        let moved = self.p_right.conjugate(&x);
        let k = self.p_left.unipotent_positions().iter().filter(|&&(i, j)| moved.has(i, j) && !moved.has(j, i)).count();
        let num = self.zip_group_order(big_q) * next.stratum_count(&l, big_q)?;
        let den = big_q.pow(k as u32) * next.zip_group_order(big_q);
        if num % den != 0 {
            return Err(LabError::BadDatum(format!("non-integral point count {num}/{den}")));
        }
        Ok(num / den)
    }
}

/// Strata of the `GL_n` datum with given blocks, each with its standard representative `ẇ·θ̇0`.
#[derive(Debug, Clone, Serialize)]
pub struct StandardForms {
    pub blocks: Vec<usize>,
    pub parabolic: Vec<usize>,
    pub strata: Vec<Vec<usize>>,
    pub words: Vec<Vec<usize>>,
    pub lengths: Vec<usize>,
    pub reps: Vec<Vec<usize>>,
}

impl StandardForms {
    pub fn gl(blocks: &[usize]) -> Result<Self, LabError> {
        let n = check_blocks(blocks)?;
        let g = WeylGroup::new(Family::A, n - 1).map_err(|e| LabError::BadDatum(e.to_string()))?;
        let i = block_parabolic(blocks);
        let delta: Vec<usize> = (1..n).collect();
        let z = zip_from_cocharacter(&g, &i, &delta).map_err(|e| LabError::BadDatum(e.to_string()))?;
        let carrier = z.carrier();
        Ok(StandardForms {
            blocks: blocks.to_vec(),
            parabolic: i.to_vec(),
            strata: carrier.iter().map(perm_of).collect(),
            words: carrier.iter().map(|w| g.reduced_word(w)).collect(),
            lengths: carrier.iter().map(|w| g.length(w)).collect(),
            reps: carrier.iter().map(|w| perm_of(&g.mul(w, z.theta0()))).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn rep_matrix(&self, k: usize) -> Mat {
        Mat::perm(&self.reps[k])
    }

    /// Index of the stratum whose representative has the given reduction chain.
    pub fn index_of_chain(&self, d: &ZipDatumGroupLevel, chain: &[Vec<usize>]) -> Result<Option<usize>, LabError> {
        for k in 0..self.len() {
            if d.chain(&self.reps[k])? == chain {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// Result of locating a matrix among the standard representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Located {
    /// `explored` counts the orbit elements visited before the hit.
    Found { stratum: usize, ext: u32, explored: usize },
    Undetermined { max_ext: u32 },
}

impl StandardForms {
    /// Stratum of `g ∈ GL_n(F_{q^s})`: for each `s'` with `s | s' ≤ max_ext`, the
    /// `E_Z(F_{q^{s'}})`-orbit of `g` is searched until it meets a standard representative.
    pub fn locate(&self, d: &ZipDatumGroupLevel, f: &FiniteField, g: &Mat, max_ext: u32) -> Result<Located, LabError> {
        if !f.is_invertible(g) {
            return Err(LabError::Singular);
        }
        let s = f.ext();
        let mut ext = s;
        while ext <= max_ext {
            let big = FiniteField::from_q(f.q(), ext).map_err(LabError::Field)?;
            let table = big.embedding_from(f).ok_or_else(|| LabError::Field("no embedding".into()))?;
            let start = big.mat_embed(&table, g);
            let size = big.size();
            let reps: Vec<u128> = (0..self.len()).map(|k| self.rep_matrix(k).key(size)).collect();
            let gens = d.generators(&big);
            if let Some((stratum, seen)) = search_orbit(start.key(size), &reps, |k| {
                let x = Mat::from_key(k, d.n, size);
                gens.iter().map(|(a, b)| big.mat_mul(&big.mat_mul(a, &x), b).key(size)).collect()
            })? {
                return Ok(Located::Found { stratum, ext, explored: seen });
            }
            ext += s;
        }
        Ok(Located::Undetermined { max_ext })
    }
}

/// Breadth-first search of an orbit, stopping at the first target; `None` once the orbit is exhausted.
fn search_orbit(
    start: u128,
    targets: &[u128],
    mut step: impl FnMut(u128) -> Vec<u128>,
) -> Result<Option<(usize, usize)>, LabError> {
    let hit = |k: u128| targets.iter().position(|&t| t == k);
    if let Some(t) = hit(start) {
        return Ok(Some((t, 1)));
    }
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    seen.insert(start);
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        for y in step(x) {
            if seen.insert(y) {
                if let Some(t) = hit(y) {
                    return Ok(Some((t, seen.len())));
                }
                guard("orbit", seen.len() as u128)?;
                queue.push_back(y);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn ff(q: u32, s: u32) -> FiniteField {
        FiniteField::from_q(q, s).unwrap()
    }

    const TYPES: &[&[usize]] = &[&[1, 1], &[2], &[1, 1, 1], &[2, 1], &[1, 2], &[3]];

    #[test]
    fn pattern_orders_match_enumeration() {
        let f = ff(2, 1);
        for b in TYPES {
            for p in [Pattern::upper_block(b), Pattern::lower_block(b), Pattern::block_diagonal(b)] {
                assert_eq!(p.points(&f).unwrap().len() as u128, p.order(2));
            }
        }
        assert_eq!(Pattern::full(2).points(&ff(3, 1)).unwrap().len(), 48);
        assert_eq!(Pattern::upper_block(&[1, 1]).points(&f).unwrap().len(), 2);
    }

    #[test]
    fn block_parabolic_rule() {
        assert!(block_parabolic(&[1, 1]).is_empty());
        assert_eq!(block_parabolic(&[1, 20, 1]).to_vec(), (2..=20).collect::<Vec<_>>());
        assert_eq!(block_parabolic(&[4]).to_vec(), vec![1, 2, 3]);
    }

    #[test]
    fn zip_group_is_closed_and_counted() {
        let f = ff(2, 1);
        let d = ZipDatumGroupLevel::gl(&[1, 1]).unwrap();
        let pts = d.zip_group_points(&f).unwrap();
        assert_eq!(pts.len(), 4);
        let id = Mat::identity(2);
        assert!(pts.contains(&(id.clone(), id.clone())));
        let set: HashSet<_> = pts.iter().cloned().collect();
        for a in &pts {
            assert!(d.contains_pair(&f, a));
            for b in &pts {
                assert!(set.contains(&(f.mat_mul(&a.0, &b.0), f.mat_mul(&a.1, &b.1))));
            }
        }
        for b in TYPES {
            let d = ZipDatumGroupLevel::gl(b).unwrap();
            assert_eq!(d.zip_group_points(&f).unwrap().len() as u128, d.zip_group_order(2));
        }
    }

    #[test]
    fn generators_lie_in_zip_group() {
        let f = ff(4, 1);
        for b in TYPES {
            let d = ZipDatumGroupLevel::gl(b).unwrap();
            for (a, binv) in d.generators(&f) {
                assert!(d.contains_pair(&f, &(a, f.inverse(&binv).unwrap())));
            }
        }
    }

    #[test]
    fn census_strata_match_standard_forms() {
        for (q, s) in [(2, 1), (3, 1), (2, 2)] {
            let f = ff(q, s);
            let big_q = f.size() as u128;
            for b in TYPES {
                let n: usize = b.iter().sum();
                if n == 3 && s > 1 {
                    continue;
                }
                let d = ZipDatumGroupLevel::gl(b).unwrap();
                let c = d.census(&f).unwrap();
                assert!(c.orbit_stabilizer_holds());
                assert_eq!(c.element_count() as u128, Pattern::full(n).order(big_q));
                let sf = StandardForms::gl(b).unwrap();
                let idx = c.index();
                let hit: HashSet<usize> = (0..sf.len()).map(|k| idx[&sf.rep_matrix(k).key(f.size())]).collect();
                assert_eq!(hit.len(), sf.len(), "standard reps in distinct orbits");
                let mut per_cell: std::collections::HashMap<Vec<usize>, u128> = Default::default();
                for o in &c.orbits {
                    let x = d.bruhat_cell(&f, &Mat::from_key(o[0], n, f.size())).unwrap();
                    *per_cell.entry(x).or_default() += o.len() as u128;
                }
                let mut expected: std::collections::HashMap<Vec<usize>, u128> = Default::default();
                for k in 0..sf.len() {
                    let x = d.canonical_cell(&sf.reps[k]).unwrap().0;
                    *expected.entry(x).or_default() += d.stratum_count(&sf.reps[k], big_q).unwrap();
                }
                assert_eq!(per_cell, expected, "{b:?} q={q} s={s}");
                for k in 0..sf.len() {
                    let count = d.stratum_count(&sf.reps[k], big_q).unwrap();
                    let p = Pattern::upper_block(b).order(big_q) * big_q.pow(sf.lengths[k] as u32);
                    assert_eq!(count, p);
                }
            }
        }
    }

    #[test]
    fn located_orbits_add_up_to_stratum_counts() {
        let f = ff(2, 1);
        for b in [&[1usize, 1][..], &[1, 1, 1], &[2, 1], &[1, 2]] {
            let n: usize = b.iter().sum();
            let d = ZipDatumGroupLevel::gl(b).unwrap();
            let sf = StandardForms::gl(b).unwrap();
            let c = d.census(&f).unwrap();
            let mut sizes = vec![0u128; sf.len()];
            for o in &c.orbits {
                match sf.locate(&d, &f, &Mat::from_key(o[0], n, 2), 3).unwrap() {
                    Located::Found { stratum, .. } => sizes[stratum] += o.len() as u128,
                    other => panic!("{b:?}: {other:?}"),
                }
            }
            for k in 0..sf.len() {
                assert_eq!(sizes[k], d.stratum_count(&sf.reps[k], 2).unwrap(), "{b:?}");
            }
        }
    }

    #[test]
    fn cells_are_orbit_invariants() {
        let f = ff(2, 1);
        for b in TYPES {
            let n: usize = b.iter().sum();
            let d = ZipDatumGroupLevel::gl(b).unwrap();
            let c = d.census(&f).unwrap();
            let mut cells = HashSet::new();
            for o in &c.orbits {
                let first = d.bruhat_cell(&f, &Mat::from_key(o[0], n, 2)).unwrap();
                for &k in o {
                    assert_eq!(d.bruhat_cell(&f, &Mat::from_key(k, n, 2)).unwrap(), first);
                }
                cells.insert(first);
            }
            let g = WeylGroup::new(Family::A, n - 1).unwrap();
            let i = block_parabolic(b);
            let expected: HashSet<_> = g.elements().iter().map(|w| g.min_double_coset_rep(&i, w, &i)).collect();
            assert_eq!(cells.len(), expected.len());
        }
    }

    #[test]
    fn cell_examples() {
        let f = ff(2, 1);
        let d = ZipDatumGroupLevel::gl(&[1, 1]).unwrap();
        assert_eq!(d.bruhat_cell(&f, &Mat::identity(2)).unwrap(), vec![0, 1]);
        assert_eq!(d.bruhat_cell(&f, &Mat::perm(&[1, 0])).unwrap(), vec![1, 0]);
    }

    #[test]
    fn slice_is_reached_by_the_action() {
        let f = ff(2, 1);
        for b in TYPES {
            let d = ZipDatumGroupLevel::gl(b).unwrap();
            for y in d.ambient.weyl_elements() {
                let (x, u, v) = d.canonical_cell(&y).unwrap();
                assert_eq!(compose(&compose(&u, &x), &v), y);
                let (_, l) = d.slice(&y).unwrap();
                let uinv = Mat::perm(&invert(&u));
                let pair = (uinv.clone(), d.twist.apply(&f, &uinv));
                assert!(d.contains_pair(&f, &pair));
                let moved = d.act(&f, &pair, &Mat::perm(&y)).unwrap();
                assert_eq!(moved, Mat::perm(&compose(&x, &l)));
            }
        }
    }

    #[test]
    fn reduction_terminates_within_rank_steps() {
        for b in TYPES {
            let n: usize = b.iter().sum();
            let d = ZipDatumGroupLevel::gl(b).unwrap();
            let sf = StandardForms::gl(b).unwrap();
            let mut chains = HashSet::new();
            for r in &sf.reps {
                let ch = d.chain(r).unwrap();
                assert!(ch.len() <= n);
                chains.insert(ch);
            }
            assert_eq!(chains.len(), sf.len());
        }
        let d = ZipDatumGroupLevel::gl(&[1, 1]).unwrap();
        let r = d.reduce(&[0, 1]).unwrap();
        assert!(r.is_terminal());
        assert_eq!(r.ambient, Pattern::block_diagonal(&[1, 1]));
    }

    #[test]
    fn reduced_census_counts_orbits_in_cell() {
        let f = ff(2, 1);
        for b in TYPES {
            let n: usize = b.iter().sum();
            let d = ZipDatumGroupLevel::gl(b).unwrap();
            let c = d.census(&f).unwrap();
            let mut per_cell = std::collections::HashMap::new();
            for o in &c.orbits {
                *per_cell.entry(d.bruhat_cell(&f, &Mat::from_key(o[0], n, 2)).unwrap()).or_insert(0usize) += 1;
            }
            for (x, count) in per_cell {
                let r = d.reduce(&x).unwrap();
                assert_eq!(r.census(&f).unwrap().orbits.len(), count, "{b:?} {x:?}");
            }
        }
    }

    #[test]
    fn terminal_stabilizer_is_rational_points() {
        let f = ff(2, 2);
        let d = ZipDatumGroupLevel::terminal(2, Twist::frobenius(2)).unwrap();
        let st = d.stabilizer(&f, &Mat::identity(2)).unwrap();
        assert_eq!(st.len(), 6);
        let c = d.census(&f).unwrap();
        assert!(c.orbit_stabilizer_holds());
    }

    #[test]
    fn bad_data_rejected() {
        assert!(ZipDatumGroupLevel::gl(&[]).is_err());
        assert!(ZipDatumGroupLevel::gl(&[2, 0]).is_err());
        let bad = ZipDatumGroupLevel::new(
            Pattern::full(3),
            Pattern::lower_block(&[2, 1]),
            Pattern::upper_block(&[1, 2]),
            Twist::frobenius(3),
        );
        assert!(bad.is_err());
    }
}
