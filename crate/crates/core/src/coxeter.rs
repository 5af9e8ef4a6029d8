//! Weyl groups of the classical types A, B, C and D.
//!
//! Elements are signed permutations in window notation. Type `A_r` acts on
//! `r + 1` letters; the other families act on `r` letters with signs. Simple
//! reflections follow Bourbaki: `s_i` swaps positions `i` and `i + 1` for
//! `i < n`, and the last generator of B/C negates position `n`, while the last
//! generator of `D_n` sends `(x_{n-1}, x_n)` to `(-x_n, -x_{n-1})`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("unsupported Weyl group {family}{rank}")]
    Unsupported { family: Family, rank: usize },
    #[error("invalid signed permutation {0:?}")]
    InvalidPerm(Vec<i8>),
    #[error("type D element {0:?} has an odd number of sign changes")]
    OddSigns(Vec<i8>),
    #[error("simple index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("element of size {0} does not belong to a group acting on {1} letters")]
    GroupMismatch(usize, usize),
    #[error("{0:?} is not an automorphism of the Coxeter graph")]
    NotGraphAutomorphism(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

/// A set of simple indices, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Parabolic(pub BTreeSet<usize>);

impl Parabolic {
    pub fn empty() -> Self {
        Parabolic(BTreeSet::new())
    }

    pub fn full(rank: usize) -> Self {
        Parabolic((1..=rank).collect())
    }

    pub fn from_slice(idx: &[usize]) -> Self {
        Parabolic(idx.iter().copied().collect())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }

    /// All subsets of `{1..rank}` in increasing bitmask order.
    pub fn all_subsets(rank: usize) -> Vec<Parabolic> {
        (0u32..(1 << rank))
            .map(|mask| Parabolic((1..=rank).filter(|i| mask & (1 << (i - 1)) != 0).collect()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylElement {
    perm: Vec<i8>,
}

impl WeylElement {
    pub fn perm(&self) -> &[i8] {
        &self.perm
    }

    /// Image of the signed letter `i`.
    #[inline]
    pub fn apply(&self, i: i8) -> i8 {
        if i > 0 {
            self.perm[(i - 1) as usize]
        } else {
            -self.perm[(-i - 1) as usize]
        }
    }

    pub fn degree(&self) -> usize {
        self.perm.len()
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.perm.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Sparse integer vector `Σ c·e_i` used for roots.
type Root = Vec<(usize, i32)>;

#[derive(Debug, Clone)]
pub struct WeylGroup {
    family: Family,
    rank: usize,
    degree: usize,
    positive_roots: Vec<Root>,
    simple_roots: Vec<Root>,
    order: u128,
}

impl PartialEq for WeylGroup {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.rank == other.rank
    }
}

impl Eq for WeylGroup {}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

impl WeylGroup {
    pub fn new(family: Family, rank: usize) -> Result<Self, CoxeterError> {
        // A_0 is allowed as the trivial Weyl group of GL_1.
        let bad = (rank == 0 && family != Family::A) || (family == Family::D && rank < 2) || rank > 60;
        if bad {
            return Err(CoxeterError::Unsupported { family, rank });
        }
        let degree = if family == Family::A { rank + 1 } else { rank };
        let mut positive_roots: Vec<Root> = Vec::new();
        for i in 0..degree {
            for j in i + 1..degree {
                positive_roots.push(vec![(i, 1), (j, -1)]);
                if family != Family::A {
                    positive_roots.push(vec![(i, 1), (j, 1)]);
                }
            }
        }
        match family {
            Family::B => (0..degree).for_each(|i| positive_roots.push(vec![(i, 1)])),
            Family::C => (0..degree).for_each(|i| positive_roots.push(vec![(i, 2)])),
            _ => {}
        }
        let mut simple_roots: Vec<Root> = (0..rank.min(degree - 1))
            .map(|i| vec![(i, 1), (i + 1, -1)])
            .collect();
        match family {
            Family::B => simple_roots.push(vec![(rank - 1, 1)]),
            Family::C => simple_roots.push(vec![(rank - 1, 2)]),
            Family::D => simple_roots.push(vec![(rank - 2, 1), (rank - 1, 1)]),
            Family::A => {}
        }
        let order = match family {
            Family::A => factorial(rank + 1),
            Family::B | Family::C => (1u128 << rank) * factorial(rank),
            Family::D => (1u128 << (rank - 1)) * factorial(rank),
        };
        let g = WeylGroup { family, rank, degree, positive_roots, simple_roots, order };
        debug_assert_eq!(g.length(&g.longest_element()), g.positive_root_count());
        Ok(g)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of letters the window notation acts on.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn positive_root_count(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement { perm: (1..=self.degree as i8).collect() }
    }

    pub fn element(&self, perm: Vec<i8>) -> Result<WeylElement, CoxeterError> {
        let n = self.degree;
        if perm.len() != n {
            return Err(CoxeterError::GroupMismatch(perm.len(), n));
        }
        let mut seen = vec![false; n];
        for &x in &perm {
            let a = x.unsigned_abs() as usize;
            if a == 0 || a > n || seen[a - 1] || (self.family == Family::A && x < 0) {
                return Err(CoxeterError::InvalidPerm(perm));
            }
            seen[a - 1] = true;
        }
        if self.family == Family::D && perm.iter().filter(|&&x| x < 0).count() % 2 == 1 {
            return Err(CoxeterError::OddSigns(perm));
        }
        Ok(WeylElement { perm })
    }

    pub fn simple(&self, i: usize) -> WeylElement {
        assert!(i >= 1 && i <= self.rank, "simple index {i} out of range");
        let mut perm: Vec<i8> = (1..=self.degree as i8).collect();
        let n = self.degree;
        if i < n && !(self.family == Family::D && i == self.rank) {
            perm.swap(i - 1, i);
        } else {
            match self.family {
                Family::B | Family::C => perm[n - 1] = -perm[n - 1],
                Family::D => {
                    perm[n - 2] = -(n as i8);
                    perm[n - 1] = -(n as i8 - 1);
                }
                Family::A => unreachable!(),
            }
        }
        WeylElement { perm }
    }

    fn check(&self, w: &WeylElement) -> Result<(), CoxeterError> {
        if w.perm.len() != self.degree {
            Err(CoxeterError::GroupMismatch(w.perm.len(), self.degree))
        } else {
            Ok(())
        }
    }

    /// Composition `(v·w)(i) = v(w(i))`.
    pub fn mul(&self, v: &WeylElement, w: &WeylElement) -> WeylElement {
        WeylElement { perm: w.perm.iter().map(|&x| v.apply(x)).collect() }
    }

    pub fn inverse(&self, w: &WeylElement) -> WeylElement {
        let mut perm = vec![0i8; self.degree];
        for (i, &x) in w.perm.iter().enumerate() {
            let a = x.unsigned_abs() as usize - 1;
            perm[a] = if x > 0 { i as i8 + 1 } else { -(i as i8 + 1) };
        }
        WeylElement { perm }
    }

    pub fn from_word(&self, word: &[usize]) -> WeylElement {
        word.iter().fold(self.identity(), |acc, &i| self.mul(&acc, &self.simple(i)))
    }

    fn image_is_positive(&self, w: &WeylElement, root: &Root) -> bool {
        let mut v = [0i32; 64];
        let mut touched = Vec::with_capacity(2);
        for &(i, c) in root {
            let x = w.perm[i];
            let j = x.unsigned_abs() as usize - 1;
            v[j] += if x > 0 { c } else { -c };
            touched.push(j);
        }
        touched.sort_unstable();
        for j in touched {
            if v[j] != 0 {
                return v[j] > 0;
            }
        }
        unreachable!("roots are nonzero")
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self, w: &WeylElement) -> usize {
        self.positive_roots.iter().filter(|r| !self.image_is_positive(w, r)).count()
    }

    pub fn is_right_descent(&self, w: &WeylElement, i: usize) -> bool {
        !self.image_is_positive(w, &self.simple_roots[i - 1])
    }

    pub fn is_left_descent(&self, w: &WeylElement, i: usize) -> bool {
        self.is_right_descent(&self.inverse(w), i)
    }

    pub fn left_descents(&self, w: &WeylElement) -> Vec<usize> {
        let inv = self.inverse(w);
        (1..=self.rank).filter(|&i| self.is_right_descent(&inv, i)).collect()
    }

    pub fn right_descents(&self, w: &WeylElement) -> Vec<usize> {
        (1..=self.rank).filter(|&i| self.is_right_descent(w, i)).collect()
    }

    /// Lexicographically smallest reduced word.
    pub fn reduced_word(&self, w: &WeylElement) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = w.clone();
        loop {
            let inv = self.inverse(&cur);
            match (1..=self.rank).find(|&i| self.is_right_descent(&inv, i)) {
                Some(i) => {
                    word.push(i);
                    cur = self.mul(&self.simple(i), &cur);
                }
                None => return word,
            }
        }
    }

    /// Canonical sort key `(length, lex-smallest reduced word)`.
    pub fn sort_key(&self, w: &WeylElement) -> (usize, Vec<usize>) {
        let word = self.reduced_word(w);
        (word.len(), word)
    }

    pub fn sort_canonical(&self, elems: &mut [WeylElement]) {
        elems.sort_by_cached_key(|w| self.sort_key(w));
    }

    pub fn longest_element(&self) -> WeylElement {
        self.longest_element_parabolic(&Parabolic::full(self.rank))
    }

    /// The longest element of `W_K`: climb until no generator in `K` is an ascent.
    pub fn longest_element_parabolic(&self, k: &Parabolic) -> WeylElement {
        let mut w = self.identity();
        loop {
            match k.iter().find(|&i| !self.is_right_descent(&w, i)) {
                Some(i) => w = self.mul(&w, &self.simple(i)),
                None => return w,
            }
        }
    }

    /// Every element of `W`, in canonical order. Intended for small groups.
    pub fn elements(&self) -> Vec<WeylElement> {
        self.parabolic_elements(&Parabolic::full(self.rank))
    }

    /// Every element of `W_K`, in canonical order.
    pub fn parabolic_elements(&self, k: &Parabolic) -> Vec<WeylElement> {
        let gens: Vec<WeylElement> = k.iter().map(|i| self.simple(i)).collect();
        let mut seen: HashSet<WeylElement> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.identity());
        queue.push_back(self.identity());
        while let Some(w) = queue.pop_front() {
            for s in &gens {
                let ws = self.mul(&w, s);
                if seen.insert(ws.clone()) {
                    queue.push_back(ws);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        self.sort_canonical(&mut out);
        out
    }

    /// Order of `W_K`, from the connected components of `K` in the Dynkin diagram.
    pub fn parabolic_order(&self, k: &Parabolic) -> u128 {
        let mut total = 1u128;
        let mut comp: Vec<usize> = Vec::new();
        let cartan = self.cartan_matrix();
        let mut visited = BTreeSet::new();
        for start in k.iter() {
            if visited.contains(&start) {
                continue;
            }
            comp.clear();
            let mut stack = vec![start];
            visited.insert(start);
            while let Some(i) = stack.pop() {
                comp.push(i);
                for j in k.iter() {
                    if !visited.contains(&j) && cartan[i - 1][j - 1] != 0 {
                        visited.insert(j);
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            total *= self.component_order(&comp);
        }
        total
    }

    fn component_order(&self, comp: &[usize]) -> u128 {
        let r = comp.len();
        let includes_last = comp.contains(&self.rank);
        match self.family {
            Family::A => factorial(r + 1),
            Family::B | Family::C if includes_last => (1u128 << r) * factorial(r),
            Family::D if includes_last && comp.contains(&(self.rank - 1)) => (1u128 << (r - 1)) * factorial(r),
            _ => factorial(r + 1),
        }
    }

    pub fn is_min_coset_rep(&self, k: &Parabolic, w: &WeylElement) -> bool {
        let inv = self.inverse(w);
        !k.iter().any(|i| self.is_right_descent(&inv, i))
    }

    /// `^K W`: minimal length representatives of the cosets `W_K w`, canonical order.
    pub fn min_coset_reps(&self, k: &Parabolic) -> Vec<WeylElement> {
        let mut seen: HashSet<WeylElement> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.identity());
        queue.push_back(self.identity());
        while let Some(w) = queue.pop_front() {
            for i in 1..=self.rank {
                if self.is_right_descent(&w, i) {
                    continue;
                }
                let ws = self.mul(&w, &self.simple(i));
                if !seen.contains(&ws) && self.is_min_coset_rep(k, &ws) {
                    seen.insert(ws.clone());
                    queue.push_back(ws);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        self.sort_canonical(&mut out);
        out
    }

    /// The minimal element of `W_K · w · W_{K'}`.
    pub fn min_double_coset_rep(&self, k: &Parabolic, w: &WeylElement, k2: &Parabolic) -> WeylElement {
        let mut cur = w.clone();
        loop {
            if let Some(i) = k.iter().find(|&i| self.is_left_descent(&cur, i)) {
                cur = self.mul(&self.simple(i), &cur);
                continue;
            }
            if let Some(i) = k2.iter().find(|&i| self.is_right_descent(&cur, i)) {
                cur = self.mul(&cur, &self.simple(i));
                continue;
            }
            return cur;
        }
    }

    /// Direct Bruhat comparison.
    ///
    /// Type A uses rank-matrix dominance. B and C embed into the symmetric group on
    /// `2n` letters ordered `1 < … < n < -n < … < -1`, where the simple reflections
    /// become products of commuting adjacent transpositions and the Bruhat order is
    /// induced. Type D uses the lifting recursion along a right descent.
    pub fn bruhat_leq(&self, v: &WeylElement, w: &WeylElement) -> Result<bool, CoxeterError> {
        self.check(v)?;
        self.check(w)?;
        Ok(match self.family {
            Family::A => {
                let a: Vec<usize> = v.perm.iter().map(|&x| x as usize - 1).collect();
                let b: Vec<usize> = w.perm.iter().map(|&x| x as usize - 1).collect();
                rank_dominated(&a, &b)
            }
            Family::B | Family::C => rank_dominated(&self.unfold(v), &self.unfold(w)),
            Family::D => self.bruhat_lifting(v, w),
        })
    }

    fn unfold(&self, w: &WeylElement) -> Vec<usize> {
        let n = self.degree as i32;
        let pos = |x: i32| if x > 0 { (x - 1) as usize } else { (2 * n + x) as usize };
        let mut out = vec![0usize; 2 * self.degree];
        for a in 1..=n {
            for s in [a, -a] {
                out[pos(s)] = pos(w.apply(s as i8) as i32);
            }
        }
        out
    }

    fn bruhat_lifting(&self, v: &WeylElement, w: &WeylElement) -> bool {
        let mut v = v.clone();
        let mut w = w.clone();
        loop {
            let Some(i) = (1..=self.rank).find(|&i| self.is_right_descent(&w, i)) else {
                return v == w;
            };
            let s = self.simple(i);
            if self.is_right_descent(&v, i) {
                v = self.mul(&v, &s);
            }
            w = self.mul(&w, &s);
        }
    }

    /// Bruhat interval `[e, w]` as the set of all subword products of a reduced word.
    pub fn subword_products(&self, w: &WeylElement) -> HashSet<WeylElement> {
        let mut set: HashSet<WeylElement> = HashSet::new();
        set.insert(self.identity());
        for i in self.reduced_word(w) {
            let s = self.simple(i);
            let extra: Vec<_> = set.iter().map(|x| self.mul(x, &s)).collect();
            set.extend(extra);
        }
        set
    }

    pub fn bruhat_leq_subword(&self, v: &WeylElement, w: &WeylElement) -> Result<bool, CoxeterError> {
        self.check(v)?;
        self.check(w)?;
        Ok(self.subword_products(w).contains(v))
    }

    /// Cartan matrix `a_ij = 2(α_i, α_j)/(α_i, α_i)`, 0-based.
    pub fn cartan_matrix(&self) -> Vec<Vec<i32>> {
        let dot = |a: &Root, b: &Root| -> i32 {
            a.iter()
                .map(|&(i, c)| b.iter().filter(|&&(j, _)| j == i).map(|&(_, d)| c * d).sum::<i32>())
                .sum()
        };
        let r = &self.simple_roots;
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| 2 * dot(&r[i], &r[j]) / dot(&r[i], &r[i])).collect())
            .collect()
    }

    /// Validates `delta` (1-based images of `1..=rank`) against the Cartan matrix.
    pub fn check_graph_automorphism(&self, delta: &[usize]) -> Result<(), CoxeterError> {
        let bad = || CoxeterError::NotGraphAutomorphism(delta.to_vec());
        if delta.len() != self.rank {
            return Err(bad());
        }
        let mut seen = vec![false; self.rank];
        for &d in delta {
            if d == 0 || d > self.rank || seen[d - 1] {
                return Err(bad());
            }
            seen[d - 1] = true;
        }
        let c = self.cartan_matrix();
        for i in 0..self.rank {
            for j in 0..self.rank {
                if c[delta[i] - 1][delta[j] - 1] != c[i][j] {
                    return Err(bad());
                }
            }
        }
        Ok(())
    }

    /// All automorphisms of the Coxeter graph that preserve the Cartan matrix.
    pub fn graph_automorphisms(&self) -> Vec<Vec<usize>> {
        let id: Vec<usize> = (1..=self.rank).collect();
        let mut cands = vec![id.clone()];
        match self.family {
            Family::A if self.rank >= 2 => cands.push(id.iter().rev().copied().collect()),
            Family::D if self.rank == 4 => {
                for p in [[1, 4, 3], [3, 1, 4], [3, 4, 1], [4, 1, 3], [4, 3, 1]] {
                    cands.push(vec![p[0], 2, p[1], p[2]]);
                }
            }
            Family::D if self.rank >= 2 => {
                let mut d = id.clone();
                d.swap(self.rank - 2, self.rank - 1);
                cands.push(d);
            }
            _ => {}
        }
        cands.retain(|d| self.check_graph_automorphism(d).is_ok());
        cands.sort();
        cands
    }

    pub fn apply_diagram_automorphism(&self, delta: &[usize], w: &WeylElement) -> Result<WeylElement, CoxeterError> {
        self.check_graph_automorphism(delta)?;
        self.check(w)?;
        Ok(self.apply_delta_unchecked(delta, w))
    }

    pub(crate) fn apply_delta_unchecked(&self, delta: &[usize], w: &WeylElement) -> WeylElement {
        let word: Vec<usize> = self.reduced_word(w).iter().map(|&i| delta[i - 1]).collect();
        self.from_word(&word)
    }

    /// If `w` is a simple reflection, its index.
    pub fn simple_index(&self, w: &WeylElement) -> Option<usize> {
        (1..=self.rank).find(|&i| self.simple(i) == *w)
    }
}

/// `v ≤ w` in the symmetric group: `#{a ≤ i : v(a) ≥ j} ≤ #{a ≤ i : w(a) ≥ j}` for all `i, j`.
fn rank_dominated(v: &[usize], w: &[usize]) -> bool {
    let n = v.len();
    let mut cv = vec![0i32; n];
    let mut cw = vec![0i32; n];
    for i in 0..n {
        for j in 0..=v[i] {
            cv[j] += 1;
        }
        for j in 0..=w[i] {
            cw[j] += 1;
        }
        if (0..n).any(|j| cv[j] > cw[j]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups_up_to(r: usize) -> Vec<WeylGroup> {
        let mut out = Vec::new();
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for rank in 1..=r {
                if let Ok(g) = WeylGroup::new(f, rank) {
                    out.push(g);
                }
            }
        }
        out
    }

    /// Minimal word length by breadth-first search over the Cayley graph.
    fn bfs_lengths(g: &WeylGroup) -> std::collections::HashMap<WeylElement, usize> {
        let mut dist = std::collections::HashMap::new();
        let mut q = VecDeque::new();
        dist.insert(g.identity(), 0);
        q.push_back(g.identity());
        while let Some(w) = q.pop_front() {
            let d = dist[&w];
            for i in 1..=g.rank() {
                let ws = g.mul(&w, &g.simple(i));
                if !dist.contains_key(&ws) {
                    dist.insert(ws.clone(), d + 1);
                    q.push_back(ws);
                }
            }
        }
        dist
    }

    #[test]
    fn orders_and_root_counts() {
        let a3 = WeylGroup::new(Family::A, 3).unwrap();
        assert_eq!(a3.order(), 24);
        assert_eq!(a3.positive_root_count(), 6);
        let b2 = WeylGroup::new(Family::B, 2).unwrap();
        assert_eq!(b2.order(), 8);
        assert_eq!(b2.positive_root_count(), 4);
        assert!(WeylGroup::new(Family::D, 1).is_err());
        for g in groups_up_to(4) {
            assert_eq!(g.elements().len() as u128, g.order(), "{}", g.name());
            assert_eq!(g.length(&g.longest_element()), g.positive_root_count());
        }
    }

    #[test]
    fn length_matches_word_search() {
        for g in groups_up_to(4) {
            let dist = bfs_lengths(&g);
            assert_eq!(dist.len() as u128, g.order());
            for (w, d) in &dist {
                assert_eq!(g.length(w), *d, "{} {}", g.name(), w);
                assert_eq!(g.reduced_word(w).len(), *d);
                assert_eq!(&g.from_word(&g.reduced_word(w)), w);
            }
        }
        let a2 = WeylGroup::new(Family::A, 2).unwrap();
        assert_eq!(a2.length(&a2.from_word(&[1, 2])), 2);
    }

    #[test]
    fn length_changes_by_one() {
        for g in groups_up_to(3) {
            for w in g.elements() {
                for i in 1..=g.rank() {
                    let l = g.length(&w) as i64;
                    let l2 = g.length(&g.mul(&w, &g.simple(i))) as i64;
                    assert_eq!((l - l2).abs(), 1);
                    assert_eq!(g.is_right_descent(&w, i), l2 < l);
                }
            }
        }
    }

    #[test]
    fn subadditivity_of_length() {
        for g in groups_up_to(3) {
            let els = g.elements();
            for v in &els {
                for w in &els {
                    assert!(g.length(&g.mul(v, w)) <= g.length(v) + g.length(w));
                }
            }
        }
    }

    #[test]
    fn group_axioms() {
        for g in groups_up_to(3) {
            let els = g.elements();
            let e = g.identity();
            for v in &els {
                assert_eq!(g.mul(&g.inverse(v), v), e);
                assert_eq!(g.mul(&e, v), *v);
                for w in els.iter().take(8) {
                    for u in els.iter().take(8) {
                        assert_eq!(g.mul(&g.mul(u, v), w), g.mul(u, &g.mul(v, w)));
                    }
                }
            }
        }
    }

    #[test]
    fn type_d_parity_enforced() {
        let d3 = WeylGroup::new(Family::D, 3).unwrap();
        assert!(matches!(d3.element(vec![-1, 2, 3]), Err(CoxeterError::OddSigns(_))));
        assert!(d3.element(vec![-1, -2, 3]).is_ok());
        let a2 = WeylGroup::new(Family::A, 2).unwrap();
        assert!(a2.element(vec![1, 1, 2]).is_err());
    }

    #[test]
    fn bruhat_direct_matches_subword_small() {
        for g in groups_up_to(3) {
            let els = g.elements();
            for w in &els {
                let ideal = g.subword_products(w);
                for v in &els {
                    assert_eq!(g.bruhat_leq(v, w).unwrap(), ideal.contains(v), "{} {} {}", g.name(), v, w);
                }
            }
        }
    }

    #[test]
    fn bruhat_basic_properties() {
        let g = WeylGroup::new(Family::A, 3).unwrap();
        let els = g.elements();
        let e = g.identity();
        for w in &els {
            assert!(g.bruhat_leq(&e, w).unwrap());
            if g.length(w) > 0 {
                assert!(!g.bruhat_leq(w, &e).unwrap());
            }
            for v in &els {
                if g.bruhat_leq(v, w).unwrap() {
                    assert!(g.length(v) <= g.length(w));
                    if v != w {
                        assert!(!g.bruhat_leq(w, v).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn longest_parabolic() {
        let a1 = WeylGroup::new(Family::A, 1).unwrap();
        assert_eq!(a1.longest_element(), a1.simple(1));
        let a3 = WeylGroup::new(Family::A, 3).unwrap();
        let k = Parabolic::from_slice(&[1, 3]);
        let w = a3.longest_element_parabolic(&k);
        let brute = a3.parabolic_elements(&k).into_iter().max_by_key(|x| a3.length(x)).unwrap();
        assert_eq!(w, brute);
        assert_eq!(w, a3.from_word(&[1, 3]));
        assert_eq!(a3.length(&w), 2);
        let w0 = a3.longest_element();
        assert_eq!(a3.mul(&w0, &w0), a3.identity());
    }

    #[test]
    fn coset_reps() {
        let a2 = WeylGroup::new(Family::A, 2).unwrap();
        let reps = a2.min_coset_reps(&Parabolic::from_slice(&[1]));
        let words: Vec<_> = reps.iter().map(|w| a2.reduced_word(w)).collect();
        assert_eq!(words, vec![vec![], vec![2], vec![2, 1]]);
        for g in groups_up_to(4) {
            assert_eq!(g.min_coset_reps(&Parabolic::empty()).len() as u128, g.order());
            assert_eq!(g.min_coset_reps(&Parabolic::full(g.rank())), vec![g.identity()]);
            for k in Parabolic::all_subsets(g.rank()) {
                let reps = g.min_coset_reps(&k);
                let wk = g.parabolic_elements(&k).len() as u128;
                assert_eq!(wk, g.parabolic_order(&k), "{} {:?}", g.name(), k);
                assert_eq!(reps.len() as u128 * wk, g.order(), "{} {:?}", g.name(), k);
                for w in &reps {
                    assert!(g.left_descents(w).iter().all(|i| !k.contains(*i)));
                }
            }
        }
    }

    #[test]
    fn coset_reps_are_brute_force_minima() {
        let g = WeylGroup::new(Family::B, 3).unwrap();
        let k = Parabolic::from_slice(&[2, 3]);
        let wk = g.parabolic_elements(&k);
        let mut brute: HashSet<WeylElement> = HashSet::new();
        for w in g.elements() {
            let m = wk.iter().map(|u| g.mul(u, &w)).min_by_key(|x| g.sort_key(x)).unwrap();
            brute.insert(m);
        }
        let reps: HashSet<_> = g.min_coset_reps(&k).into_iter().collect();
        assert_eq!(reps, brute);
    }

    #[test]
    fn double_coset_rep_is_minimal() {
        let a3 = WeylGroup::new(Family::A, 3).unwrap();
        let e = Parabolic::empty();
        let full = Parabolic::full(3);
        for w in a3.elements() {
            assert_eq!(a3.min_double_coset_rep(&e, &w, &e), w);
            assert_eq!(a3.min_double_coset_rep(&full, &w, &full), a3.identity());
        }
        let k = Parabolic::from_slice(&[1]);
        let k2 = Parabolic::from_slice(&[3]);
        let w = a3.from_word(&[1, 2, 3]);
        let mut coset = Vec::new();
        for u in a3.parabolic_elements(&k) {
            for v in a3.parabolic_elements(&k2) {
                coset.push(a3.mul(&a3.mul(&u, &w), &v));
            }
        }
        let min_len = coset.iter().map(|x| a3.length(x)).min().unwrap();
        let minima: HashSet<_> = coset.iter().filter(|x| a3.length(x) == min_len).cloned().collect();
        assert_eq!(minima.len(), 1);
        assert!(minima.contains(&a3.min_double_coset_rep(&k, &w, &k2)));
        assert_eq!(a3.min_double_coset_rep(&k, &w, &k2), a3.from_word(&[2]));
    }

    #[test]
    fn diagram_automorphisms() {
        let a3 = WeylGroup::new(Family::A, 3).unwrap();
        let delta = vec![3, 2, 1];
        assert_eq!(a3.apply_diagram_automorphism(&delta, &a3.simple(1)).unwrap(), a3.simple(3));
        for w in a3.elements() {
            let dw = a3.apply_diagram_automorphism(&delta, &w).unwrap();
            assert_eq!(a3.length(&dw), a3.length(&w));
            assert_eq!(a3.apply_diagram_automorphism(&[1, 2, 3], &w).unwrap(), w);
            for v in a3.elements().iter().take(6) {
                let lhs = a3.apply_diagram_automorphism(&delta, &a3.mul(&w, v)).unwrap();
                let rhs = a3.mul(&dw, &a3.apply_diagram_automorphism(&delta, v).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        let b2 = WeylGroup::new(Family::B, 2).unwrap();
        assert!(b2.check_graph_automorphism(&[2, 1]).is_err());
        assert!(a3.check_graph_automorphism(&[2, 1, 3]).is_err());
        assert_eq!(WeylGroup::new(Family::D, 4).unwrap().graph_automorphisms().len(), 6);
    }

    #[test]
    fn graph_automorphisms_match_brute_force() {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n);
                    out.push(q);
                }
            }
            out
        }
        for g in groups_up_to(5) {
            let mut brute: Vec<_> =
                perms(g.rank()).into_iter().filter(|d| g.check_graph_automorphism(d).is_ok()).collect();
            brute.sort();
            assert_eq!(g.graph_automorphisms(), brute, "{}", g.name());
        }
    }

    #[test]
    fn w0_conjugation_permutes_simples() {
        for g in groups_up_to(4) {
            let w0 = g.longest_element();
            for i in 1..=g.rank() {
                let c = g.mul(&g.mul(&w0, &g.simple(i)), &w0);
                assert!(g.simple_index(&c).is_some());
            }
        }
    }
}
