//! Quiver arithmetic on Dynkin quivers: Euler form, Hom and Ext dimensions
//! between indecomposables, adapted words, the degeneration order on
//! multiplicity vectors, orbit and flag-bundle dimensions, and the A5 data
//! behind the semismallness functional `Δ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frobmono::Case;
use crate::rootsys::{CartanData, RootSystem, Weight, WeylWord};

/// Multiplicities of the indecomposables `M(β_1), …, M(β_N)` for a fixed
/// adapted word.
pub type RepClass = Vec<i64>;

/// One direction per edge of the Dynkin diagram; arrows are `(tail, head)`,
/// 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    rank: usize,
    arrows: Vec<(u8, u8)>,
}

impl Orientation {
    pub fn new(cartan: &CartanData, arrows: Vec<(u8, u8)>) -> Result<Self> {
        let rank = cartan.rank();
        let mut seen = BTreeSet::new();
        for &(t, h) in &arrows {
            if t == 0 || h == 0 || t as usize > rank || h as usize > rank {
                return Err(Error::BadOrientation(format!("arrow {t}->{h} leaves the vertex set")));
            }
            if cartan.a(t as usize, h as usize) != -1 {
                return Err(Error::BadOrientation(format!("{t}-{h} is not an edge")));
            }
            if !seen.insert((t.min(h), t.max(h))) {
                return Err(Error::BadOrientation(format!("edge {t}-{h} oriented twice")));
            }
        }
        let edges: BTreeSet<(u8, u8)> = cartan.edges().into_iter().collect();
        if seen != edges {
            return Err(Error::BadOrientation("some edge has no arrow".into()));
        }
        let mut arrows = arrows;
        arrows.sort_unstable();
        Ok(Orientation { rank, arrows })
    }

    /// Parses `1->2, 3->2` (also `1>2` or `1→2`).
    pub fn parse(cartan: &CartanData, src: &str) -> Result<Self> {
        let mut arrows = Vec::new();
        for part in src.split([',', ';']).map(str::trim).filter(|s| !s.is_empty()) {
            let part = part.replace("->", ">").replace('→', ">");
            let (a, b) = part
                .split_once('>')
                .ok_or_else(|| Error::Parse(format!("expected `tail->head`, got `{part}`")))?;
            let num = |s: &str| s.trim().parse::<u8>().map_err(|_| Error::Parse(format!("bad vertex `{s}`")));
            arrows.push((num(a)?, num(b)?));
        }
        Self::new(cartan, arrows)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn arrows(&self) -> &[(u8, u8)] {
        &self.arrows
    }

    /// No arrow leaves `i`.
    pub fn is_sink(&self, i: usize) -> bool {
        self.arrows.iter().all(|&(t, _)| t as usize != i)
    }

    /// `s_i Ω`: arrows at `i` reversed.
    pub fn reflect_at(&self, i: usize) -> Orientation {
        let mut arrows: Vec<(u8, u8)> = self
            .arrows
            .iter()
            .map(|&(t, h)| if t as usize == i || h as usize == i { (h, t) } else { (t, h) })
            .collect();
        arrows.sort_unstable();
        Orientation { rank: self.rank, arrows }
    }

    pub fn opposite(&self) -> Orientation {
        let mut arrows: Vec<(u8, u8)> = self.arrows.iter().map(|&(t, h)| (h, t)).collect();
        arrows.sort_unstable();
        Orientation { rank: self.rank, arrows }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.arrows.iter().map(|(t, h)| format!("{t}->{h}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// All `2^edges` orientations of the diagram.
pub fn all_orientations(cartan: &CartanData) -> Vec<Orientation> {
    let edges = cartan.edges();
    (0u32..1 << edges.len())
        .map(|mask| {
            let arrows = edges
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| if mask >> k & 1 == 0 { (a, b) } else { (b, a) })
                .collect();
            Orientation::new(cartan, arrows).expect("every edge oriented once")
        })
        .collect()
}

/// `⟨μ,ν⟩_Ω = Σ μ_i ν_i − Σ_{h∈Ω} μ_{tail} ν_{head}`.
pub fn euler_form(o: &Orientation, mu: &Weight, nu: &Weight) -> i64 {
    let diag: i64 = mu.0.iter().zip(&nu.0).map(|(a, b)| a * b).sum();
    let off: i64 = o.arrows.iter().map(|&(t, h)| mu.0[t as usize - 1] * nu.0[h as usize - 1]).sum();
    diag - off
}

fn check_root(rs: &RootSystem, beta: &Weight) -> Result<()> {
    if beta.rank() != rs.rank() {
        return Err(Error::RankMismatch(beta.rank(), rs.rank()));
    }
    if !rs.positive_roots().contains(beta) {
        return Err(Error::NotPositive(format!("{beta} is not a positive root")));
    }
    Ok(())
}

/// `dim Hom(M(α), M(β)) = max(0, ⟨α,β⟩_Ω)`.
pub fn hom_dim(rs: &RootSystem, o: &Orientation, alpha: &Weight, beta: &Weight) -> Result<i64> {
    check_root(rs, alpha)?;
    check_root(rs, beta)?;
    Ok(euler_form(o, alpha, beta).max(0))
}

/// `dim Ext¹(M(α), M(β)) = max(0, −⟨α,β⟩_Ω)`.
pub fn ext_dim(rs: &RootSystem, o: &Orientation, alpha: &Weight, beta: &Weight) -> Result<i64> {
    check_root(rs, alpha)?;
    check_root(rs, beta)?;
    Ok((-euler_form(o, alpha, beta)).max(0))
}

/// `i_1` is a sink of `Ω`, `i_2` a sink of `s_{i_1}Ω`, and so on, and the word
/// is a reduced word of `w0`.
pub fn is_adapted(rs: &RootSystem, word: &WeylWord, o: &Orientation) -> bool {
    if rs.check_longest(word).is_err() || o.rank() != rs.rank() {
        return false;
    }
    let mut cur = o.clone();
    for &i in word.letters() {
        if !cur.is_sink(i as usize) {
            return false;
        }
        cur = cur.reflect_at(i as usize);
    }
    true
}

/// Some reduced word of `w0` adapted to `Ω`, preferring small letters.
pub fn adapted_word(rs: &RootSystem, o: &Orientation) -> Result<WeylWord> {
    fn go(rs: &RootSystem, o: &Orientation, word: &mut Vec<u8>, target: usize) -> bool {
        if word.len() == target {
            return true;
        }
        for i in 1..=rs.rank() {
            if !o.is_sink(i) {
                continue;
            }
            word.push(i as u8);
            if rs.is_reduced(&WeylWord(word.clone())) && go(rs, &o.reflect_at(i), word, target) {
                return true;
            }
            word.pop();
        }
        false
    }
    let mut word = Vec::new();
    if go(rs, o, &mut word, rs.num_positive_roots()) {
        Ok(WeylWord(word))
    } else {
        Err(Error::Inconsistent(format!("no adapted word for {o}")))
    }
}

/// `Σ_{h∈Ω} d_{tail} d_{head}`.
pub fn dim_rep_space(o: &Orientation, d: &Weight) -> i64 {
    o.arrows.iter().map(|&(t, h)| d.0[t as usize - 1] * d.0[h as usize - 1]).sum()
}

/// Dimension of the variety of pairs (representation, stable flag of type
/// `(j, a)`): partial flag variety plus the space of flag-stable maps.
pub fn flag_bundle_dim(o: &Orientation, j: &[u8], a: &[u32]) -> Result<i64> {
    if j.len() != a.len() {
        return Err(Error::Length { expected: j.len(), got: a.len() });
    }
    if let Some(&i) = j.iter().find(|&&i| i == 0 || i as usize > o.rank()) {
        return Err(Error::IndexOutOfRange { index: i as usize, rank: o.rank() });
    }
    let mut flags = 0i64;
    let mut fiber = 0i64;
    for m in 0..j.len() {
        for m2 in m..j.len() {
            let prod = a[m] as i64 * a[m2] as i64;
            if m < m2 && j[m] == j[m2] {
                flags += prod;
            }
            fiber += o.arrows.iter().filter(|&&(t, h)| t == j[m] && h == j[m2]).count() as i64 * prod;
        }
    }
    Ok(flags + fiber)
}

/// A Dynkin quiver together with an adapted word, which orders the
/// indecomposables as `M(β_1), …, M(β_N)`.
#[derive(Clone, Debug)]
pub struct AdaptedQuiver {
    rs: Arc<RootSystem>,
    orientation: Orientation,
    word: WeylWord,
    roots: Vec<Weight>,
    h: Vec<Vec<i64>>,
    e: Vec<Vec<i64>>,
}

impl AdaptedQuiver {
    pub fn new(rs: Arc<RootSystem>, orientation: Orientation, word: WeylWord) -> Result<Self> {
        if !is_adapted(&rs, &word, &orientation) {
            return Err(Error::NotAdapted(word));
        }
        let roots = rs.roots_of_word(&word)?;
        let form = |a: &Weight, b: &Weight| euler_form(&orientation, a, b);
        let h = roots.iter().map(|a| roots.iter().map(|b| form(a, b).max(0)).collect()).collect();
        let e = roots.iter().map(|a| roots.iter().map(|b| (-form(a, b)).max(0)).collect()).collect();
        Ok(AdaptedQuiver { rs, orientation, word, roots, h, e })
    }

    /// Uses [`adapted_word`].
    pub fn from_orientation(rs: Arc<RootSystem>, orientation: Orientation) -> Result<Self> {
        let word = adapted_word(&rs, &orientation)?;
        Self::new(rs, orientation, word)
    }

    /// The A5 quiver `1→2←3→4←5` with the word `(2,4,1,3,5)` repeated three times.
    pub fn standard_a5() -> Result<Self> {
        let rs = RootSystem::of("A5")?;
        let o = Orientation::new(rs.cartan(), vec![(1, 2), (3, 2), (3, 4), (5, 4)])?;
        let word: WeylWord = "2,4,1,3,5,2,4,1,3,5,2,4,1,3,5".parse()?;
        Self::new(rs, o, word)
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn word(&self) -> &WeylWord {
        &self.word
    }

    pub fn roots(&self) -> &[Weight] {
        &self.roots
    }

    /// `h_{k,ℓ} = dim Hom(M(β_k), M(β_ℓ))`.
    pub fn hom_matrix(&self) -> &[Vec<i64>] {
        &self.h
    }

    /// `e_{k,ℓ} = dim Ext¹(M(β_k), M(β_ℓ))`.
    pub fn ext_matrix(&self) -> &[Vec<i64>] {
        &self.e
    }

    fn check_class(&self, n: &[i64]) -> Result<()> {
        if n.len() != self.roots.len() {
            return Err(Error::Length { expected: self.roots.len(), got: n.len() });
        }
        Ok(())
    }

    /// `|n| = Σ n_k β_k`.
    pub fn dimension_vector(&self, n: &[i64]) -> Result<Weight> {
        self.check_class(n)?;
        let mut w = Weight::zero(self.rs.rank());
        for (k, &c) in n.iter().enumerate() {
            w.add_scaled(&self.roots[k], c);
        }
        Ok(w)
    }

    /// `k ↦ Σ_t n_t h_{t,k}`, the dimensions `dim Hom(M, M(β_k))`.
    pub fn hom_vector(&self, n: &[i64]) -> Result<Vec<i64>> {
        self.check_class(n)?;
        Ok((0..n.len()).map(|k| n.iter().enumerate().map(|(t, &c)| c * self.h[t][k]).sum()).collect())
    }

    /// Riedtmann's criterion: the class `n2` lies in the orbit closure of `n1`.
    pub fn degeneration_leq(&self, n1: &[i64], n2: &[i64]) -> Result<bool> {
        let (d1, d2) = (self.dimension_vector(n1)?, self.dimension_vector(n2)?);
        if d1 != d2 {
            return Err(Error::WeightMismatch(d1.to_string(), d2.to_string()));
        }
        let (h1, h2) = (self.hom_vector(n1)?, self.hom_vector(n2)?);
        Ok(h1.iter().zip(&h2).all(|(a, b)| a <= b))
    }

    /// `dim E_{V,Ω} − u E uᵀ`.
    pub fn orbit_dim(&self, u: &[i64]) -> Result<i64> {
        let d = self.dimension_vector(u)?;
        Ok(dim_rep_space(&self.orientation, &d) - quad(u, &self.e, u))
    }
}

/// `a M bᵀ`.
pub fn quad(a: &[i64], m: &[Vec<i64>], b: &[i64]) -> i64 {
    a.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(k, &x)| x * m[k].iter().zip(b).map(|(y, z)| y * z).sum::<i64>())
        .sum()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Roots `α_{i,j} = α_i + ⋯ + α_j`, written `(i, j)`.
type Interval = (u8, u8);

const M_ROWS: [&[Interval]; 14] = [
    &[(2, 2)],
    &[(1, 2)],
    &[(1, 2), (2, 4)],
    &[(1, 2), (2, 5)],
    &[(1, 2), (2, 3)],
    &[(2, 4)],
    &[(1, 4)],
    &[(1, 4), (2, 5)],
    &[(1, 4), (2, 3)],
    &[(2, 5)],
    &[(1, 5)],
    &[(1, 5), (2, 3)],
    &[(2, 3)],
    &[(1, 3)],
];

const N_ROWS: [&[Interval]; 14] = [
    &[],
    &[(1, 1)],
    &[(1, 4)],
    &[(1, 5)],
    &[(1, 3)],
    &[(3, 4)],
    &[(1, 1), (3, 4)],
    &[(1, 5), (3, 4)],
    &[(1, 3), (3, 4)],
    &[(3, 5)],
    &[(1, 1), (3, 5)],
    &[(1, 3), (3, 5)],
    &[(3, 3)],
    &[(1, 1), (3, 3)],
];

const W_ROWS: [[i64; 15]; 17] = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 1, 1],
    [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 1, 1, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 1, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, -1, 0, 0, -1, 0, 1, 1],
    [0, 0, 1, 1, 0, -1, 0, 0, 0, 0, 0, -1, 0, 1, 1],
    [0, 0, 0, 1, 0, 0, 0, -1, 0, 0, 0, -1, 0, 1, 1],
    [0, 0, 0, 0, 0, 1, 1, -1, -1, 0, 0, -1, 0, 1, 1],
    [0, 0, 0, 0, 0, 1, 1, 0, -1, -1, -1, 0, 1, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0, -1, -1, 0, 1, 1, 0],
    [0, 0, 0, 1, 1, 0, -1, 0, 0, 0, -1, 0, 1, 1, 0],
    [0, 0, 0, 0, 1, 1, 0, 0, -1, 0, -1, 0, 1, 1, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, -1, -1, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, -1, 0, 0, 1],
    [0, 0, 0, 0, 0, 1, 0, -1, 0, 0, 0, -1, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, -1, -1, 0, 0, 1, 0],
];

const X: [i64; 15] = [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, -1, -2, -1];
const X_PRIME: [i64; 15] = [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, -1, -1];
const Y: [i64; 15] = [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0];
const Z: [i64; 15] = [1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 0, 0, 0];
const S: [i64; 15] = [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];
const T: [i64; 15] = [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 1];

/// The extension data of the standard A5 quiver: the generators `w_k`, the
/// vectors `x, x′, y, z, s, t`, and the fourteen pairs `(n(M_t), n(N_t))`
/// of extensions of a module by `S_2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtTables {
    pub w: Vec<Vec<i64>>,
    pub x: Vec<i64>,
    pub x_prime: Vec<i64>,
    pub y: Vec<i64>,
    pub z: Vec<i64>,
    pub s: Vec<i64>,
    pub t: Vec<i64>,
    pub m: Vec<RepClass>,
    pub n: Vec<RepClass>,
}

impl ExtTables {
    /// Tables expressed in the root order of `q`, which must be the standard
    /// A5 quiver or another A5 quiver with the same root order.
    pub fn standard(q: &AdaptedQuiver) -> Result<Self> {
        if q.rs.label() != "A5" {
            return Err(Error::WrongType { what: "extension tables".into(), expected: "A5".into(), got: q.rs.label().into() });
        }
        let class = |rows: &[Interval]| -> Result<RepClass> {
            let mut n = vec![0i64; q.roots.len()];
            for &(i, j) in rows {
                let mut beta = Weight::zero(5);
                for c in i..=j {
                    beta.0[c as usize - 1] = 1;
                }
                let k = q.roots.iter().position(|r| *r == beta).ok_or_else(|| Error::NotPositive(beta.to_string()))?;
                n[k] += 1;
            }
            Ok(n)
        };
        Ok(ExtTables {
            w: W_ROWS.iter().map(|r| r.to_vec()).collect(),
            x: X.to_vec(),
            x_prime: X_PRIME.to_vec(),
            y: Y.to_vec(),
            z: Z.to_vec(),
            s: S.to_vec(),
            t: T.to_vec(),
            m: M_ROWS.iter().map(|r| class(r)).collect::<Result<_>>()?,
            n: N_ROWS.iter().map(|r| class(r)).collect::<Result<_>>()?,
        })
    }

    /// `n(M_t) − n(N_t) − x′`.
    pub fn row_target(&self, t: usize) -> Vec<i64> {
        (0..self.x_prime.len()).map(|k| self.m[t][k] - self.n[t][k] - self.x_prime[k]).collect()
    }
}

/// Outcome of [`cone_membership`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ConeResult {
    /// Coefficients of a combination with the least possible total.
    Member { coefficients: Vec<u32> },
    /// The target is not even in the rational span of the generators.
    NotMember,
    /// In the rational span, but no combination within the search bounds.
    BoundExceeded { max_coeff: u32, max_total: u32 },
}

/// Bounds for [`cone_membership`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeBounds {
    pub max_coeff: u32,
    pub max_total: u32,
}

impl Default for ConeBounds {
    fn default() -> Self {
        ConeBounds { max_coeff: 8, max_total: 24 }
    }
}

/// Searches for `target = Σ c_k gens_k` with `c_k ∈ ℕ`, by iterative
/// deepening on `Σ c_k`.
pub fn cone_membership(target: &[i64], gens: &[Vec<i64>], bounds: ConeBounds) -> Result<ConeResult> {
    let dim = target.len();
    if let Some(g) = gens.iter().find(|g| g.len() != dim) {
        return Err(Error::Length { expected: dim, got: g.len() });
    }
    if !in_rational_span(target, gens) {
        return Ok(ConeResult::NotMember);
    }
    // Per-coordinate largest positive and negative entries among gens[k..].
    let mut hi = vec![vec![0i64; dim]; gens.len() + 1];
    let mut lo = vec![vec![0i64; dim]; gens.len() + 1];
    for k in (0..gens.len()).rev() {
        for j in 0..dim {
            hi[k][j] = hi[k + 1][j].max(gens[k][j]);
            lo[k][j] = lo[k + 1][j].min(gens[k][j]);
        }
    }
    struct Search<'a> {
        gens: &'a [Vec<i64>],
        hi: Vec<Vec<i64>>,
        lo: Vec<Vec<i64>>,
        max_coeff: u32,
        coeffs: Vec<u32>,
    }
    impl Search<'_> {
        fn go(&mut self, k: usize, residual: &mut [i64], budget: u32) -> bool {
            let b = budget as i64;
            for j in 0..residual.len() {
                if residual[j] > b * self.hi[k][j] || residual[j] < b * self.lo[k][j] {
                    return false;
                }
            }
            if k == self.gens.len() {
                return budget == 0 && residual.iter().all(|&r| r == 0);
            }
            for c in (0..=budget.min(self.max_coeff)).rev() {
                for (r, g) in residual.iter_mut().zip(&self.gens[k]) {
                    *r -= c as i64 * g;
                }
                self.coeffs[k] = c;
                let found = self.go(k + 1, residual, budget - c);
                for (r, g) in residual.iter_mut().zip(&self.gens[k]) {
                    *r += c as i64 * g;
                }
                if found {
                    return true;
                }
            }
            self.coeffs[k] = 0;
            false
        }
    }
    let mut search = Search { gens, hi, lo, max_coeff: bounds.max_coeff, coeffs: vec![0; gens.len()] };
    for total in 0..=bounds.max_total {
        let mut residual = target.to_vec();
        if search.go(0, &mut residual, total) {
            return Ok(ConeResult::Member { coefficients: search.coeffs });
        }
    }
    Ok(ConeResult::BoundExceeded { max_coeff: bounds.max_coeff, max_total: bounds.max_total })
}

/// Rank test by fraction-free elimination.
fn in_rational_span(target: &[i64], gens: &[Vec<i64>]) -> bool {
    fn rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, piv);
            for i in r + 1..m.len() {
                let (a, b) = (m[r][c], m[i][c]);
                if b == 0 {
                    continue;
                }
                let g = gcd(a, b);
                let (ka, kb) = (b / g, a / g);
                for j in 0..cols {
                    m[i][j] = m[i][j] * kb - m[r][j] * ka;
                }
            }
            r += 1;
        }
        r
    }
    fn gcd(a: i128, b: i128) -> i128 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let mut with = gens.to_vec();
    with.push(target.to_vec());
    rank(gens) == rank(&with)
}

/// Verdict for one row of the extension tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub t: usize,
    pub dimension_ok: bool,
    pub membership: ConeResult,
}

/// Checks `|n(M_t)| = |n(N_t)| + α_2` and cone membership of
/// `n(M_t) − n(N_t) − x′` for every row.
pub fn check_rows(q: &AdaptedQuiver, tables: &ExtTables, bounds: ConeBounds) -> Result<Vec<RowCheck>> {
    let a2 = Weight::simple(5, 2);
    (0..tables.m.len())
        .map(|t| {
            let dm = q.dimension_vector(&tables.m[t])?;
            let dn = q.dimension_vector(&tables.n[t])?;
            Ok(RowCheck {
                t: t + 1,
                dimension_ok: dm == dn + a2.clone(),
                membership: cone_membership(&tables.row_target(t), &tables.w, bounds)?,
            })
        })
        .collect()
}

/// The functional `Δ` on the standard A5 quiver, for the flag type of `η_p`
/// in case I.
#[derive(Clone, Debug)]
pub struct DeltaContext {
    q: AdaptedQuiver,
    tables: ExtTables,
    nu: Weight,
    /// `W E Wᵀ`.
    wewt: Vec<Vec<i64>>,
}

impl DeltaContext {
    pub fn new(q: AdaptedQuiver, tables: ExtTables) -> Result<Self> {
        if tables.w.iter().any(|r| r.len() != q.roots.len()) {
            return Err(Error::Length { expected: q.roots.len(), got: tables.w[0].len() });
        }
        let nu = Case::I.nu();
        let wewt = tables.w.iter().map(|a| tables.w.iter().map(|b| quad(a, &q.e, b)).collect()).collect();
        Ok(DeltaContext { q, tables, nu, wewt })
    }

    pub fn standard() -> Result<Self> {
        let q = AdaptedQuiver::standard_a5()?;
        let tables = ExtTables::standard(&q)?;
        Self::new(q, tables)
    }

    pub fn quiver(&self) -> &AdaptedQuiver {
        &self.q
    }

    pub fn tables(&self) -> &ExtTables {
        &self.tables
    }

    /// `L_i = pν_i − |v|_i`; all five vanish iff `|v| = pν`.
    pub fn constraints(&self, p: i64, v: &[i64]) -> Result<Vec<i64>> {
        let d = self.q.dimension_vector(v)?;
        Ok((0..5).map(|i| p * self.nu.0[i] - d.0[i]).collect())
    }

    fn validate(&self, p: i64, v: &[i64], tau: &[i64]) -> Result<()> {
        if tau.len() != self.tables.w.len() {
            return Err(Error::Length { expected: self.tables.w.len(), got: tau.len() });
        }
        if p < 0 || v.iter().chain(tau).any(|&x| x < 0) {
            return Err(Error::Constraint("p, v and tau must be nonnegative".into()));
        }
        let l = self.constraints(p, v)?;
        if l.iter().any(|&x| x != 0) {
            return Err(Error::Constraint(format!("|v| != p·nu, L = {l:?}")));
        }
        Ok(())
    }

    /// `u = v + p y + τ W`.
    pub fn u_of(&self, p: i64, v: &[i64], tau: &[i64]) -> Vec<i64> {
        let mut u: Vec<i64> = v.iter().zip(&self.tables.y).map(|(a, b)| a + p * b).collect();
        for (k, &c) in tau.iter().enumerate() {
            if c != 0 {
                for (x, w) in u.iter_mut().zip(&self.tables.w[k]) {
                    *x += c * w;
                }
            }
        }
        u
    }

    /// `Δ = −4p² + u E uᵀ − 2p u·s − 2(u − p s − v) H vᵀ` with
    /// `u = v + p y + τ W`.
    pub fn delta(&self, p: i64, v: &[i64], tau: &[i64]) -> Result<i64> {
        self.validate(p, v, tau)?;
        Ok(self.delta_of_u(p, &self.u_of(p, v, tau), v))
    }

    fn delta_of_u(&self, p: i64, u: &[i64], v: &[i64]) -> i64 {
        let s = &self.tables.s;
        let w: Vec<i64> = (0..u.len()).map(|k| u[k] - p * s[k] - v[k]).collect();
        -4 * p * p + quad(u, &self.q.e, u) - 2 * p * dot(u, s) - 2 * quad(&w, &self.q.h, v)
    }

    /// The same quantity assembled from its geometric pieces:
    /// `dim F̃ − 2 dim(fiber) − dim O_u`, with the flag-bundle and orbit
    /// dimensions computed from first principles.
    pub fn delta_stepwise(&self, p: i64, v: &[i64], tau: &[i64]) -> Result<i64> {
        self.validate(p, v, tau)?;
        let u = self.u_of(p, v, tau);
        let (j, a) = Case::I.eta(p as u32).flag_type();
        let total = flag_bundle_dim(&self.q.orientation, &j, &a)?;
        let grass = p * dot(&u, &self.tables.s) - 2 * p * p;
        let u_ps: Vec<i64> = u.iter().zip(&self.tables.s).map(|(x, s)| x - p * s).collect();
        let hom_v = quad(&u_ps, &self.q.h, v) - quad(v, &self.q.h, v);
        let orbit = self.q.orbit_dim(&u)?;
        Ok(total - 2 * (grass + hom_v) - orbit)
    }

    /// Feasible `v` with entries in `0..=v_max` and `|v| = pν`, in
    /// lexicographic order.
    pub fn feasible_v(&self, p: i64, v_max: i64) -> Vec<RepClass> {
        let n = self.q.roots.len();
        let target: Vec<i64> = self.nu.0.iter().map(|x| p * x).collect();
        let mut out = Vec::new();
        let mut v = vec![0i64; n];
        let mut residual = target;
        // For each suffix, which vertices it can still fill.
        let mut reach = vec![vec![false; 5]; n + 1];
        for k in (0..n).rev() {
            for i in 0..5 {
                reach[k][i] = reach[k + 1][i] || self.q.roots[k].0[i] > 0;
            }
        }
        fn go(q: &AdaptedQuiver, reach: &[Vec<bool>], k: usize, v_max: i64, v: &mut Vec<i64>, residual: &mut Vec<i64>, out: &mut Vec<RepClass>) {
            if residual.iter().enumerate().any(|(i, &r)| r < 0 || (r > 0 && !reach[k][i])) {
                return;
            }
            if k == v.len() {
                out.push(v.clone());
                return;
            }
            for c in 0..=v_max {
                v[k] = c;
                for i in 0..5 {
                    residual[i] -= c * q.roots[k].0[i];
                }
                go(q, reach, k + 1, v_max, v, residual, out);
                for i in 0..5 {
                    residual[i] += c * q.roots[k].0[i];
                }
            }
            v[k] = 0;
        }
        go(&self.q, &reach, 0, v_max, &mut v, &mut residual, &mut out);
        out
    }

    /// The classes `v = (p − 2s) y + s z`, `0 ≤ s ≤ p`, where `Δ` vanishes at
    /// `τ = 0`.
    pub fn equality_locus(&self, p: i64) -> Vec<(i64, RepClass)> {
        (0..=p)
            .map(|s| (s, (0..self.tables.y.len()).map(|k| (p - 2 * s) * self.tables.y[k] + s * self.tables.z[k]).collect()))
            .collect()
    }
}

/// Grid for [`delta_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanGrid {
    pub max_p: i64,
    pub v_max: i64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { max_p: 2, v_max: 2 }
    }
}

/// A grid point, `τ ∈ {0,1}^17` stored as a bit mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaPoint {
    pub p: i64,
    pub v: RepClass,
    pub tau: Vec<i64>,
    pub delta: i64,
}

/// Aggregate of a scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub grid: ScanGrid,
    pub feasible_v: Vec<usize>,
    pub points: u64,
    pub points_with_u_nonnegative: u64,
    pub negative: u64,
    pub min_delta: i64,
    pub zeros: Vec<DeltaPoint>,
    /// Every zero lies on the expected locus and every locus point is a zero.
    pub locus_matches: bool,
}

fn tau_of_mask(mask: u32, len: usize) -> Vec<i64> {
    (0..len).map(|k| (mask >> k & 1) as i64).collect()
}

/// Per-`v` results of a scan.
struct VScan {
    points: u64,
    u_nonnegative: u64,
    negative: u64,
    min: i64,
    zero_masks: Vec<u32>,
    wanted: Vec<(u32, i64)>,
}

/// Scratch space owned by one worker.
struct ScanBuffers {
    linear: Vec<i64>,
    u_rows: Vec<Vec<i64>>,
}

impl DeltaContext {
    /// `W E Wᵀ` summed over the rows selected by each mask.
    fn quadratic_table(&self) -> Vec<i64> {
        let size = 1usize << self.tables.w.len();
        let q = &self.wewt;
        let mut quadratic = vec![0i64; size];
        for mask in 1..size {
            let k = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let mut cross = 0;
            let mut bits = rest;
            while bits != 0 {
                let l = bits.trailing_zeros() as usize;
                cross += q[k][l] + q[l][k];
                bits &= bits - 1;
            }
            quadratic[mask] = quadratic[rest] + q[k][k] + cross;
        }
        quadratic
    }

    fn scan_v(
        &self,
        p: i64,
        v: &[i64],
        first_index: u64,
        quadratic: &[i64],
        buf: &mut ScanBuffers,
        want: &(dyn Fn(u64, i64) -> bool + Sync),
    ) -> VScan {
        let n = self.q.roots.len();
        let u0 = self.u_of(p, v, &[]);
        let base = self.delta_of_u(p, &u0, v);
        let mut gvec = vec![0i64; n];
        for (j, g) in gvec.iter_mut().enumerate() {
            let mut acc = -2 * p * self.tables.s[j];
            for k in 0..n {
                acc += (self.q.e[j][k] + self.q.e[k][j]) * u0[k] - 2 * self.q.h[j][k] * v[k];
            }
            *g = acc;
        }
        let d: Vec<i64> = self.tables.w.iter().map(|w| dot(w, &gvec)).collect();
        let mut out = VScan { points: 0, u_nonnegative: 0, negative: 0, min: i64::MAX, zero_masks: Vec::new(), wanted: Vec::new() };
        buf.u_rows[0].copy_from_slice(&u0);
        for mask in 0..quadratic.len() {
            if mask > 0 {
                let k = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                buf.linear[mask] = buf.linear[rest] + d[k];
                let (head, tail) = buf.u_rows.split_at_mut(mask);
                for ((x, y), w) in tail[0].iter_mut().zip(&head[rest]).zip(&self.tables.w[k]) {
                    *x = y + w;
                }
            }
            let delta = base + buf.linear[mask] + quadratic[mask];
            out.points += 1;
            if buf.u_rows[mask].iter().all(|&x| x >= 0) {
                out.u_nonnegative += 1;
            }
            out.min = out.min.min(delta);
            if delta < 0 {
                out.negative += 1;
            }
            if delta == 0 {
                out.zero_masks.push(mask as u32);
            }
            if want(first_index + mask as u64, delta) {
                out.wanted.push((mask as u32, delta));
            }
        }
        out
    }
}

/// Evaluates `Δ` on every `(p, v, τ)` with `p ≤ max_p`, `v` feasible with
/// entries `≤ v_max`, and `τ ∈ {0,1}^17`. `want` receives the position of
/// each point in scan order and its value; `visit` then sees the selected
/// points in that order.
///
/// `Δ(τ) = Δ(0) + d·τ + τ (W E Wᵀ) τᵀ`; the quadratic part is tabulated
/// once and the linear part is accumulated over subsets. The classes `v`
/// are shared among `jobs` worker threads; the output does not depend on
/// `jobs`.
pub fn delta_scan(
    ctx: &DeltaContext,
    grid: ScanGrid,
    jobs: usize,
    want: impl Fn(u64, i64) -> bool + Sync,
    mut visit: impl FnMut(&DeltaPoint),
) -> Result<ScanSummary> {
    if grid.max_p < 0 || grid.v_max < 0 {
        return Err(Error::Constraint("scan bounds must be nonnegative".into()));
    }
    if jobs == 0 {
        return Err(Error::Constraint("jobs must be positive".into()));
    }
    let g = ctx.tables.w.len();
    let n = ctx.q.roots.len();
    let size = 1usize << g;
    let quadratic = ctx.quadratic_table();
    let mut summary = ScanSummary {
        grid,
        feasible_v: Vec::new(),
        points: 0,
        points_with_u_nonnegative: 0,
        negative: 0,
        min_delta: i64::MAX,
        zeros: Vec::new(),
        locus_matches: true,
    };
    let want: &(dyn Fn(u64, i64) -> bool + Sync) = &want;
    for p in 0..=grid.max_p {
        let vs = ctx.feasible_v(p, grid.v_max);
        summary.feasible_v.push(vs.len());
        let expected: BTreeSet<RepClass> =
            ctx.equality_locus(p).into_iter().map(|(_, v)| v).filter(|v| v.iter().all(|&x| x <= grid.v_max)).collect();
        let mut found = BTreeSet::new();
        let offset = summary.points;
        let next = AtomicUsize::new(0);
        let workers = jobs.min(vs.len()).max(1);
        std::thread::scope(|scope| {
            let (tx, rx) = mpsc::sync_channel::<(usize, VScan)>(2 * workers);
            for _ in 0..workers {
                let tx = tx.clone();
                let (vs, quadratic, next) = (&vs, &quadratic, &next);
                scope.spawn(move || {
                    let mut buf = ScanBuffers { linear: vec![0; size], u_rows: vec![vec![0; n]; size] };
                    loop {
                        let idx = next.fetch_add(1, Ordering::Relaxed);
                        if idx >= vs.len() {
                            break;
                        }
                        let first = offset + (idx * size) as u64;
                        let r = ctx.scan_v(p, &vs[idx], first, quadratic, &mut buf, want);
                        if tx.send((idx, r)).is_err() {
                            break;
                        }
                    }
                });
            }
            drop(tx);
            // Results arrive out of order; emit them by index.
            let mut pending = BTreeMap::new();
            let mut due = 0usize;
            for (idx, r) in rx {
                pending.insert(idx, r);
                while let Some(r) = pending.remove(&due) {
                    let v = &vs[due];
                    summary.points += r.points;
                    summary.points_with_u_nonnegative += r.u_nonnegative;
                    summary.negative += r.negative;
                    summary.min_delta = summary.min_delta.min(r.min);
                    for &mask in &r.zero_masks {
                        if mask != 0 || !expected.contains(v) {
                            summary.locus_matches = false;
                        }
                        found.insert(v.clone());
                        summary.zeros.push(DeltaPoint { p, v: v.clone(), tau: tau_of_mask(mask, g), delta: 0 });
                    }
                    for &(mask, delta) in &r.wanted {
                        visit(&DeltaPoint { p, v: v.clone(), tau: tau_of_mask(mask, g), delta });
                    }
                    due += 1;
                }
            }
        });
        if found != expected {
            summary.locus_matches = false;
        }
    }
    Ok(summary)
}

impl FromStr for ScanGrid {
    type Err = Error;
    /// `p=2,v=2`.
    fn from_str(s: &str) -> Result<Self> {
        let mut grid = ScanGrid::default();
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
            let v: i64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number `{v}`")))?;
            match k.trim() {
                "p" => grid.max_p = v,
                "v" => grid.v_max = v,
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> (Arc<RootSystem>, Orientation) {
        let rs = RootSystem::of("A2").unwrap();
        let o = Orientation::new(rs.cartan(), vec![(1, 2)]).unwrap();
        (rs, o)
    }

    #[test]
    fn euler_and_ringel() {
        let (rs, o) = a2();
        let (a1, a2, a12) = (Weight(vec![1, 0]), Weight(vec![0, 1]), Weight(vec![1, 1]));
        assert_eq!(euler_form(&o, &a1, &a2), -1);
        assert_eq!(euler_form(&o, &a12, &a12), 1);
        assert_eq!(hom_dim(&rs, &o, &a2, &a12).unwrap(), 1);
        assert_eq!(ext_dim(&rs, &o, &a1, &a2).unwrap(), 1);
        assert_eq!(hom_dim(&rs, &o, &a1, &a2).unwrap(), 0);
        assert!(hom_dim(&rs, &o, &Weight(vec![2, 1]), &a1).is_err());
    }

    #[test]
    fn orientations() {
        let rs = RootSystem::of("A3").unwrap();
        assert_eq!(all_orientations(rs.cartan()).len(), 4);
        assert_eq!(all_orientations(RootSystem::of("D4").unwrap().cartan()).len(), 8);
        assert!(Orientation::parse(rs.cartan(), "1->2").is_err());
        assert!(Orientation::parse(rs.cartan(), "1->3, 2->3").is_err());
        let o = Orientation::parse(rs.cartan(), "1->2, 3->2").unwrap();
        assert!(o.is_sink(2) && !o.is_sink(1));
        assert_eq!(o.reflect_at(2).to_string(), "2->1, 2->3");
    }

    #[test]
    fn adapted_words() {
        let (rs, _) = a2();
        let o = Orientation::new(rs.cartan(), vec![(2, 1)]).unwrap();
        assert!(is_adapted(&rs, &"1,2,1".parse().unwrap(), &o));
        assert!(!is_adapted(&rs, &"2,1,2".parse().unwrap(), &o));
        for rs in ["A3", "A5", "D4"].map(|t| RootSystem::of(t).unwrap()) {
            for o in all_orientations(rs.cartan()) {
                let w = adapted_word(&rs, &o).unwrap();
                assert!(is_adapted(&rs, &w, &o));
            }
        }
        let q = AdaptedQuiver::standard_a5().unwrap();
        assert_eq!(q.roots()[0], Weight(vec![0, 1, 0, 0, 0]));
    }

    #[test]
    fn degeneration_and_orbits() {
        let (rs, o) = a2();
        let q = AdaptedQuiver::from_orientation(rs, o).unwrap();
        assert_eq!(q.word().to_string(), "(2,1,2)");
        assert!(q.degeneration_leq(&[0, 1, 0], &[1, 0, 1]).unwrap());
        assert!(!q.degeneration_leq(&[1, 0, 1], &[0, 1, 0]).unwrap());
        assert!(q.degeneration_leq(&[1, 0, 0], &[0, 1, 0]).is_err());
        assert_eq!(q.orbit_dim(&[1, 0, 1]).unwrap(), 0);
        assert_eq!(q.orbit_dim(&[0, 1, 0]).unwrap(), 1);
        // Ext vanishes from earlier to later indecomposables.
        for k in 0..3 {
            for l in k..3 {
                assert_eq!(q.ext_matrix()[k][l], 0);
            }
        }
    }

    #[test]
    fn flag_dimensions() {
        let q = AdaptedQuiver::standard_a5().unwrap();
        for p in 1..=3u32 {
            let (j, a) = Case::I.eta(p).flag_type();
            assert_eq!(flag_bundle_dim(q.orientation(), &j, &a).unwrap(), 40 * (p * p) as i64);
            let d = Case::I.nu().scaled(2 * p as i64);
            assert_eq!(dim_rep_space(q.orientation(), &d), 48 * (p * p) as i64);
        }
        assert_eq!(flag_bundle_dim(q.orientation(), &[3], &[4]).unwrap(), 0);
    }

    #[test]
    fn cone_basics() {
        let gens = vec![vec![1, 0], vec![1, 1]];
        assert_eq!(cone_membership(&[0, 0], &gens, ConeBounds::default()).unwrap(), ConeResult::Member { coefficients: vec![0, 0] });
        assert_eq!(cone_membership(&[3, 1], &gens, ConeBounds::default()).unwrap(), ConeResult::Member { coefficients: vec![2, 1] });
        assert!(matches!(cone_membership(&[-1, 0], &gens, ConeBounds::default()).unwrap(), ConeResult::BoundExceeded { .. }));
        let line = vec![vec![1, 1]];
        assert_eq!(cone_membership(&[1, 0], &line, ConeBounds::default()).unwrap(), ConeResult::NotMember);
    }

    #[test]
    fn tables_rows() {
        let ctx = DeltaContext::standard().unwrap();
        let rows = check_rows(ctx.quiver(), ctx.tables(), ConeBounds::default()).unwrap();
        assert!(rows.iter().all(|r| r.dimension_ok && matches!(r.membership, ConeResult::Member { .. })));
        let unit = |k: usize| {
            let mut c = vec![0u32; 17];
            c[k] = 1;
            ConeResult::Member { coefficients: c }
        };
        assert_eq!(rows[0].membership, unit(0));
        assert_eq!(rows[1].membership, unit(2));
    }

    #[test]
    fn delta_on_locus() {
        let ctx = DeltaContext::standard().unwrap();
        let zero = vec![0i64; 17];
        for p in 0..=3 {
            for (_, v) in ctx.equality_locus(p) {
                assert_eq!(ctx.delta(p, &v, &zero).unwrap(), 0);
                assert_eq!(ctx.delta_stepwise(p, &v, &zero).unwrap(), 0);
            }
        }
        let bad = vec![1i64; 15];
        assert!(ctx.delta(1, &bad, &zero).is_err());
    }
}
