//! Finite simply-laced root data.
//!
//! Weights live in the root lattice and are written in simple-root
//! coordinates. Coweights are stored by their pairings with the simple roots.
//! Node indices are 1-based throughout the public API.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of reduced words of `w0` that will be enumerated.
pub const DEFAULT_WORD_CAP: usize = 500_000;

/// Largest Weyl group the validation gate accepts.
pub const WEYL_CAP: usize = 100_000;

/// An element of the root lattice in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// The simple root `α_i` (1-based `i`).
    pub fn simple(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i - 1] = 1;
        Weight(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Every coordinate is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn add_scaled(&mut self, other: &Weight, k: i64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += k * b;
        }
    }

    pub fn scaled(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(mut self, rhs: Weight) -> Weight {
        self += &rhs;
        self
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(mut self, rhs: Weight) -> Weight {
        self -= &rhs;
        self
    }
}

impl<'a> Add<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        self.clone() + rhs.clone()
    }
}

impl<'a> Sub<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        self.clone() - rhs.clone()
    }
}

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, rhs: &Weight) {
        self.add_scaled(rhs, 1);
    }
}

impl SubAssign<&Weight> for Weight {
    fn sub_assign(&mut self, rhs: &Weight) {
        self.add_scaled(rhs, -1);
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        self.scaled(-1)
    }
}

impl Mul<Weight> for i64 {
    type Output = Weight;
    fn mul(self, rhs: Weight) -> Weight {
        rhs.scaled(self)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}α{}", j + 1)?;
            } else {
                write!(f, "{sign}{mag}α{}", j + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A coweight, stored as its pairings `⟨γ, α_j⟩` with the simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    /// The fundamental coweight `ω_i^∨`.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i - 1] = 1;
        Coweight(v)
    }

    pub fn pair(&self, w: &Weight) -> i64 {
        self.0.iter().zip(&w.0).map(|(a, b)| a * b).sum()
    }

    pub fn negated(&self) -> Coweight {
        Coweight(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (j, c) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "⟩")
    }
}

/// A word in the simple reflections, letters 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeylWord(pub Vec<u8>);

impl WeylWord {
    pub fn new(letters: impl Into<Vec<u8>>) -> Self {
        WeylWord(letters.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn reversed(&self) -> WeylWord {
        WeylWord(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for WeylWord {
    type Err = Error;

    /// Accepts `1,2,1`, `(1 2 1)`, `[1, 2, 1]` or the compact `121`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_matches(|c| matches!(c, '(' | ')' | '[' | ']'));
        let parts: Vec<&str> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        let letters: Vec<u8> = if parts.len() == 1 && parts[0].len() > 1 {
            parts[0]
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Parse(format!("bad word `{s}`")))?
        } else {
            parts
                .iter()
                .map(|p| p.parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad word `{s}`")))?
        };
        if letters.contains(&0) {
            return Err(Error::Parse(format!("letters are 1-based in `{s}`")));
        }
        Ok(WeylWord(letters))
    }
}

/// A single braid relation applied to a word at a 0-based position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BraidMove {
    /// `ij → ji` for commuting `i, j`.
    Commute(usize),
    /// `iji → jij` for adjacent `i, j`.
    Braid(usize),
}

impl BraidMove {
    pub fn position(self) -> usize {
        match self {
            BraidMove::Commute(k) | BraidMove::Braid(k) => k,
        }
    }

    pub fn apply_to_word(self, w: &mut [u8]) {
        match self {
            BraidMove::Commute(k) => w.swap(k, k + 1),
            BraidMove::Braid(k) => {
                let (i, j) = (w[k], w[k + 1]);
                w[k] = j;
                w[k + 1] = i;
                w[k + 2] = j;
            }
        }
    }

    /// The matching piecewise-linear change of Lusztig coordinates.
    pub fn apply_to_coords(self, n: &mut [u32]) {
        match self {
            BraidMove::Commute(k) => n.swap(k, k + 1),
            BraidMove::Braid(k) => {
                let (a, b, c) = (n[k], n[k + 1], n[k + 2]);
                let p = a.min(c);
                n[k] = b + c - p;
                n[k + 1] = p;
                n[k + 2] = a + b - p;
            }
        }
    }
}

/// A validated simply-laced Cartan matrix with its reference word for `w0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanData {
    label: String,
    matrix: Vec<Vec<i64>>,
    reference_word: WeylWord,
}

impl CartanData {
    /// One of the presets `A1`..`A6` or `D4`.
    pub fn preset(label: &str) -> Result<Self> {
        let label = label.trim();
        if label == "D4" {
            let mut m = identity_cartan(4);
            for j in [1, 3, 4] {
                connect(&mut m, 2, j);
            }
            let word = WeylWord((0..3).flat_map(|_| [2u8, 1, 3, 4]).collect());
            return Self::new("D4", m, word);
        }
        let n: usize = label
            .strip_prefix('A')
            .and_then(|r| r.parse().ok())
            .filter(|n| (1..=6).contains(n))
            .ok_or_else(|| Error::UnknownType(label.to_string()))?;
        let mut m = identity_cartan(n);
        for i in 1..n {
            connect(&mut m, i, i + 1);
        }
        let mut word = Vec::new();
        for k in 1..=n as u8 {
            word.extend((1..=k).rev());
        }
        Self::new(label, m, WeylWord(word))
    }

    /// Validation gate for arbitrary simply-laced matrices: symmetric, 2 on
    /// the diagonal, off-diagonal entries in {0, -1}, positive definite, and
    /// `reference_word` a reduced word of the longest element.
    pub fn new(label: &str, matrix: Vec<Vec<i64>>, reference_word: WeylWord) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::InvalidCartan("empty matrix".into()));
        }
        if n > 15 {
            return Err(Error::InvalidCartan(format!("rank {n} is too large")));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCartan("matrix is not square".into()));
            }
            for (j, &a) in row.iter().enumerate() {
                let ok = if i == j { a == 2 } else { a == 0 || a == -1 };
                if !ok || matrix[j][i] != a {
                    return Err(Error::InvalidCartan(format!(
                        "entry ({}, {}) = {a} is not simply-laced",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for k in 1..=n {
            if leading_minor(&matrix, k) <= 0 {
                return Err(Error::InvalidCartan(
                    "matrix is not positive definite (not of finite type)".into(),
                ));
            }
        }
        for &l in &reference_word.0 {
            if l == 0 || l as usize > n {
                return Err(Error::IndexOutOfRange { index: l as usize, rank: n });
            }
        }
        Ok(CartanData { label: label.to_string(), matrix, reference_word })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// `a_ij` for 1-based `i, j`.
    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.matrix[i - 1][j - 1]
    }

    pub fn reference_word(&self) -> &WeylWord {
        &self.reference_word
    }

    /// Unordered Dynkin edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(u8, u8)> {
        let n = self.rank();
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                if self.a(i, j) == -1 {
                    out.push((i as u8, j as u8));
                }
            }
        }
        out
    }

    /// `s_i λ = λ - ⟨α_i^∨, λ⟩ α_i`.
    pub fn reflect_weight(&self, i: usize, lambda: &Weight) -> Weight {
        let c: i64 = (1..=self.rank()).map(|j| self.a(i, j) * lambda.0[j - 1]).sum();
        let mut out = lambda.clone();
        out.0[i - 1] -= c;
        out
    }

    pub fn reflect_coweight(&self, i: usize, gamma: &Coweight) -> Coweight {
        let ci = gamma.0[i - 1];
        Coweight((1..=self.rank()).map(|j| gamma.0[j - 1] - self.a(i, j) * ci).collect())
    }

    /// `⟨α_i^∨, λ⟩`.
    pub fn coroot_pairing(&self, i: usize, lambda: &Weight) -> i64 {
        (1..=self.rank()).map(|j| self.a(i, j) * lambda.0[j - 1]).sum()
    }
}

fn identity_cartan(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 2 } else { 0 }).collect()).collect()
}

fn connect(m: &mut [Vec<i64>], i: usize, j: usize) {
    m[i - 1][j - 1] = -1;
    m[j - 1][i - 1] = -1;
}

/// Fraction-free determinant of the leading `k × k` minor.
fn leading_minor(m: &[Vec<i64>], k: usize) -> i128 {
    let mut a: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| m[i][j] as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for p in 0..k {
        if a[p][p] == 0 {
            match (p + 1..k).find(|&r| a[r][p] != 0) {
                Some(r) => {
                    a.swap(p, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
            }
        }
        prev = a[p][p];
    }
    sign * a[k - 1][k - 1]
}

/// A Weyl group element stored as the images of the simple roots.
#[derive(Clone, Debug)]
pub struct WeylElement {
    images: Vec<i64>,
    word: WeylWord,
    rank: usize,
}

impl WeylElement {
    /// A reduced word for this element (a BFS-minimal prefix word).
    pub fn word(&self) -> &WeylWord {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// `w(α_j)` for 1-based `j`.
    pub fn image(&self, j: usize) -> Weight {
        let n = self.rank;
        Weight(self.images[(j - 1) * n..j * n].to_vec())
    }
}

/// The finite Weyl group, each element with a reduced word.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
    index: HashMap<Vec<i64>, usize>,
    longest: usize,
    rank: usize,
}

impl WeylGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn get(&self, k: usize) -> &WeylElement {
        &self.elements[k]
    }

    /// Index of the longest element.
    pub fn longest(&self) -> usize {
        self.longest
    }

    /// Index of the element represented by `images`, if any.
    pub(crate) fn lookup(&self, images: &[i64]) -> Option<usize> {
        self.index.get(images).copied()
    }

    pub(crate) fn images(&self, k: usize) -> &[i64] {
        &self.elements[k].images
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Root data, Weyl group and word combinatorics for one Cartan type.
pub struct RootSystem {
    data: CartanData,
    positive_roots: Vec<Weight>,
    weyl: WeylGroup,
    chamber: Vec<Coweight>,
    chamber_index: HashMap<Coweight, usize>,
    star: Vec<u8>,
    word_cap: usize,
    words: OnceLock<std::result::Result<Arc<Vec<WeylWord>>, Error>>,
    word_data: RwLock<HashMap<WeylWord, Arc<WordData>>>,
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RootSystem").field("label", &self.data.label).finish()
    }
}

/// Roots and chamber coweights attached to a reduced word of `w0`.
#[derive(Clone, Debug)]
pub struct WordData {
    pub word: WeylWord,
    /// `β_k = s_{i_1} ⋯ s_{i_{k-1}} α_{i_k}`.
    pub roots: Vec<Weight>,
    /// `γ_k = -s_{i_1} ⋯ s_{i_k} ω^∨_{i_k}`.
    pub coweights: Vec<Coweight>,
    /// `pairing[k][t] = ⟨γ_k, β_t⟩`.
    pub pairing: Vec<Vec<i64>>,
}

static REGISTRY: OnceLock<Mutex<HashMap<String, Arc<RootSystem>>>> = OnceLock::new();

impl RootSystem {
    /// Shared, cached root system for a preset label.
    pub fn of(label: &str) -> Result<Arc<RootSystem>> {
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rs) = reg.lock().unwrap().get(label.trim()) {
            return Ok(rs.clone());
        }
        let rs = Arc::new(RootSystem::new(CartanData::preset(label)?)?);
        let mut guard = reg.lock().unwrap();
        Ok(guard.entry(rs.data.label.clone()).or_insert(rs).clone())
    }

    pub fn new(data: CartanData) -> Result<Self> {
        Self::with_word_cap(data, DEFAULT_WORD_CAP)
    }

    pub fn with_word_cap(data: CartanData, word_cap: usize) -> Result<Self> {
        let n = data.rank();
        let weyl = build_weyl_group(&data)?;
        let positive_roots = build_positive_roots(&data);
        let longest = &weyl.elements[weyl.longest];
        let mut star = vec![0u8; n];
        for j in 1..=n {
            let img = longest.image(j);
            let k = img.0.iter().position(|&c| c == -1).expect("w0 maps simple roots to negatives");
            star[j - 1] = (k + 1) as u8;
        }
        let chamber = build_chamber(&data);
        let chamber_index = chamber.iter().cloned().enumerate().map(|(k, g)| (g, k)).collect();
        let rs = RootSystem {
            data,
            positive_roots,
            weyl,
            chamber,
            chamber_index,
            star,
            word_cap,
            words: OnceLock::new(),
            word_data: RwLock::new(HashMap::new()),
        };
        rs.check_longest(rs.data.reference_word())?;
        Ok(rs)
    }

    pub fn cartan(&self) -> &CartanData {
        &self.data
    }

    pub fn label(&self) -> &str {
        self.data.label()
    }

    pub fn rank(&self) -> usize {
        self.data.rank()
    }

    /// Number of positive roots, the length of `w0`.
    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn positive_roots(&self) -> &[Weight] {
        &self.positive_roots
    }

    pub fn reference_word(&self) -> &WeylWord {
        self.data.reference_word()
    }

    pub fn weyl_group(&self) -> &WeylGroup {
        &self.weyl
    }

    /// Every element of `W` with a reduced word; any such word extends to a
    /// reduced word of `w0`.
    pub fn weyl_elements_with_prefix_words(&self) -> impl Iterator<Item = (usize, &WeylWord)> {
        self.weyl.elements.iter().enumerate().map(|(k, e)| (k, &e.word))
    }

    /// The diagram involution `i ↦ i*` with `w0 α_i = -α_{i*}`.
    pub fn star(&self, i: usize) -> usize {
        self.star[i - 1] as usize
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank() {
            Err(Error::IndexOutOfRange { index: i, rank: self.rank() })
        } else {
            Ok(())
        }
    }

    pub fn reflect_weight(&self, i: usize, lambda: &Weight) -> Weight {
        self.data.reflect_weight(i, lambda)
    }

    pub fn reflect_coweight(&self, i: usize, gamma: &Coweight) -> Coweight {
        self.data.reflect_coweight(i, gamma)
    }

    /// Images of the simple roots under the product of `word`.
    pub(crate) fn element_of_word(&self, word: &[u8]) -> Vec<i64> {
        let mut img = identity_images(self.rank());
        for &l in word {
            img = right_mul(&self.data, &img, l as usize);
        }
        img
    }

    /// Index of the element represented by `word`.
    pub fn element_index(&self, word: &WeylWord) -> Result<usize> {
        for &l in &word.0 {
            self.check_index(l as usize)?;
        }
        let img = self.element_of_word(&word.0);
        self.weyl.lookup(&img).ok_or_else(|| Error::Inconsistent(format!("{word} not found in W")))
    }

    /// Index of `w · w0`.
    pub fn times_longest(&self, k: usize) -> usize {
        let n = self.rank();
        let img = self.weyl.images(k);
        let mut out = vec![0; n * n];
        for j in 1..=n {
            let js = self.star(j);
            for c in 0..n {
                out[(j - 1) * n + c] = -img[(js - 1) * n + c];
            }
        }
        self.weyl.lookup(&out).expect("closed under multiplication")
    }

    /// Action of element `k` on a weight.
    pub fn act_on_weight(&self, k: usize, lambda: &Weight) -> Weight {
        let n = self.rank();
        let img = self.weyl.images(k);
        let mut out = Weight::zero(n);
        for j in 0..n {
            if lambda.0[j] != 0 {
                for c in 0..n {
                    out.0[c] += lambda.0[j] * img[j * n + c];
                }
            }
        }
        out
    }

    /// Action of element `k` on a coweight, computed along its reduced word.
    pub fn act_on_coweight(&self, k: usize, gamma: &Coweight) -> Coweight {
        let mut g = gamma.clone();
        for &l in self.weyl.get(k).word.0.iter().rev() {
            g = self.reflect_coweight(l as usize, &g);
        }
        g
    }

    /// Root-tracking reducedness test: every `s_{i_1}⋯s_{i_{k-1}} α_{i_k}`
    /// must be positive.
    pub fn is_reduced(&self, word: &WeylWord) -> bool {
        let n = self.rank();
        if word.0.iter().any(|&l| l == 0 || l as usize > n) {
            return false;
        }
        let mut img = identity_images(n);
        for &l in &word.0 {
            let j = l as usize - 1;
            if !img[j * n..(j + 1) * n].iter().all(|&c| c >= 0) {
                return false;
            }
            img = right_mul(&self.data, &img, l as usize);
        }
        true
    }

    /// Errors unless `word` is a reduced word of `w0`.
    pub fn check_longest(&self, word: &WeylWord) -> Result<()> {
        if word.len() != self.num_positive_roots() {
            return Err(Error::NotLongest {
                word: word.clone(),
                len: word.len(),
                expected: self.num_positive_roots(),
            });
        }
        if !self.is_reduced(word) {
            return Err(Error::NotReduced(word.clone()));
        }
        Ok(())
    }

    /// `β_1, …, β_N` for a reduced word of `w0`.
    pub fn roots_of_word(&self, word: &WeylWord) -> Result<Vec<Weight>> {
        Ok(self.word_data(word)?.roots.clone())
    }

    /// `γ_1, …, γ_N` for a reduced word of `w0`.
    pub fn chamber_coweights_of_word(&self, word: &WeylWord) -> Result<Vec<Coweight>> {
        Ok(self.word_data(word)?.coweights.clone())
    }

    /// Cached roots, coweights and pairings of a reduced word of `w0`.
    pub fn word_data(&self, word: &WeylWord) -> Result<Arc<WordData>> {
        if let Some(d) = self.word_data.read().unwrap().get(word) {
            return Ok(d.clone());
        }
        self.check_longest(word)?;
        let n = self.rank();
        let mut roots = Vec::with_capacity(word.len());
        let mut img = identity_images(n);
        for &l in &word.0 {
            let j = l as usize - 1;
            roots.push(Weight(img[j * n..(j + 1) * n].to_vec()));
            img = right_mul(&self.data, &img, l as usize);
        }
        let mut coweights = Vec::with_capacity(word.len());
        for k in 0..word.len() {
            let mut g = Coweight::fundamental(n, word.0[k] as usize);
            for &l in word.0[..=k].iter().rev() {
                g = self.reflect_coweight(l as usize, &g);
            }
            coweights.push(g.negated());
        }
        let pairing = coweights.iter().map(|g| roots.iter().map(|b| g.pair(b)).collect()).collect();
        let d = Arc::new(WordData { word: word.clone(), roots, coweights, pairing });
        self.word_data.write().unwrap().insert(word.clone(), d.clone());
        Ok(d)
    }

    /// The chamber coweights `Γ = W·{ω_i^∨}`.
    pub fn all_chamber_coweights(&self) -> &[Coweight] {
        &self.chamber
    }

    pub fn chamber_index(&self, gamma: &Coweight) -> Option<usize> {
        self.chamber_index.get(gamma).copied()
    }

    /// Words obtained from `word` by one commutation or braid relation.
    pub fn braid_neighbors(&self, word: &WeylWord) -> Vec<(BraidMove, WeylWord)> {
        self.braid_moves(&word.0)
            .into_iter()
            .map(|m| {
                let mut w = word.clone();
                m.apply_to_word(&mut w.0);
                (m, w)
            })
            .collect()
    }

    pub(crate) fn braid_moves(&self, w: &[u8]) -> Vec<BraidMove> {
        let mut out = Vec::new();
        for k in 0..w.len().saturating_sub(1) {
            let (i, j) = (w[k] as usize, w[k + 1] as usize);
            if i == j {
                continue;
            }
            match self.data.a(i, j) {
                0 => out.push(BraidMove::Commute(k)),
                _ => {
                    if k + 2 < w.len() && w[k + 2] as usize == i {
                        out.push(BraidMove::Braid(k));
                    }
                }
            }
        }
        out
    }

    /// All reduced words of `w0`, sorted; enumeration is lazy, cached and
    /// capped.
    pub fn reduced_words_w0(&self) -> Result<Arc<Vec<WeylWord>>> {
        self.words.get_or_init(|| self.enumerate_words()).clone()
    }

    fn enumerate_words(&self) -> std::result::Result<Arc<Vec<WeylWord>>, Error> {
        if let Some(words) = crate::cache::load_words(self)? {
            return Ok(Arc::new(words));
        }
        let start = self.reference_word().0.clone();
        let mut seen: std::collections::HashSet<Vec<u8>> = std::collections::HashSet::new();
        seen.insert(start.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for m in self.braid_moves(&w) {
                let mut v = w.clone();
                m.apply_to_word(&mut v);
                if seen.insert(v.clone()) {
                    if seen.len() > self.word_cap {
                        return Err(Error::WordCap(self.word_cap));
                    }
                    queue.push_back(v);
                }
            }
        }
        let mut words: Vec<WeylWord> = seen.into_iter().map(WeylWord).collect();
        words.sort();
        crate::cache::store_words(self, &words)?;
        Ok(Arc::new(words))
    }

    /// Lexicographically least reduced word of the element whose inverse has
    /// the given simple-root images.
    fn lex_least_from_inverse(&self, mut inv: Vec<i64>) -> Vec<u8> {
        let n = self.rank();
        let mut out = Vec::new();
        loop {
            let next = (1..=n).find(|&j| inv[(j - 1) * n..j * n].iter().any(|&c| c < 0));
            match next {
                Some(j) => {
                    out.push(j as u8);
                    inv = right_mul(&self.data, &inv, j);
                }
                None => return out,
            }
        }
    }

    /// Lexicographically least reduced word of `w0` beginning with `i`.
    pub fn i_first_word(&self, i: usize) -> Result<WeylWord> {
        self.check_index(i)?;
        // (s_i w0)^{-1} = w0 s_i
        let w0 = self.weyl.images(self.weyl.longest).to_vec();
        let inv = right_mul(&self.data, &w0, i);
        let mut word = vec![i as u8];
        word.extend(self.lex_least_from_inverse(inv));
        Ok(WeylWord(word))
    }

    /// A reduced word for element `k` followed by the lexicographically least
    /// completion to a reduced word of `w0`.
    pub fn extend_to_longest(&self, k: usize) -> WeylWord {
        let n = self.rank();
        let mut word = self.weyl.get(k).word.0.clone();
        let mut img = self.weyl.images(k).to_vec();
        loop {
            let next = (1..=n).find(|&j| img[(j - 1) * n..j * n].iter().all(|&c| c >= 0));
            match next {
                Some(j) => {
                    word.push(j as u8);
                    img = right_mul(&self.data, &img, j);
                }
                None => return WeylWord(word),
            }
        }
    }

    /// A sequence of braid moves turning `from` into `to`; both must be
    /// reduced words of the same element.
    ///
    /// The construction follows the usual proof of Matsumoto's theorem: when
    /// the first letters `s ≠ t` differ, both words are routed through words
    /// that begin with the longest element of the rank-two parabolic `⟨s, t⟩`.
    pub fn braid_path(&self, from: &WeylWord, to: &WeylWord) -> Result<Vec<BraidMove>> {
        if !self.is_reduced(from) {
            return Err(Error::NotReduced(from.clone()));
        }
        if !self.is_reduced(to) {
            return Err(Error::NotReduced(to.clone()));
        }
        if from.len() != to.len() || self.element_of_word(&from.0) != self.element_of_word(&to.0) {
            return Err(Error::DifferentElements(from.clone(), to.clone()));
        }
        let mut out = Vec::new();
        self.path_rec(&from.0, &to.0, 0, &mut out);
        debug_assert!({
            let mut w = from.0.clone();
            out.iter().for_each(|m| m.apply_to_word(&mut w));
            w == to.0
        });
        Ok(out)
    }

    fn path_rec(&self, a: &[u8], b: &[u8], offset: usize, out: &mut Vec<BraidMove>) {
        let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
        if common == a.len() {
            return;
        }
        let (a, b, offset) = (&a[common..], &b[common..], offset + common);
        let (s, t) = (a[0] as usize, b[0] as usize);
        let m = if self.data.a(s, t) == 0 { 2 } else { 3 };
        let alt = |x: usize, y: usize| -> Vec<u8> {
            (0..m).map(|k| if k % 2 == 0 { x as u8 } else { y as u8 }).collect()
        };
        // inverse of the remainder u = w_{st}^{-1} w, where w is the element of `a`
        let mut inv = identity_images(self.rank());
        for &l in a.iter().rev() {
            inv = right_mul(&self.data, &inv, l as usize);
        }
        for &l in &alt(s, t) {
            inv = right_mul(&self.data, &inv, l as usize);
        }
        let rest = self.lex_least_from_inverse(inv);
        let mut cs = alt(s, t);
        cs.extend_from_slice(&rest);
        let mut ct = alt(t, s);
        ct.extend_from_slice(&rest);
        self.path_rec(a, &cs, offset, out);
        out.push(if m == 2 { BraidMove::Commute(offset) } else { BraidMove::Braid(offset) });
        self.path_rec(&ct, b, offset, out);
    }

    /// Breadth-first shortest braid path, for words of `w0` when the full
    /// word graph is small enough to enumerate.
    pub fn shortest_braid_path(&self, from: &WeylWord, to: &WeylWord) -> Result<Vec<BraidMove>> {
        self.check_longest(from)?;
        self.check_longest(to)?;
        let mut parent: HashMap<Vec<u8>, (Vec<u8>, BraidMove)> = HashMap::new();
        let mut queue = VecDeque::from([from.0.clone()]);
        let mut seen = std::collections::HashSet::from([from.0.clone()]);
        while let Some(w) = queue.pop_front() {
            if w == to.0 {
                let mut path = Vec::new();
                let mut cur = w;
                while let Some((p, m)) = parent.get(&cur) {
                    path.push(*m);
                    cur = p.clone();
                }
                path.reverse();
                return Ok(path);
            }
            for m in self.braid_moves(&w) {
                let mut v = w.clone();
                m.apply_to_word(&mut v);
                if seen.insert(v.clone()) {
                    if seen.len() > self.word_cap {
                        return Err(Error::WordCap(self.word_cap));
                    }
                    parent.insert(v.clone(), (w.clone(), m));
                    queue.push_back(v);
                }
            }
        }
        Err(Error::DifferentElements(from.clone(), to.clone()))
    }
}

fn identity_images(n: usize) -> Vec<i64> {
    let mut img = vec![0; n * n];
    for j in 0..n {
        img[j * n + j] = 1;
    }
    img
}

/// Images of `w s_j` from those of `w`: `w s_j α_k = w α_k - a_jk w α_j`.
fn right_mul(data: &CartanData, img: &[i64], j: usize) -> Vec<i64> {
    let n = data.rank();
    let mut out = img.to_vec();
    for k in 1..=n {
        let a = data.a(j, k);
        if a != 0 {
            for c in 0..n {
                out[(k - 1) * n + c] -= a * img[(j - 1) * n + c];
            }
        }
    }
    out
}

fn build_weyl_group(data: &CartanData) -> Result<WeylGroup> {
    let n = data.rank();
    let id = identity_images(n);
    let mut elements = vec![WeylElement { images: id.clone(), word: WeylWord::default(), rank: n }];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut head = 0;
    while head < elements.len() {
        for j in 1..=n {
            let cur = &elements[head];
            // w s_j is longer exactly when w α_j > 0
            if cur.images[(j - 1) * n..j * n].iter().any(|&c| c < 0) {
                continue;
            }
            let img = right_mul(data, &cur.images, j);
            if !index.contains_key(&img) {
                let mut word = cur.word.clone();
                word.0.push(j as u8);
                index.insert(img.clone(), elements.len());
                elements.push(WeylElement { images: img, word, rank: n });
                if elements.len() > WEYL_CAP {
                    return Err(Error::WeylCap(WEYL_CAP));
                }
            }
        }
        head += 1;
    }
    let longest = elements
        .iter()
        .position(|e| e.images.iter().all(|&c| c <= 0))
        .ok_or_else(|| Error::InvalidCartan("no longest element".into()))?;
    Ok(WeylGroup { elements, index, longest, rank: n })
}

fn build_positive_roots(data: &CartanData) -> Vec<Weight> {
    let n = data.rank();
    let mut seen: BTreeSet<Weight> = (1..=n).map(|i| Weight::simple(n, i)).collect();
    let mut queue: VecDeque<Weight> = seen.iter().cloned().collect();
    while let Some(b) = queue.pop_front() {
        for i in 1..=n {
            let r = data.reflect_weight(i, &b);
            if r.is_nonnegative() && seen.insert(r.clone()) {
                queue.push_back(r);
            }
        }
    }
    let mut roots: Vec<Weight> = seen.into_iter().collect();
    roots.sort_by_key(|r| (r.height(), std::cmp::Reverse(r.0.clone())));
    roots
}

fn build_chamber(data: &CartanData) -> Vec<Coweight> {
    let n = data.rank();
    let mut seen: BTreeSet<Coweight> = (1..=n).map(|i| Coweight::fundamental(n, i)).collect();
    let mut queue: VecDeque<Coweight> = seen.iter().cloned().collect();
    while let Some(g) = queue.pop_front() {
        for i in 1..=n {
            let r = data.reflect_coweight(i, &g);
            if seen.insert(r.clone()) {
                queue.push_back(r);
            }
        }
    }
    seen.into_iter().collect()
}
