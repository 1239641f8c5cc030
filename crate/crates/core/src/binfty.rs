//! The crystal `B(-∞)` through Lusztig data.
//!
//! An element is stored by its Lusztig datum along the reference word of its
//! type. Data along other reduced words are reached by braid-move transitions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytopes::{self, VertexCharts};
use crate::rootsys::{BraidMove, RootSystem, Weight, WeylWord};
use crate::syntax;

/// Default cap on the height of weights handed to [`Crystal::enumerate_weight`].
pub const DEFAULT_HEIGHT_CAP: i64 = 12;

/// An element of `B(-∞)`: its Lusztig datum along the reference word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CrystalElt(pub Vec<u32>);

impl CrystalElt {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for CrystalElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A Lusztig datum along an arbitrary reduced word of `w0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LusztigDatum {
    pub word: WeylWord,
    pub coords: Vec<u32>,
}

/// The external JSON form of an element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EltJson {
    #[serde(rename = "type")]
    pub type_label: String,
    pub word: Vec<u8>,
    pub coords: Vec<u32>,
}

/// A product of raising operators `ẽ_{i_1}^{k_1} ⋯ ẽ_{i_m}^{k_m}`, applied
/// right to left.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EString(pub Vec<(u8, u32)>);

impl EString {
    /// Parses with `p` bound, so exponents like `2p` are allowed.
    pub fn parse_with(src: &str, p: Option<u32>) -> Result<Self> {
        Ok(EString(syntax::parse_factors(src, 'e', p)?))
    }

    /// Total number of raising steps, i.e. the height of the weight gained.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&(_, k)| k as u64).sum()
    }
}

impl FromStr for EString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, None)
    }
}

impl fmt::Display for EString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", syntax::render_factors(&self.0, 'e'))
    }
}

/// Crystal structure and chart transitions for one Cartan type.
pub struct Crystal {
    rs: Arc<RootSystem>,
    i_first: Vec<WeylWord>,
    i_first_paths: Vec<Arc<[BraidMove]>>,
    sigma_path: Arc<[BraidMove]>,
    paths: RwLock<HashMap<(WeylWord, WeylWord), Arc<[BraidMove]>>>,
    pub(crate) vertex_charts: OnceLock<std::result::Result<Arc<VertexCharts>, Error>>,
}

impl fmt::Debug for Crystal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Crystal").field("type", &self.rs.label()).finish()
    }
}

static CRYSTALS: OnceLock<Mutex<HashMap<String, Arc<Crystal>>>> = OnceLock::new();

impl Crystal {
    /// Shared crystal for a preset type (`A1`..`A6`, `D4`).
    pub fn of(label: &str) -> Result<Arc<Crystal>> {
        let reg = CRYSTALS.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = reg.lock().unwrap().get(label.trim()) {
            return Ok(c.clone());
        }
        let c = Arc::new(Crystal::new(RootSystem::of(label)?)?);
        let mut guard = reg.lock().unwrap();
        Ok(guard.entry(c.label().to_string()).or_insert(c).clone())
    }

    pub fn new(rs: Arc<RootSystem>) -> Result<Self> {
        let reference = rs.reference_word().clone();
        let mut i_first = Vec::new();
        let mut i_first_paths = Vec::new();
        for i in 1..=rs.rank() {
            let w = rs.i_first_word(i)?;
            i_first_paths.push(Arc::from(rs.braid_path(&reference, &w)?));
            i_first.push(w);
        }
        // The chain w_k w0 (k = N, …, 0) is the prefix chain of the reversed
        // word with every letter starred.
        let sigma_word = WeylWord(reference.0.iter().rev().map(|&l| rs.star(l as usize) as u8).collect());
        let sigma_path = Arc::from(rs.braid_path(&reference, &sigma_word)?);
        let (r, s) = (rs.word_data(&reference)?, rs.word_data(&sigma_word)?);
        if r.roots.iter().ne(s.roots.iter().rev()) {
            return Err(Error::Inconsistent("reversed starred word has mismatched roots".into()));
        }
        Ok(Crystal {
            rs,
            i_first,
            i_first_paths,
            sigma_path,
            paths: RwLock::new(HashMap::new()),
            vertex_charts: OnceLock::new(),
        })
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn label(&self) -> &str {
        self.rs.label()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    /// Number of Lusztig coordinates (positive roots).
    pub fn num_coords(&self) -> usize {
        self.rs.num_positive_roots()
    }

    pub fn reference_word(&self) -> &WeylWord {
        self.rs.reference_word()
    }

    /// The chart used to read `φ_i`: the lexicographically least reduced word
    /// of `w0` starting with `i`.
    pub fn i_first_word(&self, i: usize) -> Result<&WeylWord> {
        self.rs.check_index(i)?;
        Ok(&self.i_first[i - 1])
    }

    /// The highest weight element `1`.
    pub fn one(&self) -> CrystalElt {
        CrystalElt(vec![0; self.num_coords()])
    }

    /// Validates raw reference-word coordinates.
    pub fn element(&self, coords: Vec<u32>) -> Result<CrystalElt> {
        if coords.len() != self.num_coords() {
            return Err(Error::Length { expected: self.num_coords(), got: coords.len() });
        }
        Ok(CrystalElt(coords))
    }

    /// Cached braid path between two reduced words of `w0`.
    pub fn path(&self, from: &WeylWord, to: &WeylWord) -> Result<Arc<[BraidMove]>> {
        let key = (from.clone(), to.clone());
        if let Some(p) = self.paths.read().unwrap().get(&key) {
            return Ok(p.clone());
        }
        self.rs.check_longest(from)?;
        self.rs.check_longest(to)?;
        let p: Arc<[BraidMove]> = Arc::from(self.rs.braid_path(from, to)?);
        self.paths.write().unwrap().insert(key, p.clone());
        Ok(p)
    }

    /// Re-expresses a Lusztig datum along another reduced word of `w0`.
    pub fn transition(&self, d: &LusztigDatum, target: &WeylWord) -> Result<LusztigDatum> {
        if d.coords.len() != d.word.len() {
            return Err(Error::Length { expected: d.word.len(), got: d.coords.len() });
        }
        let path = self.path(&d.word, target)?;
        let mut coords = d.coords.clone();
        for m in path.iter() {
            m.apply_to_coords(&mut coords);
        }
        Ok(LusztigDatum { word: target.clone(), coords })
    }

    /// The datum of `b` along `word`.
    pub fn datum(&self, b: &CrystalElt, word: &WeylWord) -> Result<LusztigDatum> {
        let d = LusztigDatum { word: self.reference_word().clone(), coords: b.0.clone() };
        self.transition(&d, word)
    }

    pub fn from_datum(&self, d: &LusztigDatum) -> Result<CrystalElt> {
        Ok(CrystalElt(self.transition(d, self.reference_word())?.coords))
    }

    pub fn to_json(&self, b: &CrystalElt) -> EltJson {
        EltJson {
            type_label: self.label().to_string(),
            word: self.reference_word().0.clone(),
            coords: b.0.clone(),
        }
    }

    /// Reads the JSON form; data along non-reference words are transitioned.
    pub fn from_json(&self, j: &EltJson) -> Result<CrystalElt> {
        if j.type_label != self.label() {
            return Err(Error::WrongType {
                what: "element".into(),
                expected: j.type_label.clone(),
                got: self.label().into(),
            });
        }
        self.from_datum(&LusztigDatum { word: WeylWord(j.word.clone()), coords: j.coords.clone() })
    }

    /// `wt(b) = Σ n_k β_k`, in the positive root cone.
    pub fn wt(&self, b: &CrystalElt) -> Weight {
        let roots = &self.reference_data().roots;
        let mut w = Weight::zero(self.rank());
        for (n, beta) in b.0.iter().zip(roots) {
            if *n != 0 {
                w.add_scaled(beta, *n as i64);
            }
        }
        w
    }

    /// The weight with the opposite sign, for display in the `-Q_+` convention.
    pub fn wt_signed(&self, b: &CrystalElt) -> Weight {
        -self.wt(b)
    }

    fn reference_data(&self) -> Arc<crate::rootsys::WordData> {
        self.rs.word_data(self.reference_word()).expect("reference word is valid")
    }

    fn i_chart(&self, i: usize, b: &CrystalElt) -> Vec<u32> {
        let mut c = b.0.clone();
        for m in self.i_first_paths[i - 1].iter() {
            m.apply_to_coords(&mut c);
        }
        c
    }

    fn from_i_chart(&self, i: usize, mut c: Vec<u32>) -> CrystalElt {
        for m in self.i_first_paths[i - 1].iter().rev() {
            m.apply_to_coords(&mut c);
        }
        CrystalElt(c)
    }

    fn check(&self, b: &CrystalElt) -> Result<()> {
        if b.0.len() != self.num_coords() {
            return Err(Error::Length { expected: self.num_coords(), got: b.0.len() });
        }
        Ok(())
    }

    /// `φ_i(b)`, the first coordinate in the `i`-first chart.
    pub fn phi(&self, i: usize, b: &CrystalElt) -> Result<u32> {
        self.rs.check_index(i)?;
        self.check(b)?;
        Ok(self.i_chart(i, b)[0])
    }

    /// `(φ_1(b), …, φ_n(b))`.
    pub fn phi_all(&self, b: &CrystalElt) -> Vec<u32> {
        (1..=self.rank()).map(|i| self.i_chart(i, b)[0]).collect()
    }

    /// `ε_i(b) = φ_i(b) - ⟨α_i^∨, wt(b)⟩`.
    pub fn eps(&self, i: usize, b: &CrystalElt) -> Result<i64> {
        let phi = self.phi(i, b)? as i64;
        Ok(phi - self.rs.cartan().coroot_pairing(i, &self.wt(b)))
    }

    pub fn e(&self, i: usize, b: &CrystalElt) -> Result<CrystalElt> {
        self.e_pow(i, 1, b)
    }

    /// `ẽ_i^k b`.
    pub fn e_pow(&self, i: usize, k: u32, b: &CrystalElt) -> Result<CrystalElt> {
        self.rs.check_index(i)?;
        self.check(b)?;
        let mut c = self.i_chart(i, b);
        c[0] += k;
        Ok(self.from_i_chart(i, c))
    }

    /// `f̃_i b`, or `None` when `φ_i(b) = 0`.
    pub fn f(&self, i: usize, b: &CrystalElt) -> Result<Option<CrystalElt>> {
        self.rs.check_index(i)?;
        self.check(b)?;
        let mut c = self.i_chart(i, b);
        if c[0] == 0 {
            return Ok(None);
        }
        c[0] -= 1;
        Ok(Some(self.from_i_chart(i, c)))
    }

    /// `(φ_i(b), f̃_i^{max} b)`.
    pub fn f_max(&self, i: usize, b: &CrystalElt) -> Result<(u32, CrystalElt)> {
        self.rs.check_index(i)?;
        self.check(b)?;
        let mut c = self.i_chart(i, b);
        let k = c[0];
        c[0] = 0;
        Ok((k, self.from_i_chart(i, c)))
    }

    /// String parametrization: repeatedly strips `f̃^{max}` along `seq`.
    pub fn string_param(&self, b: &CrystalElt, seq: &[u8]) -> Result<(Vec<u32>, CrystalElt)> {
        let mut cur = b.clone();
        let mut out = Vec::with_capacity(seq.len());
        for &i in seq {
            let (k, next) = self.f_max(i as usize, &cur)?;
            out.push(k);
            cur = next;
        }
        Ok((out, cur))
    }

    /// Applies an operator string to `b`, rightmost factor first.
    pub fn apply(&self, s: &EString, b: &CrystalElt) -> Result<CrystalElt> {
        let mut cur = b.clone();
        for &(i, k) in s.0.iter().rev() {
            cur = self.e_pow(i as usize, k, &cur)?;
        }
        Ok(cur)
    }

    /// `s · 1`.
    pub fn from_estring(&self, s: &EString) -> Result<CrystalElt> {
        self.apply(s, &self.one())
    }

    /// The involution `σ`, read off the MV polytope: `Pol(σb) = wt(b) - Pol(b)`.
    ///
    /// Only the vertices `μ_{w_k w0}(b)` are needed, where `w_k` runs over the
    /// prefixes of the reference word. They form the vertex chain of one chart,
    /// so after negation the edge `n_k(σb) β_k` is the edge of that chain read
    /// backwards.
    pub fn sigma(&self, b: &CrystalElt) -> Result<CrystalElt> {
        self.check(b)?;
        let mut c = b.0.clone();
        for m in self.sigma_path.iter() {
            m.apply_to_coords(&mut c);
        }
        c.reverse();
        Ok(CrystalElt(c))
    }

    /// `σ` through the full polytope: every vertex computed, negated through
    /// `wt(b)`, and the datum read along the reference chain.
    pub fn sigma_via_polytope(&self, b: &CrystalElt) -> Result<CrystalElt> {
        let pol = polytopes::mv_polytope(self, b)?;
        polytopes::sigma_from_polytope(self, &pol)
    }

    /// `S_ℓ`: every Lusztig coordinate multiplied by `ℓ`.
    pub fn s_ell(&self, ell: u32, b: &CrystalElt) -> CrystalElt {
        CrystalElt(b.0.iter().map(|c| c * ell).collect())
    }

    /// All elements of weight `ν`, sorted; fails above [`DEFAULT_HEIGHT_CAP`].
    pub fn enumerate_weight(&self, nu: &Weight) -> Result<Vec<CrystalElt>> {
        self.enumerate_weight_capped(nu, DEFAULT_HEIGHT_CAP)
    }

    pub fn enumerate_weight_capped(&self, nu: &Weight, cap: i64) -> Result<Vec<CrystalElt>> {
        if nu.rank() != self.rank() {
            return Err(Error::RankMismatch(nu.rank(), self.rank()));
        }
        if !nu.is_nonnegative() {
            return Err(Error::NotPositive(nu.to_string()));
        }
        if nu.height() > cap {
            return Err(Error::HeightCap { height: nu.height(), cap });
        }
        let roots = self.reference_data().roots.clone();
        let mut out = Vec::new();
        let mut cur = vec![0u32; roots.len()];
        fill(&roots, 0, nu.clone(), &mut cur, &mut out);
        out.sort();
        Ok(out)
    }
}

fn fill(roots: &[Weight], k: usize, rem: Weight, cur: &mut Vec<u32>, out: &mut Vec<CrystalElt>) {
    if k == roots.len() {
        if rem.is_zero() {
            out.push(CrystalElt(cur.clone()));
        }
        return;
    }
    let beta = &roots[k];
    let max = beta
        .0
        .iter()
        .zip(&rem.0)
        .filter(|(b, _)| **b > 0)
        .map(|(b, r)| r / b)
        .min()
        .unwrap_or(0);
    for n in 0..=max {
        let mut r = rem.clone();
        r.add_scaled(beta, -n);
        cur[k] = n as u32;
        fill(roots, k + 1, r, cur, out);
    }
    cur[k] = 0;
}

/// All weights of height `h` in the positive root cone of rank `rank`.
pub fn weights_of_height(rank: usize, h: i64) -> Vec<Weight> {
    fn go(rank: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if cur.len() == rank - 1 {
            cur.push(left);
            out.push(Weight(cur.clone()));
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            go(rank, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(rank, h, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Arc<Crystal> {
        Crystal::of("A2").unwrap()
    }

    #[test]
    fn a2_raising_operators() {
        let c = a2();
        let one = c.one();
        assert_eq!(c.e(2, &one).unwrap().0, vec![0, 0, 1]);
        let b = c.e(1, &c.e(2, &one).unwrap()).unwrap();
        assert_eq!(b.0, vec![1, 0, 1]);
        let b = c.e(2, &c.e(1, &one).unwrap()).unwrap();
        assert_eq!(b.0, vec![0, 1, 0]);
    }

    #[test]
    fn a2_transition() {
        let c = a2();
        let d = LusztigDatum { word: WeylWord::new([1, 2, 1]), coords: vec![0, 1, 0] };
        let t = c.transition(&d, &WeylWord::new([2, 1, 2])).unwrap();
        assert_eq!(t.coords, vec![1, 0, 1]);
    }

    #[test]
    fn phi_and_eps() {
        let c = a2();
        let b = c.e(1, &c.one()).unwrap();
        assert_eq!(c.phi(1, &b).unwrap(), 1);
        assert_eq!(c.phi(2, &b).unwrap(), 0);
        assert_eq!(c.eps(1, &b).unwrap(), -1);
        assert_eq!(c.eps(2, &b).unwrap(), 1);
        assert_eq!(c.wt(&b), Weight(vec![1, 0]));
        assert_eq!(c.wt_signed(&b), Weight(vec![-1, 0]));
    }

    #[test]
    fn lowering_at_zero_is_bottom() {
        let c = a2();
        assert_eq!(c.f(1, &c.one()).unwrap(), None);
        assert!(matches!(c.phi(3, &c.one()), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn string_parametrization() {
        let c = a2();
        let b = c.from_estring(&"e1 e2^2 e1".parse().unwrap()).unwrap();
        let (s, rest) = c.string_param(&b, &[1, 2, 1]).unwrap();
        assert_eq!(rest, c.one());
        let back = c.from_estring(&EString(vec![(1, s[2]), (2, s[1]), (1, s[0])])).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn enumerate_small_weights() {
        let c = a2();
        assert_eq!(c.enumerate_weight(&Weight(vec![1, 1])).unwrap().len(), 2);
        assert_eq!(c.enumerate_weight(&Weight(vec![2, 2])).unwrap().len(), 3);
        assert!(matches!(c.enumerate_weight(&Weight(vec![-1, 1])), Err(Error::NotPositive(_))));
        assert!(matches!(c.enumerate_weight(&Weight(vec![7, 7])), Err(Error::HeightCap { .. })));
    }

    #[test]
    fn weights_of_height_count() {
        assert_eq!(weights_of_height(3, 2).len(), 6);
        assert_eq!(weights_of_height(4, 7).len(), 120);
    }

    #[test]
    fn json_round_trip() {
        let c = a2();
        let b = CrystalElt(vec![1, 0, 1]);
        let j = serde_json::to_string(&c.to_json(&b)).unwrap();
        assert_eq!(j, r#"{"type":"A2","word":[1,2,1],"coords":[1,0,1]}"#);
        let back: EltJson = serde_json::from_str(&j).unwrap();
        assert_eq!(c.from_json(&back).unwrap(), b);
        let other = EltJson { type_label: "A2".into(), word: vec![2, 1, 2], coords: vec![1, 0, 1] };
        assert_eq!(c.from_json(&other).unwrap(), CrystalElt(vec![0, 1, 0]));
    }
}
