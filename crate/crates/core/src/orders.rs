//! Orders on `B(-∞)`: lexicographic, the PBW order `≤_i`, polytope
//! containment through all charts, the move relation `≈`, the string order
//! `≤_str` and the stabilized order `≤`.
//!
//! `≤_str` and `≤` quantify over every finite move sequence, and the set of
//! reachable pairs is infinite in general. The checks here explore it
//! breadth-first under caps and return a three-valued [`Verdict`].

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::binfty::{Crystal, CrystalElt};
use crate::error::{Error, Result};
use crate::polytopes::{self, MVPolytope};
use crate::rootsys::{RootSystem, WeylWord};

/// Lexicographic comparison of equal-length vectors.
pub fn leq_lex(u: &[u32], v: &[u32]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::Length { expected: u.len(), got: v.len() });
    }
    Ok(u <= v)
}

/// `n ≤_i m`: equal weights and `Σ_{t≤k} ⟨γ_k, β_t⟩ n_t ≤ Σ_{t≤k} ⟨γ_k, β_t⟩ m_t`
/// for every `k`.
pub fn leq_i(rs: &RootSystem, word: &WeylWord, n: &[u32], m: &[u32]) -> Result<bool> {
    let d = rs.word_data(word)?;
    for v in [n, m] {
        if v.len() != word.len() {
            return Err(Error::Length { expected: word.len(), got: v.len() });
        }
    }
    let weight = |v: &[u32]| {
        let mut w = crate::rootsys::Weight::zero(rs.rank());
        for (c, b) in v.iter().zip(&d.roots) {
            w.add_scaled(b, *c as i64);
        }
        w
    };
    if weight(n) != weight(m) {
        return Ok(false);
    }
    for (k, row) in d.pairing.iter().enumerate() {
        let s = |v: &[u32]| -> i64 { (0..=k).map(|t| row[t] * v[t] as i64).sum() };
        if s(n) > s(m) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `≤_pol` as the conjunction of `≤_i` over every reduced word of `w0`.
pub fn leq_pol_via_words(cr: &Crystal, b1: &CrystalElt, b2: &CrystalElt) -> Result<bool> {
    let rs = cr.root_system();
    for w in rs.reduced_words_w0()?.iter() {
        let n = cr.datum(b1, w)?.coords;
        let m = cr.datum(b2, w)?.coords;
        if !leq_i(rs, w, &n, &m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One simultaneous step of the relation `≈`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    E(u8),
    F(u8),
    Sigma,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::E(i) => write!(f, "e{i}"),
            Move::F(i) => write!(f, "f{i}"),
            Move::Sigma => write!(f, "sigma"),
        }
    }
}

impl FromStr for Move {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad move `{s}`"));
        match s {
            "sigma" | "σ" => Ok(Move::Sigma),
            _ if s.len() > 1 => {
                let i: u8 = s[1..].parse().map_err(|_| bad())?;
                match &s[..1] {
                    "e" => Ok(Move::E(i)),
                    "f" => Ok(Move::F(i)),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for Move {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A pair `(b′, b″)` of elements of equal weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairState {
    pub lo: CrystalElt,
    pub hi: CrystalElt,
}

impl PairState {
    pub fn new(lo: CrystalElt, hi: CrystalElt) -> Self {
        PairState { lo, hi }
    }

    pub fn is_diagonal(&self) -> bool {
        self.lo == self.hi
    }
}

/// Outcome of a capped search over the pairs reachable by `≈`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Some reachable pair violates the base predicate; `witness` reaches it.
    Refuted { witness: Vec<Move> },
    /// The whole reachable set was explored and satisfies the predicate.
    ProvedByClosure { closure_size: usize },
    /// No violation within the caps, but the caps were hit.
    ConsistentToDepth { depth: usize, caps_hit: usize },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::ProvedByClosure { .. })
    }
}

/// Caps for [`leq_str_check`] and [`leq_stab_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub depth: usize,
    /// Largest height a reachable pair may have; `None` means
    /// `height(wt) + 6`.
    pub weight_cap: Option<i64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { depth: 6, weight_cap: None }
    }
}

/// Per-element cache of `φ`, `σ` and polytopes shared by pair searches.
pub struct Memo<'a> {
    cr: &'a Crystal,
    phi: DashMap<CrystalElt, Arc<Vec<u32>>>,
    sigma: DashMap<CrystalElt, CrystalElt>,
    pol: DashMap<CrystalElt, Arc<MVPolytope>>,
}

impl<'a> Memo<'a> {
    pub fn new(cr: &'a Crystal) -> Self {
        Memo { cr, phi: DashMap::new(), sigma: DashMap::new(), pol: DashMap::new() }
    }

    pub fn crystal(&self) -> &Crystal {
        self.cr
    }

    pub fn phi(&self, b: &CrystalElt) -> Arc<Vec<u32>> {
        if let Some(v) = self.phi.get(b) {
            return v.clone();
        }
        let v = Arc::new(self.cr.phi_all(b));
        self.phi.insert(b.clone(), v.clone());
        v
    }

    pub fn sigma(&self, b: &CrystalElt) -> Result<CrystalElt> {
        if let Some(v) = self.sigma.get(b) {
            return Ok(v.clone());
        }
        let s = self.cr.sigma(b)?;
        self.sigma.insert(b.clone(), s.clone());
        self.sigma.insert(s.clone(), b.clone());
        Ok(s)
    }

    pub fn polytope(&self, b: &CrystalElt) -> Result<Arc<MVPolytope>> {
        if let Some(v) = self.pol.get(b) {
            return Ok(v.clone());
        }
        let p = Arc::new(polytopes::mv_polytope(self.cr, b)?);
        self.pol.insert(b.clone(), p.clone());
        Ok(p)
    }

    pub fn leq_pol(&self, b1: &CrystalElt, b2: &CrystalElt) -> Result<bool> {
        Ok(polytopes::contained(&*self.polytope(b1)?, &*self.polytope(b2)?))
    }

    pub fn phi_leq(&self, b1: &CrystalElt, b2: &CrystalElt) -> bool {
        let (p, q) = (self.phi(b1), self.phi(b2));
        p.iter().zip(q.iter()).all(|(a, b)| a <= b)
    }

    /// Applies a move, or `None` when it is not allowed at `p`.
    pub fn apply(&self, p: &PairState, m: Move) -> Result<Option<PairState>> {
        let cr = self.cr;
        Ok(match m {
            Move::Sigma => Some(PairState::new(self.sigma(&p.lo)?, self.sigma(&p.hi)?)),
            Move::E(i) | Move::F(i) => {
                cr.root_system().check_index(i as usize)?;
                let (a, b) = (self.phi(&p.lo)[i as usize - 1], self.phi(&p.hi)[i as usize - 1]);
                if a != b {
                    None
                } else if let Move::E(_) = m {
                    Some(PairState::new(cr.e(i as usize, &p.lo)?, cr.e(i as usize, &p.hi)?))
                } else if a == 0 {
                    None
                } else {
                    Some(PairState::new(
                        cr.f(i as usize, &p.lo)?.expect("φ > 0"),
                        cr.f(i as usize, &p.hi)?.expect("φ > 0"),
                    ))
                }
            }
        })
    }

    /// Every `≈`-successor of `p`: `ẽ_i` at equal `φ_i`, `f̃_i` at equal
    /// positive `φ_i`, and `σ`.
    pub fn moves(&self, p: &PairState) -> Result<Vec<(Move, PairState)>> {
        let n = self.cr.rank() as u8;
        let mut out = Vec::new();
        for m in (1..=n).map(Move::E).chain((1..=n).map(Move::F)).chain([Move::Sigma]) {
            if let Some(s) = self.apply(p, m)? {
                out.push((m, s));
            }
        }
        Ok(out)
    }
}

/// Every `≈`-successor of `p`.
pub fn moves(cr: &Crystal, p: &PairState) -> Result<Vec<(Move, PairState)>> {
    Memo::new(cr).moves(p)
}

/// Replays a move sequence from `root`, failing on a disallowed move.
pub fn replay(cr: &Crystal, root: &PairState, witness: &[Move]) -> Result<PairState> {
    let memo = Memo::new(cr);
    let mut cur = root.clone();
    for &m in witness {
        cur = memo
            .apply(&cur, m)?
            .ok_or_else(|| Error::Constraint(format!("move {m} is not allowed at {:?}", cur)))?;
    }
    Ok(cur)
}

/// Which base predicate a pair search tests at every reachable pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// `φ_i(b′) ≤ φ_i(b″)` for all `i`.
    String,
    /// `b′ ≤_pol b″`.
    Polytope,
}

impl Predicate {
    pub fn holds(self, memo: &Memo, p: &PairState) -> Result<bool> {
        match self {
            Predicate::String => Ok(memo.phi_leq(&p.lo, &p.hi)),
            Predicate::Polytope => memo.leq_pol(&p.lo, &p.hi),
        }
    }
}

/// Capped breadth-first search over the pairs reachable from `(b1, b2)`.
///
/// Diagonal pairs are not expanded: every pair reachable from one is again
/// diagonal and satisfies both predicates.
pub fn search(memo: &Memo, b1: &CrystalElt, b2: &CrystalElt, pred: Predicate, limits: SearchLimits) -> Result<Verdict> {
    let cr = memo.crystal();
    let (w1, w2) = (cr.wt(b1), cr.wt(b2));
    if w1 != w2 {
        return Ok(Verdict::Refuted { witness: Vec::new() });
    }
    let cap = limits.weight_cap.unwrap_or(w1.height() + 6);
    let root = PairState::new(b1.clone(), b2.clone());
    let mut states: Vec<(PairState, Option<(usize, Move)>, usize)> = vec![(root.clone(), None, 0)];
    let mut seen: HashMap<PairState, usize> = HashMap::from([(root, 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut caps_hit = 0;
    while let Some(idx) = queue.pop_front() {
        let (state, _, depth) = states[idx].clone();
        if !pred.holds(memo, &state)? {
            let mut witness = Vec::new();
            let mut cur = idx;
            while let Some((parent, m)) = states[cur].1 {
                witness.push(m);
                cur = parent;
            }
            witness.reverse();
            return Ok(Verdict::Refuted { witness });
        }
        if state.is_diagonal() {
            continue;
        }
        for (m, next) in memo.moves(&state)? {
            if seen.contains_key(&next) {
                continue;
            }
            if depth >= limits.depth || cr.wt(&next.lo).height() > cap {
                caps_hit += 1;
                continue;
            }
            seen.insert(next.clone(), states.len());
            queue.push_back(states.len());
            states.push((next, Some((idx, m)), depth + 1));
        }
    }
    if caps_hit > 0 {
        Ok(Verdict::ConsistentToDepth { depth: limits.depth, caps_hit })
    } else {
        Ok(Verdict::ProvedByClosure { closure_size: states.len() })
    }
}

/// Decision procedure for `b′ ≤_str b″` under caps.
pub fn leq_str_check(cr: &Crystal, b1: &CrystalElt, b2: &CrystalElt, limits: SearchLimits) -> Result<Verdict> {
    search(&Memo::new(cr), b1, b2, Predicate::String, limits)
}

/// Decision procedure for the stabilized order `b′ ≤ b″` under caps.
pub fn leq_stab_check(cr: &Crystal, b1: &CrystalElt, b2: &CrystalElt, limits: SearchLimits) -> Result<Verdict> {
    search(&Memo::new(cr), b1, b2, Predicate::Polytope, limits)
}

/// Same-weight pools of every weight with height in `1..=max_height`.
pub fn pools_up_to(cr: &Crystal, max_height: i64) -> Result<Vec<Vec<CrystalElt>>> {
    let mut out = Vec::new();
    for h in 1..=max_height {
        for nu in crate::binfty::weights_of_height(cr.rank(), h) {
            let pool = cr.enumerate_weight_capped(&nu, max_height)?;
            if pool.len() > 1 {
                out.push(pool);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex() {
        assert!(leq_lex(&[0, 1], &[1, 0]).unwrap());
        assert!(leq_lex(&[1, 0, 5], &[1, 1, 0]).unwrap());
        assert!(leq_lex(&[3, 3], &[3, 3]).unwrap());
        assert!(!leq_lex(&[1, 0], &[0, 9]).unwrap());
        assert!(leq_lex(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn pbw_order_a2() {
        let rs = RootSystem::of("A2").unwrap();
        let w = WeylWord::new([1, 2, 1]);
        assert!(leq_i(&rs, &w, &[0, 1, 0], &[1, 0, 1]).unwrap());
        assert!(!leq_i(&rs, &w, &[1, 0, 1], &[0, 1, 0]).unwrap());
        assert!(leq_i(&rs, &w, &[2, 1, 0], &[2, 1, 0]).unwrap());
    }

    #[test]
    fn moves_from_one() {
        let cr = Crystal::of("A3").unwrap();
        let one = cr.one();
        let ms = moves(&cr, &PairState::new(one.clone(), one.clone())).unwrap();
        let labels: Vec<Move> = ms.iter().map(|(m, _)| *m).collect();
        assert_eq!(labels, vec![Move::E(1), Move::E(2), Move::E(3), Move::Sigma]);
        assert_eq!(ms[3].1, PairState::new(one.clone(), one));
    }

    #[test]
    fn diagonal_is_proved() {
        let cr = Crystal::of("A3").unwrap();
        let b = CrystalElt(vec![1, 0, 2, 0, 1, 0]);
        let v = leq_str_check(&cr, &b, &b, SearchLimits::default()).unwrap();
        assert_eq!(v, Verdict::ProvedByClosure { closure_size: 1 });
        let v = leq_stab_check(&cr, &b, &b, SearchLimits::default()).unwrap();
        assert!(v.is_proved());
    }

    #[test]
    fn weight_mismatch_is_refuted_immediately() {
        let cr = Crystal::of("A2").unwrap();
        let v = leq_str_check(&cr, &CrystalElt(vec![1, 0, 0]), &CrystalElt(vec![0, 0, 1]), SearchLimits::default())
            .unwrap();
        assert_eq!(v, Verdict::Refuted { witness: vec![] });
    }

    #[test]
    fn verdict_json() {
        let v = Verdict::Refuted { witness: vec![Move::Sigma, Move::E(2)] };
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"verdict":"refuted","witness":["sigma","e2"]}"#);
        let v = Verdict::ProvedByClosure { closure_size: 2 };
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"verdict":"proved_by_closure","closure_size":2}"#);
        let back: Verdict = serde_json::from_str(r#"{"verdict":"refuted","witness":["f3"]}"#).unwrap();
        assert_eq!(back, Verdict::Refuted { witness: vec![Move::F(3)] });
    }
}
