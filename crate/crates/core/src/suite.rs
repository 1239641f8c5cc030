//! The check suite. Each check is a self-contained function returning a
//! [`CheckOutcome`]; the CLI and the acceptance tests share them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::binfty::{Crystal, CrystalElt, EString};
use crate::error::{Error, Result};
use crate::frobmono::{b_rs, fr, fr_split, Case};
use crate::orders::{self, leq_i, leq_str_check, Memo, Predicate, SearchLimits, Verdict};
use crate::polytopes::{self, minkowski_sum, mv_polytope};
use crate::quiverdeg::{
    all_orientations, check_rows, delta_scan, euler_form, ext_dim, flag_bundle_dim, dim_rep_space, hom_dim, AdaptedQuiver,
    ConeBounds, ConeResult, DeltaContext, ExtTables, ScanGrid,
};
use crate::rootsys::{RootSystem, Weight, WeylWord};

/// Result of one check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(serialize_with = "ser_secs")]
    pub elapsed: Duration,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:>2} {} ({:.2?}): {}", self.id, self.title, self.elapsed, self.detail)
    }
}

/// Groups of checks selectable from the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    All,
    Orders,
    Quivers,
    Families,
    Frobenius,
}

impl Group {
    pub fn ids(self) -> Vec<u8> {
        match self {
            Group::All => (1..=15).collect(),
            Group::Orders => vec![1, 5, 6, 7, 8],
            Group::Quivers => vec![11, 12],
            Group::Families => vec![2, 3, 4, 13, 14, 15],
            Group::Frobenius => vec![9, 10],
        }
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Group::All),
            "3" | "orders" => Ok(Group::Orders),
            "4" | "quivers" => Ok(Group::Quivers),
            "5" | "families" => Ok(Group::Families),
            "6" | "frobenius" => Ok(Group::Frobenius),
            _ => Err(Error::Parse(format!("unknown section `{s}`"))),
        }
    }
}

/// Inputs shared by the checks. `tables` may be replaced to run the table
/// check against altered data.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub limits: SearchLimits,
    pub tables: Option<ExtTables>,
    /// Worker threads for the `Δ` scan.
    pub jobs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0x5eed, samples: 200, limits: SearchLimits::default(), tables: None, jobs: default_jobs() }
    }
}

/// The available parallelism, or 1.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub const TITLES: [&str; 15] = [
    "A3 polytope vertex sets and strict containment",
    "A5 Lusztig data, phi values and sigma-fixedness of b_rs",
    "polytope and string orders on b_rs, cases I and III",
    "Minkowski decomposition of Pol(b_rs)",
    "string order trivial in A3 up to height 6",
    "stabilized order trivial in A4 up to height 7",
    "A4 string-order pair proved by closure",
    "polytope order equals all PBW orders in A3",
    "Frobenius crystal map S_l",
    "Frobenius maps on xi_p and eta_p",
    "Ringel consistency and chamber identity",
    "polytope order equals degeneration order in A3",
    "flag bundle and representation space dimensions",
    "Delta nonnegativity and equality locus",
    "extension tables and cone membership",
];

/// Runs check `id` (1-based). Errors inside a check are reported as a
/// failure with the error text.
pub fn run_check(id: u8, cfg: &SuiteConfig) -> CheckOutcome {
    let start = Instant::now();
    let res: Result<(bool, String)> = match id {
        1 => check_pol_example(),
        2 => check_family_data(),
        3 => check_family_orders(cfg),
        4 => check_minkowski(),
        5 => check_str_trivial(cfg),
        6 => check_stab_trivial(cfg),
        7 => check_str_pair(cfg),
        8 => check_pbw_orders(),
        9 => check_s_ell(cfg),
        10 => check_frobenius_monomials(),
        11 => check_ringel(),
        12 => check_degeneration(),
        13 => check_dimensions(),
        14 => check_delta(cfg),
        15 => check_tables(cfg),
        _ => Err(Error::Parse(format!("no check {id}"))),
    };
    let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    let title = TITLES.get(id as usize - 1).copied().unwrap_or("unknown");
    CheckOutcome { id, title, passed, detail, elapsed: start.elapsed() }
}

pub fn run_group(group: Group, cfg: &SuiteConfig) -> Vec<CheckOutcome> {
    group.ids().into_iter().map(|id| run_check(id, cfg)).collect()
}

fn weights(rows: &[[i64; 3]]) -> BTreeSet<Weight> {
    rows.iter().map(|r| Weight(r.to_vec())).collect()
}

fn check_pol_example() -> Result<(bool, String)> {
    let cr = Crystal::of("A3")?;
    let b1 = cr.from_estring(&"(e1 e3) e2^2 (e1 e3)".parse()?)?;
    let b2 = cr.from_estring(&"e2 (e1 e3)^2 e2".parse()?)?;
    let want1 = weights(&[
        [0, 0, 0], [1, 0, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1], [0, 1, 1],
        [2, 1, 1], [1, 2, 1], [1, 1, 2], [2, 2, 1], [1, 2, 2], [2, 2, 2],
    ]);
    let want2 = weights(&[
        [0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [2, 1, 0],
        [0, 1, 2], [1, 2, 1], [2, 2, 1], [2, 1, 2], [1, 2, 2], [2, 2, 2],
    ]);
    let (p1, p2) = (mv_polytope(&cr, &b1)?, mv_polytope(&cr, &b2)?);
    let sets_ok = p1.vertex_set() == want1 && p2.vertex_set() == want2;
    let forward = polytopes::leq_pol(&cr, &b1, &b2)?;
    let backward = polytopes::leq_pol(&cr, &b2, &b1)?;
    let fixed = cr.sigma(&b1)? == b1 && cr.sigma(&b2)? == b2;
    Ok((
        sets_ok && forward && !backward && fixed,
        format!("vertex sets match: {sets_ok}; b' <= b'': {forward}; b'' <= b': {backward}; sigma-fixed: {fixed}"),
    ))
}

fn check_family_data() -> Result<(bool, String)> {
    let cr = Crystal::of("A5")?;
    let i: WeylWord = "2,4,1,3,5,2,4,1,3,5,2,4,1,3,5".parse()?;
    let j: WeylWord = "1,3,5,2,4,1,3,5,2,4,1,3,5,2,4".parse()?;
    let mut bad = Vec::new();
    for r in 0..=3u32 {
        for s in 0..=3u32 {
            let b = b_rs(&cr, Case::I, r, s)?;
            let ni = cr.datum(&b, &i)?.coords;
            let (a, c) = (r + s, s);
            let want_i = vec![a, a, 0, 0, 0, c, c, 0, 0, 0, a, a, 0, 0, 0];
            if ni != want_i {
                bad.push(format!("n_i(b_{r},{s}) = {ni:?}"));
            }
            if s == 0 {
                let nj = cr.datum(&b, &j)?.coords;
                let want_j = vec![0, 0, 0, r, r, 0, 0, 0, 0, 0, 0, 0, 0, r, r];
                if nj != want_j {
                    bad.push(format!("n_j(b_{r},0) = {nj:?}"));
                }
            }
            let phi = cr.phi_all(&b);
            if phi != vec![0, a, 0, a, 0] {
                bad.push(format!("phi(b_{r},{s}) = {phi:?}"));
            }
            if cr.sigma(&b)? != b {
                bad.push(format!("sigma(b_{r},{s}) != b_{r},{s}"));
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "16 elements, all data exact".into() } else { bad.join("; ") }))
}

fn small_family() -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for s in 0..=2u32 {
        for r in 0..=4 - 2 * s {
            out.push((r, s));
        }
    }
    out
}

fn check_family_orders(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for case in [Case::I, Case::III] {
        let cr = Crystal::of(case.type_label())?;
        let memo = Memo::new(&cr);
        let fam = small_family();
        let elts: Vec<CrystalElt> = fam.iter().map(|&(r, s)| b_rs(&cr, case, r, s)).collect::<Result<_>>()?;
        let (mut inside, mut refuted) = (0, 0);
        for (x, &(r1, s1)) in fam.iter().enumerate() {
            for (y, &(r2, s2)) in fam.iter().enumerate() {
                let expected = r1 + 2 * s1 == r2 + 2 * s2 && r1 <= r2;
                let pol = memo.leq_pol(&elts[x], &elts[y])?;
                if pol != expected {
                    bad.push(format!("case {case}: pol(b_{r1},{s1}, b_{r2},{s2}) = {pol}"));
                }
                let v = orders::search(&memo, &elts[x], &elts[y], Predicate::String, cfg.limits)?;
                if v.is_refuted() == expected {
                    bad.push(format!("case {case}: str(b_{r1},{s1}, b_{r2},{s2}) gave {v:?}"));
                }
                inside += expected as usize;
                refuted += v.is_refuted() as usize;
            }
        }
        summary.push(format!("case {case}: {} pairs, {inside} related, {refuted} refuted", fam.len() * fam.len()));
    }
    let ok = bad.is_empty();
    Ok((ok, if ok { summary.join("; ") } else { bad.join("; ") }))
}

fn check_minkowski() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut count = 0;
    for case in [Case::I, Case::III] {
        let cr = Crystal::of(case.type_label())?;
        let p10 = mv_polytope(&cr, &b_rs(&cr, case, 1, 0)?)?;
        let p01 = mv_polytope(&cr, &b_rs(&cr, case, 0, 1)?)?;
        for (r, s) in small_family() {
            let lhs = mv_polytope(&cr, &b_rs(&cr, case, r, s)?)?;
            let rhs = minkowski_sum(&p10.scaled(r as i64), &p01.scaled(s as i64))?;
            if lhs.vertices() != rhs.vertices() {
                bad.push(format!("case {case}, (r,s) = ({r},{s})"));
            }
            count += 1;
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { format!("{count} polytopes decompose vertex-wise") } else { bad.join("; ") }))
}

fn scan_pools(label: &str, height: i64, pred: Predicate, limits: SearchLimits) -> Result<(bool, String)> {
    let cr = Crystal::of(label)?;
    let memo = Memo::new(&cr);
    let pools = orders::pools_up_to(&cr, height)?;
    let (mut pairs, mut longest) = (0usize, 0usize);
    let mut survivors = Vec::new();
    for pool in &pools {
        for (x, b1) in pool.iter().enumerate() {
            for (y, b2) in pool.iter().enumerate() {
                if x == y {
                    continue;
                }
                pairs += 1;
                match orders::search(&memo, b1, b2, pred, limits)? {
                    Verdict::Refuted { witness } => longest = longest.max(witness.len()),
                    other => survivors.push(format!("{b1} vs {b2}: {other:?}")),
                }
            }
        }
    }
    let ok = survivors.is_empty();
    let detail = if ok {
        format!("{pairs} pairs in {} pools, all refuted, longest witness {longest}", pools.len())
    } else {
        format!("{} of {pairs} pairs not refuted, e.g. {}", survivors.len(), survivors[0])
    };
    Ok((ok, detail))
}

fn check_str_trivial(cfg: &SuiteConfig) -> Result<(bool, String)> {
    scan_pools("A3", 6, Predicate::String, cfg.limits)
}

fn check_stab_trivial(cfg: &SuiteConfig) -> Result<(bool, String)> {
    scan_pools("A4", 7, Predicate::Polytope, cfg.limits)
}

fn check_str_pair(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let cr = Crystal::of("A4")?;
    let b1 = cr.from_estring(&"e3^4 e2^4 e1^4 e4^4 e3^4 e2^4".parse()?)?;
    let b2 = cr.from_estring(&"e2 e1^3 e4 e3^7 e2^7 e1 e4^3 e3".parse()?)?;
    let strict = |x: &CrystalElt, y: &CrystalElt| -> bool {
        cr.phi_all(x).iter().zip(cr.phi_all(y)).all(|(a, b)| *a < b)
    };
    let (s1, s2) = (cr.sigma(&b1)?, cr.sigma(&b2)?);
    let strict_ok = strict(&b1, &b2) && strict(&s1, &s2);
    let v = leq_str_check(&cr, &b1, &b2, cfg.limits)?;
    let closure_ok = v == Verdict::ProvedByClosure { closure_size: 2 };
    Ok((
        strict_ok && closure_ok,
        format!(
            "phi {:?} < {:?}, after sigma {:?} < {:?}; verdict {v:?}",
            cr.phi_all(&b1),
            cr.phi_all(&b2),
            cr.phi_all(&s1),
            cr.phi_all(&s2)
        ),
    ))
}

fn check_pbw_orders() -> Result<(bool, String)> {
    let cr = Crystal::of("A3")?;
    let rs = cr.root_system().clone();
    let words = rs.reduced_words_w0()?;
    let (mut pairs, mut related) = (0, 0);
    let mut bad = Vec::new();
    for pool in orders::pools_up_to(&cr, 6)? {
        let data: Vec<Vec<Vec<u32>>> = pool
            .iter()
            .map(|b| words.iter().map(|w| cr.datum(b, w).map(|d| d.coords)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        for x in 0..pool.len() {
            for y in 0..pool.len() {
                let mut all = true;
                for (k, w) in words.iter().enumerate() {
                    if !leq_i(&rs, w, &data[x][k], &data[y][k])? {
                        all = false;
                        break;
                    }
                }
                let pol = polytopes::leq_pol(&cr, &pool[x], &pool[y])?;
                pairs += 1;
                related += pol as usize;
                if all != pol {
                    bad.push(format!("{} vs {}", pool[x], pool[y]));
                }
            }
        }
    }
    let ok = bad.is_empty();
    Ok((
        ok,
        if ok {
            format!("{} words, {pairs} pairs, {related} related", words.len())
        } else {
            format!("{} disagreements, e.g. {}", bad.len(), bad[0])
        },
    ))
}

/// A random element of height at most `max_height`.
pub fn random_element(cr: &Crystal, rng: &mut StdRng, max_height: u32) -> Result<CrystalElt> {
    let h = rng.gen_range(0..=max_height);
    let s = EString((0..h).map(|_| (rng.gen_range(1..=cr.rank()) as u8, 1)).collect());
    cr.from_estring(&s)
}

/// A reduced word of `w0` reached by a random walk of braid moves.
pub fn random_word(rs: &RootSystem, rng: &mut StdRng, steps: usize) -> WeylWord {
    let mut w = rs.reference_word().clone();
    for _ in 0..steps {
        let nb = rs.braid_neighbors(&w);
        if nb.is_empty() {
            break;
        }
        w = nb[rng.gen_range(0..nb.len())].1.clone();
    }
    w
}

fn check_s_ell(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut bad = Vec::new();
    let mut checks = 0usize;
    for label in ["A3", "A5", "D4"] {
        let cr = Crystal::of(label)?;
        let rs = cr.root_system().clone();
        for _ in 0..cfg.samples {
            let b = random_element(&cr, &mut rng, 8)?;
            let word = random_word(&rs, &mut rng, 30);
            for ell in [2u32, 3] {
                let sb = cr.s_ell(ell, &b);
                let mut fail = |what: &str| bad.push(format!("{label} {b} l={ell}: {what}"));
                if cr.wt(&sb) != cr.wt(&b).scaled(ell as i64) {
                    fail("wt");
                }
                for i in 1..=cr.rank() {
                    if cr.phi(i, &sb)? != ell * cr.phi(i, &b)? {
                        fail("phi");
                    }
                    if cr.eps(i, &sb)? != ell as i64 * cr.eps(i, &b)? {
                        fail("eps");
                    }
                    if cr.s_ell(ell, &cr.e(i, &b)?) != cr.e_pow(i, ell, &sb)? {
                        fail("e");
                    }
                }
                let lhs = cr.datum(&sb, &word)?.coords;
                let rhs: Vec<u32> = cr.datum(&b, &word)?.coords.iter().map(|c| c * ell).collect();
                if lhs != rhs {
                    fail("transition");
                }
                if cr.sigma(&sb)? != cr.s_ell(ell, &cr.sigma(&b)?) {
                    fail("sigma");
                }
                checks += 1;
            }
        }
    }
    let ok = bad.is_empty();
    Ok((ok, if ok { format!("{checks} (element, l) samples over A3, A5, D4") } else { bad.join("; ") }))
}

fn check_frobenius_monomials() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut n = 0;
    for case in Case::ALL {
        for ell in 1..=4u32 {
            for p in 1..=4u32 {
                let div = p % ell == 0;
                let expect_xi = div.then(|| case.xi(p / ell));
                let expect_eta = div.then(|| case.eta(p / ell));
                if fr(ell, &case.xi(p))? != expect_xi || fr(ell, &case.eta(p))? != expect_eta {
                    bad.push(format!("case {case}: fr({ell}) at p={p}"));
                }
                if fr_split(ell, &case.xi(p))? != case.xi(ell * p) || fr_split(ell, &case.eta(p))? != case.eta(ell * p) {
                    bad.push(format!("case {case}: fr_split({ell}) at p={p}"));
                }
                n += 1;
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { format!("{n} (case, l, p) triples") } else { bad.join("; ") }))
}

fn check_ringel() -> Result<(bool, String)> {
    let mut pairs = 0usize;
    let mut bad = Vec::new();
    for label in ["A2", "A3", "A5", "D4"] {
        let rs = RootSystem::of(label)?;
        for o in all_orientations(rs.cartan()) {
            for a in rs.positive_roots() {
                for b in rs.positive_roots() {
                    let (h, e) = (hom_dim(&rs, &o, a, b)?, ext_dim(&rs, &o, a, b)?);
                    if h - e != euler_form(&o, a, b) || (a == b && (h, e) != (1, 0)) {
                        bad.push(format!("{label} {o}: {a}, {b}"));
                    }
                    pairs += 1;
                }
            }
        }
    }
    let q = AdaptedQuiver::standard_a5()?;
    let gammas = q.root_system().chamber_coweights_of_word(q.word())?;
    let h = q.hom_matrix();
    let mut chamber = 0;
    for (k, g) in gammas.iter().enumerate() {
        for (l, beta) in q.roots().iter().enumerate() {
            if h[l][k] != g.pair(beta).max(0) {
                bad.push(format!("chamber identity at ({l},{k})"));
            }
            chamber += 1;
        }
    }
    let ok = bad.is_empty();
    Ok((ok, if ok { format!("{pairs} root pairs, {chamber} chamber entries") } else { bad.join("; ") }))
}

fn check_degeneration() -> Result<(bool, String)> {
    let cr = Crystal::of("A3")?;
    let rs = cr.root_system().clone();
    let quivers: Vec<AdaptedQuiver> = all_orientations(rs.cartan())
        .into_iter()
        .map(|o| AdaptedQuiver::from_orientation(rs.clone(), o))
        .collect::<Result<_>>()?;
    let (mut pairs, mut related) = (0, 0);
    let mut bad = Vec::new();
    for pool in orders::pools_up_to(&cr, 6)? {
        let classes: Vec<Vec<Vec<i64>>> = pool
            .iter()
            .map(|b| {
                quivers
                    .iter()
                    .map(|q| cr.datum(b, q.word()).map(|d| d.coords.iter().map(|&c| c as i64).collect()))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        for x in 0..pool.len() {
            for y in 0..pool.len() {
                let mut all = true;
                for (k, q) in quivers.iter().enumerate() {
                    all &= q.degeneration_leq(&classes[x][k], &classes[y][k])?;
                }
                let pol = polytopes::leq_pol(&cr, &pool[x], &pool[y])?;
                pairs += 1;
                related += pol as usize;
                if all != pol {
                    bad.push(format!("{} vs {}", pool[x], pool[y]));
                }
            }
        }
    }
    let ok = bad.is_empty();
    Ok((
        ok,
        if ok {
            format!("{} orientations, {pairs} pairs, {related} related", quivers.len())
        } else {
            format!("{} disagreements, e.g. {}", bad.len(), bad[0])
        },
    ))
}

fn check_dimensions() -> Result<(bool, String)> {
    let q = AdaptedQuiver::standard_a5()?;
    let mut got = Vec::new();
    let mut ok = true;
    for p in 1..=3u32 {
        let (j, a) = Case::I.eta(p).flag_type();
        let f = flag_bundle_dim(q.orientation(), &j, &a)?;
        let e = dim_rep_space(q.orientation(), &Case::I.nu().scaled(2 * p as i64));
        let pp = (p * p) as i64;
        ok &= f == 40 * pp && e == 48 * pp;
        got.push(format!("p={p}: {f}, {e}"));
    }
    Ok((ok, got.join("; ")))
}

fn check_delta(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let ctx = DeltaContext::standard()?;
    let grid = ScanGrid::default();
    // Cross-check the fast scan against both direct formulas on a stride of
    // the grid and on every zero.
    let mut sampled = 0usize;
    let mut mismatches = Vec::new();
    let summary = delta_scan(
        &ctx,
        grid,
        cfg.jobs,
        |index, _| index % 997 == 996,
        |pt| {
            sampled += 1;
            let direct = ctx.delta(pt.p, &pt.v, &pt.tau);
            let stepwise = ctx.delta_stepwise(pt.p, &pt.v, &pt.tau);
            if direct != Ok(pt.delta) || stepwise != Ok(pt.delta) {
                mismatches.push(format!("p={} v={:?} tau={:?}", pt.p, pt.v, pt.tau));
            }
        },
    )?;
    for z in &summary.zeros {
        if ctx.delta(z.p, &z.v, &z.tau)? != 0 || ctx.delta_stepwise(z.p, &z.v, &z.tau)? != 0 {
            mismatches.push(format!("zero p={} v={:?}", z.p, z.v));
        }
    }
    let ok = summary.negative == 0 && summary.locus_matches && mismatches.is_empty();
    Ok((
        ok,
        format!(
            "{} points (feasible v per p: {:?}), min {}, {} negative, {} zeros on locus: {}, {} sampled cross-checks, {} mismatches",
            summary.points,
            summary.feasible_v,
            summary.min_delta,
            summary.negative,
            summary.zeros.len(),
            summary.locus_matches,
            sampled,
            mismatches.len()
        ),
    ))
}

fn check_tables(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let q = AdaptedQuiver::standard_a5()?;
    let tables = match &cfg.tables {
        Some(t) => t.clone(),
        None => ExtTables::standard(&q)?,
    };
    let rows = check_rows(&q, &tables, ConeBounds::default())?;
    let unit = |k: usize| {
        let mut c = vec![0u32; tables.w.len()];
        c[k] = 1;
        ConeResult::Member { coefficients: c }
    };
    let mut bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.dimension_ok || !matches!(r.membership, ConeResult::Member { .. }))
        .map(|r| format!("row {}: dimension {}, {:?}", r.t, r.dimension_ok, r.membership))
        .collect();
    if rows.len() != 14 {
        bad.push(format!("{} rows", rows.len()));
    }
    if rows.first().map(|r| &r.membership) != Some(&unit(0)) {
        bad.push("row 1 witness is not w1".into());
    }
    if rows.get(1).map(|r| &r.membership) != Some(&unit(2)) {
        bad.push("row 2 witness is not w3".into());
    }
    let ok = bad.is_empty();
    Ok((ok, if ok { "14 rows consistent, witnesses w1 and w3".into() } else { bad.join("; ") }))
}
