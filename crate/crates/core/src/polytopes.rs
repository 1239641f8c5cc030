//! MV polytopes: vertices `μ_w(b)` over the Weyl group and BZ data `M_γ(b)`
//! over the chamber coweights.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::binfty::{Crystal, CrystalElt};
use crate::error::{Error, Result};
use crate::rootsys::{BraidMove, Weight, WeylWord};

/// A chart used to read vertices: a reduced word of `w0` and the Weyl group
/// element reached after each prefix.
#[derive(Debug)]
struct VertexChart {
    word: WeylWord,
    path: Arc<[BraidMove]>,
    prefixes: Vec<usize>,
}

/// Charts covering every Weyl group element, plus the `(w, i)` presentations
/// of every chamber coweight.
#[derive(Debug)]
pub struct VertexCharts {
    charts: Vec<VertexChart>,
    presentations: Vec<Vec<(usize, usize)>>,
    reference_chain: Vec<usize>,
    times_longest: Vec<usize>,
}

impl VertexCharts {
    fn build(cr: &Crystal) -> Result<Self> {
        let rs = cr.root_system();
        let weyl = rs.weyl_group();
        let mut covered = vec![false; weyl.len()];
        let mut order: Vec<usize> = (0..weyl.len()).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(weyl.get(k).length()));
        let mut charts = Vec::new();
        let reference = cr.reference_word().clone();
        let chain = |word: &WeylWord| -> Result<Vec<usize>> {
            (0..=word.len()).map(|k| rs.element_index(&WeylWord(word.0[..k].to_vec()))).collect()
        };
        let reference_chain = chain(&reference)?;
        for k in order {
            if covered[k] {
                continue;
            }
            let word = rs.extend_to_longest(k);
            let prefixes = chain(&word)?;
            for &p in &prefixes {
                covered[p] = true;
            }
            let path = cr.path(&reference, &word)?;
            charts.push(VertexChart { word, path, prefixes });
        }
        let mut presentations = vec![Vec::new(); rs.all_chamber_coweights().len()];
        for w in 0..weyl.len() {
            for i in 1..=rs.rank() {
                let g = rs.act_on_coweight(w, &crate::rootsys::Coweight::fundamental(rs.rank(), i));
                let idx = rs
                    .chamber_index(&g)
                    .ok_or_else(|| Error::Inconsistent(format!("{g} is not a chamber coweight")))?;
                presentations[idx].push((w, i));
            }
        }
        let times_longest = (0..weyl.len()).map(|w| rs.times_longest(w)).collect();
        Ok(VertexCharts { charts, presentations, reference_chain, times_longest })
    }

    /// Number of charts used to cover `W`.
    pub fn num_charts(&self) -> usize {
        self.charts.len()
    }
}

pub(crate) fn vertex_charts(cr: &Crystal) -> Result<Arc<VertexCharts>> {
    cr.vertex_charts.get_or_init(|| VertexCharts::build(cr).map(Arc::new)).clone()
}

/// The MV polytope of an element, stored by vertices and BZ datum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MVPolytope {
    type_label: String,
    base_weight: Weight,
    vertices: Vec<Weight>,
    bz: Vec<i64>,
}

/// JSON export form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub weight: Vec<i64>,
    pub vertices: Vec<VertexJson>,
    pub bz: Vec<BzJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub w: Vec<u8>,
    pub mu: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BzJson {
    pub gamma: Vec<i64>,
    #[serde(rename = "M")]
    pub m: i64,
}

impl MVPolytope {
    /// `wt(b)`, which is also the vertex at the identity.
    pub fn base_weight(&self) -> &Weight {
        &self.base_weight
    }

    /// `μ_w` indexed like [`crate::rootsys::WeylGroup::elements`].
    pub fn vertices(&self) -> &[Weight] {
        &self.vertices
    }

    pub fn vertex(&self, w: usize) -> &Weight {
        &self.vertices[w]
    }

    /// Distinct vertices.
    pub fn vertex_set(&self) -> BTreeSet<Weight> {
        self.vertices.iter().cloned().collect()
    }

    /// `M_γ` indexed like [`crate::rootsys::RootSystem::all_chamber_coweights`].
    pub fn bz(&self) -> &[i64] {
        &self.bz
    }

    /// The polytope dilated by `k`.
    pub fn scaled(&self, k: i64) -> MVPolytope {
        MVPolytope {
            type_label: self.type_label.clone(),
            base_weight: self.base_weight.scaled(k),
            vertices: self.vertices.iter().map(|v| v.scaled(k)).collect(),
            bz: self.bz.iter().map(|m| m * k).collect(),
        }
    }

    /// The single point `0` in the given type.
    pub fn point(cr: &Crystal) -> Result<MVPolytope> {
        mv_polytope(cr, &cr.one())
    }

    pub fn to_json(&self, cr: &Crystal) -> PolytopeJson {
        let rs = cr.root_system();
        PolytopeJson {
            weight: self.base_weight.0.clone(),
            vertices: rs
                .weyl_group()
                .elements()
                .iter()
                .zip(&self.vertices)
                .map(|(e, mu)| VertexJson { w: e.word().0.clone(), mu: mu.0.clone() })
                .collect(),
            bz: rs
                .all_chamber_coweights()
                .iter()
                .zip(&self.bz)
                .map(|(g, &m)| BzJson { gamma: g.0.clone(), m })
                .collect(),
        }
    }
}

/// `Pol(b)`. Vertices reached through several charts are checked to agree.
pub fn mv_polytope(cr: &Crystal, b: &CrystalElt) -> Result<MVPolytope> {
    let vc = vertex_charts(cr)?;
    let rs = cr.root_system();
    let wt = cr.wt(b);
    let mut vertices: Vec<Option<Weight>> = vec![None; rs.weyl_group().len()];
    for chart in &vc.charts {
        let mut n = b.0.clone();
        for m in chart.path.iter() {
            m.apply_to_coords(&mut n);
        }
        let roots = &rs.word_data(&chart.word)?.roots;
        let mut mu = wt.clone();
        for k in 0..=n.len() {
            if k > 0 && n[k - 1] != 0 {
                mu.add_scaled(&roots[k - 1], -(n[k - 1] as i64));
            }
            let slot = &mut vertices[chart.prefixes[k]];
            match slot {
                Some(prev) if *prev != mu => {
                    return Err(Error::Inconsistent(format!(
                        "vertex at {} differs between charts: {prev} vs {mu}",
                        rs.weyl_group().get(chart.prefixes[k]).word()
                    )))
                }
                Some(_) => {}
                None => *slot = Some(mu.clone()),
            }
        }
    }
    let vertices: Vec<Weight> = vertices.into_iter().map(|v| v.expect("charts cover W")).collect();
    let chamber = rs.all_chamber_coweights();
    let mut bz = Vec::with_capacity(chamber.len());
    for (g, pres) in chamber.iter().zip(&vc.presentations) {
        let mut val = None;
        for &(w, _) in pres {
            let m = g.pair(&vertices[w]);
            match val {
                Some(v) if v != m => {
                    return Err(Error::Inconsistent(format!("M_{g} is {v} and {m} in two presentations")))
                }
                _ => val = Some(m),
            }
        }
        bz.push(val.expect("every chamber coweight has a presentation"));
    }
    Ok(MVPolytope { type_label: cr.label().to_string(), base_weight: wt, vertices, bz })
}

/// `γ ↦ M_γ(b)`.
pub fn bz_data(cr: &Crystal, b: &CrystalElt) -> Result<Vec<i64>> {
    Ok(mv_polytope(cr, b)?.bz)
}

/// `Pol(b′) ⊆ Pol(b″)` with equal weights.
pub fn leq_pol(cr: &Crystal, b1: &CrystalElt, b2: &CrystalElt) -> Result<bool> {
    let p = mv_polytope(cr, b1)?;
    let q = mv_polytope(cr, b2)?;
    Ok(contained(&p, &q))
}

/// BZ containment of two polytopes with the same base weight.
pub fn contained(p: &MVPolytope, q: &MVPolytope) -> bool {
    p.base_weight == q.base_weight && p.bz.iter().zip(&q.bz).all(|(a, b)| a <= b)
}

/// Vertex-wise Minkowski sum; both normal fans coarsen the Weyl fan.
pub fn minkowski_sum(p: &MVPolytope, q: &MVPolytope) -> Result<MVPolytope> {
    if p.type_label != q.type_label {
        return Err(Error::WrongType {
            what: "polytope".into(),
            expected: p.type_label.clone(),
            got: q.type_label.clone(),
        });
    }
    Ok(MVPolytope {
        type_label: p.type_label.clone(),
        base_weight: &p.base_weight + &q.base_weight,
        vertices: p.vertices.iter().zip(&q.vertices).map(|(a, b)| a + b).collect(),
        bz: p.bz.iter().zip(&q.bz).map(|(a, b)| a + b).collect(),
    })
}

/// `wt(b) - Pol(b)`, relabelled so that vertex `w` is `wt(b) - μ_{w w0}(b)`.
pub fn negate_through_weight(cr: &Crystal, p: &MVPolytope) -> Result<MVPolytope> {
    let vc = vertex_charts(cr)?;
    let vertices: Vec<Weight> =
        vc.times_longest.iter().map(|&ww0| &p.base_weight - &p.vertices[ww0]).collect();
    let chamber = cr.root_system().all_chamber_coweights();
    let bz = chamber
        .iter()
        .map(|g| vertices.iter().map(|v| g.pair(v)).max().expect("nonempty"))
        .collect();
    Ok(MVPolytope { type_label: p.type_label.clone(), base_weight: p.base_weight.clone(), vertices, bz })
}

/// Reads the Lusztig datum along the reference word from the vertices of an
/// MV polytope, via the differences `μ_{w_{k-1}} - μ_{w_k} = n_k β_k`.
pub fn datum_from_vertices(cr: &Crystal, p: &MVPolytope) -> Result<CrystalElt> {
    let vc = vertex_charts(cr)?;
    let roots = &cr.root_system().word_data(cr.reference_word())?.roots;
    let mut coords = Vec::with_capacity(roots.len());
    for (k, beta) in roots.iter().enumerate() {
        let diff = &p.vertices[vc.reference_chain[k]] - &p.vertices[vc.reference_chain[k + 1]];
        let j = beta.0.iter().position(|&c| c != 0).expect("roots are nonzero");
        let n = diff.0[j] / beta.0[j];
        if n < 0 || beta.scaled(n) != diff {
            return Err(Error::Inconsistent(format!("edge {diff} is not a multiple of {beta}")));
        }
        coords.push(n as u32);
    }
    Ok(CrystalElt(coords))
}

pub(crate) fn sigma_from_polytope(cr: &Crystal, p: &MVPolytope) -> Result<CrystalElt> {
    datum_from_vertices(cr, &negate_through_weight(cr, p)?)
}
