//! Divided-power monomials, the Frobenius maps acting on them, and the four
//! families `Ẽ_p`, `ξ_p`, `η_p` in types A5 and D4.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::binfty::{Crystal, CrystalElt, EString};
use crate::error::{Error, Result};
use crate::rootsys::Weight;
use crate::syntax::{parse_factors, render_factors};

/// A formal word `θ_{i1}^(a1) ⋯ θ_{im}^(am)` in divided powers. Adjacent
/// factors with the same index are kept apart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DividedMonomial(pub Vec<(u8, u32)>);

impl DividedMonomial {
    /// Builds a monomial, rejecting zero exponents and zero indices.
    pub fn new(factors: Vec<(u8, u32)>) -> Result<Self> {
        if let Some(&(i, n)) = factors.iter().find(|&&(i, n)| i == 0 || n == 0) {
            return Err(Error::Parse(format!("bad factor t{i}^{n}")));
        }
        Ok(DividedMonomial(factors))
    }

    /// Parses `t2^p t4^p t1^p t3^2p t5^p`, substituting `p` when given.
    pub fn parse_with(src: &str, p: Option<u32>) -> Result<Self> {
        Self::new(parse_factors(src, 't', p)?)
    }

    pub fn factors(&self) -> &[(u8, u32)] {
        &self.0
    }

    /// `Σ a_m α_{i_m}`.
    pub fn weight(&self, rank: usize) -> Result<Weight> {
        let mut w = Weight::zero(rank);
        for &(i, n) in &self.0 {
            if i as usize > rank {
                return Err(Error::IndexOutOfRange { index: i as usize, rank });
            }
            w.0[i as usize - 1] += n as i64;
        }
        Ok(w)
    }

    /// Concatenation.
    pub fn concat(&self, other: &DividedMonomial) -> DividedMonomial {
        DividedMonomial(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Index sequence and exponent sequence, the flag type of the monomial.
    pub fn flag_type(&self) -> (Vec<u8>, Vec<u32>) {
        self.0.iter().copied().unzip()
    }
}

impl FromStr for DividedMonomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, None)
    }
}

impl fmt::Display for DividedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&render_factors(&self.0, 't'))
    }
}

/// Divides every exponent by `ell`; `None` is the zero element, returned as
/// soon as one exponent is not a multiple of `ell`.
pub fn fr(ell: u32, m: &DividedMonomial) -> Result<Option<DividedMonomial>> {
    check_ell(ell)?;
    Ok(m.0
        .iter()
        .map(|&(i, n)| (n % ell == 0).then_some((i, n / ell)))
        .collect::<Option<Vec<_>>>()
        .map(DividedMonomial))
}

/// Multiplies every exponent by `ell`.
pub fn fr_split(ell: u32, m: &DividedMonomial) -> Result<DividedMonomial> {
    check_ell(ell)?;
    Ok(DividedMonomial(m.0.iter().map(|&(i, n)| (i, n * ell)).collect()))
}

fn check_ell(ell: u32) -> Result<()> {
    if ell == 0 {
        return Err(Error::Constraint("ell must be positive".into()));
    }
    Ok(())
}

/// The four families. I and II live in A5, III and IV in D4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::I, Case::II, Case::III, Case::IV];

    pub fn type_label(self) -> &'static str {
        match self {
            Case::I | Case::II => "A5",
            Case::III | Case::IV => "D4",
        }
    }

    /// Blocks `(letters, multiplicity)`; the outer blocks have multiplicity 1
    /// and the middle block has the given one.
    fn blocks(self) -> ([&'static [u8]; 2], u32) {
        match self {
            Case::I => ([&[2, 4], &[1, 3, 3, 5]], 1),
            Case::II => ([&[1, 3, 3, 5], &[2, 4]], 3),
            Case::III => ([&[2], &[1, 3, 4]], 1),
            Case::IV => ([&[1, 3, 4], &[2]], 3),
        }
    }

    /// Weight `ν` with `wt(ξ_p) = pν`.
    pub fn nu(self) -> Weight {
        let rank = if self.type_label() == "A5" { 5 } else { 4 };
        self.xi(1).weight(rank).expect("indices fit the rank")
    }

    /// `Ẽ_p`: outer block, middle block repeated, outer block, each group raised
    /// to the `p`th power.
    pub fn estring(self, p: u32) -> EString {
        let ([outer, inner], mid) = self.blocks();
        let group = |letters: &[u8], k: u32| -> Vec<(u8, u32)> {
            let one = Self::block_monomial(letters, 1);
            (0..k).flat_map(|_| one.iter().copied()).collect()
        };
        let mut f = group(outer, p);
        f.extend(group(inner, mid * p));
        f.extend(group(outer, p));
        EString(f)
    }

    fn block_monomial(letters: &[u8], k: u32) -> Vec<(u8, u32)> {
        let mut out: Vec<(u8, u32)> = Vec::new();
        for &i in letters {
            match out.last_mut() {
                Some((j, n)) if *j == i => *n += k,
                _ => out.push((i, k)),
            }
        }
        out
    }

    /// `ξ_p`.
    pub fn xi(self, p: u32) -> DividedMonomial {
        let ([outer, inner], mid) = self.blocks();
        let mut f = Self::block_monomial(outer, p);
        f.extend(Self::block_monomial(inner, mid * p));
        f.extend(Self::block_monomial(outer, p));
        DividedMonomial(f)
    }

    /// `η_p`: like `ξ_p` with the outer block doubled in the middle.
    pub fn eta(self, p: u32) -> DividedMonomial {
        let ([outer, inner], mid) = self.blocks();
        let mut f = Self::block_monomial(outer, p);
        f.extend(Self::block_monomial(inner, mid * p));
        f.extend(Self::block_monomial(outer, 2 * p));
        f.extend(Self::block_monomial(inner, mid * p));
        f.extend(Self::block_monomial(outer, p));
        DividedMonomial(f)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            "IV" | "4" => Ok(Case::IV),
            _ => Err(Error::Parse(format!("unknown case `{s}`"))),
        }
    }
}

/// `b_{r,s} = Ẽ_{r+s} Ẽ_s · 1`, of weight `(r+2s)ν`.
pub fn b_rs(cr: &Crystal, case: Case, r: u32, s: u32) -> Result<CrystalElt> {
    if cr.label() != case.type_label() {
        return Err(Error::WrongType {
            what: format!("case {case}"),
            expected: case.type_label().into(),
            got: cr.label().into(),
        });
    }
    let inner = cr.from_estring(&case.estring(s))?;
    cr.apply(&case.estring(r + s), &inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fr_rules() {
        let m: DividedMonomial = "t1^2 t2^4".parse().unwrap();
        assert_eq!(fr(2, &m).unwrap().unwrap().to_string(), "t1 t2^2");
        let m: DividedMonomial = "t1^2 t2^3".parse().unwrap();
        assert_eq!(fr(2, &m).unwrap(), None);
        let m: DividedMonomial = "t1^2".parse().unwrap();
        assert_eq!(fr_split(3, &m).unwrap().to_string(), "t1^6");
        assert!(fr(0, &m).is_err());
    }

    #[test]
    fn table_rows() {
        assert_eq!(Case::I.xi(1).to_string(), "t2 t4 t1 t3^2 t5 t2 t4");
        assert_eq!(Case::III.eta(1).to_string(), "t2 t1 t3 t4 t2^2 t1 t3 t4 t2");
        assert_eq!(Case::II.xi(2).to_string(), "t1^2 t3^4 t5^2 t2^6 t4^6 t1^2 t3^4 t5^2");
        assert_eq!(Case::I.estring(1).to_string(), "e2 e4 e1 e3^2 e5 e2 e4");
        assert_eq!(Case::IV.estring(1).to_string(), "e1 e3 e4 e2 e2 e2 e1 e3 e4");
        assert_eq!(Case::I.nu(), Weight(vec![1, 2, 2, 2, 1]));
        assert_eq!(Case::III.nu(), Weight(vec![1, 2, 1, 1]));
        for c in Case::ALL {
            let rank = c.nu().rank();
            assert_eq!(c.eta(3).weight(rank).unwrap(), c.nu().scaled(6));
            assert_eq!(c.estring(2).total() as i64, c.nu().scaled(2).height());
        }
    }

    #[test]
    fn parse_symbolic() {
        let m = DividedMonomial::parse_with("t2^p t4^p t1^p t3^2p t5^p t2^p t4^p", Some(3)).unwrap();
        assert_eq!(m, Case::I.xi(3));
        assert!(DividedMonomial::parse_with("t2^0", None).is_err());
    }
}
