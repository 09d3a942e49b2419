use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{CoefficientRing, ExactMatrix};
use super::poly::UniPoly;
use super::smith::SmithState;
use super::sparse::{self, Echelon, SparseVec};
use crate::error::{CourantError, Result};

/// Isomorphism class of a finitely generated module over Q or Q[t]:
/// `R^free_rank ⊕ R/(d_1) ⊕ … ⊕ R/(d_k)` with `d_1 | … | d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ModulePresentation {
    pub free_rank: usize,
    #[serde(with = "poly_strings")]
    pub torsion: Vec<UniPoly>,
}

mod poly_strings {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::poly::UniPoly;

    pub fn serialize<S: Serializer>(v: &[UniPoly], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|p| p.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<UniPoly>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl ModulePresentation {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        ModulePresentation { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum, renormalized to invariant-factor form.
    pub fn direct_sum(&self, other: &ModulePresentation) -> ModulePresentation {
        let mut factors = self.torsion.clone();
        factors.extend(other.torsion.iter().cloned());
        ModulePresentation {
            free_rank: self.free_rank + other.free_rank,
            torsion: normalize_torsion(factors),
        }
    }
}

/// Rewrites an arbitrary list of torsion orders as an invariant-factor chain.
pub fn normalize_torsion(factors: Vec<UniPoly>) -> Vec<UniPoly> {
    let n = factors.len();
    if n == 0 {
        return factors;
    }
    let mut d: Vec<Vec<UniPoly>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { factors[i].clone() } else { UniPoly::zero() }).collect())
        .collect();
    for row in d.iter_mut() {
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = x.monic();
            }
        }
    }
    let mut st = SmithState::new(d, n, false, false);
    st.reduce().into_iter().filter(|x| !x.is_unit()).collect()
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("R^{}", self.free_rank));
        }
        for d in &self.torsion {
            parts.push(format!("R/({d})"));
        }
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Debug, Clone)]
struct Summand {
    /// zero for a free summand
    modulus: UniPoly,
    /// index into the cycle basis after the Smith transform
    slot: usize,
    generator: SparseVec,
}

/// `span(cycles) / span(boundaries)` with explicit generators and a
/// coordinate map, so that maps between subquotients can be written down.
#[derive(Debug, Clone)]
pub struct Subquotient {
    ambient: usize,
    cycles: Echelon,
    u: Vec<Vec<UniPoly>>,
    summands: Vec<Summand>,
}

impl Subquotient {
    pub fn new(ambient: usize, cycles: Vec<SparseVec>, boundaries: &[SparseVec]) -> Result<Self> {
        let z = Echelon::new(ambient, cycles);
        Self::from_echelon(z, boundaries)
    }

    pub fn from_echelon(z: Echelon, boundaries: &[SparseVec]) -> Result<Self> {
        let k = z.rank();
        let mut x = vec![Vec::new(); k];
        let mut ncols = 0;
        for (j, b) in boundaries.iter().enumerate() {
            if b.is_empty() {
                continue;
            }
            let coords = z.solve(b).ok_or(CourantError::ContainmentViolation { column: j })?;
            for row in x.iter_mut() {
                row.push(UniPoly::zero());
            }
            for (i, c) in coords {
                x[i][ncols] = c;
            }
            ncols += 1;
        }
        let mut st = SmithState::new(x, ncols, true, false);
        let diag = st.reduce();
        let u = st.u.take().expect("tracked");
        let u_inv = st.u_inv.take().expect("tracked");
        let mut summands = Vec::new();
        for s in 0..k {
            let modulus = diag.get(s).cloned().unwrap_or_else(UniPoly::zero);
            if modulus.is_unit() {
                continue;
            }
            let coeffs: SparseVec = (0..k)
                .filter(|&i| !u_inv[i][s].is_zero())
                .map(|i| (i, u_inv[i][s].clone()))
                .collect();
            let generator = sparse::combine(&coeffs, z.rows());
            summands.push(Summand { modulus, slot: s, generator });
        }
        // free summands first, then torsion in divisibility order
        summands.sort_by_key(|s| !s.modulus.is_zero());
        Ok(Subquotient { ambient: z.ambient(), cycles: z, u, summands })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn presentation(&self) -> ModulePresentation {
        ModulePresentation {
            free_rank: self.summands.iter().filter(|s| s.modulus.is_zero()).count(),
            torsion: self.summands.iter().filter(|s| !s.modulus.is_zero()).map(|s| s.modulus.clone()).collect(),
        }
    }

    /// Number of cyclic summands (free and torsion).
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Representative vectors of the cyclic generators, in summand order.
    pub fn generators(&self) -> Vec<SparseVec> {
        self.summands.iter().map(|s| s.generator.clone()).collect()
    }

    /// Modulus of each summand (zero for free summands).
    pub fn moduli(&self) -> Vec<UniPoly> {
        self.summands.iter().map(|s| s.modulus.clone()).collect()
    }

    pub fn cycle_basis(&self) -> &[SparseVec] {
        self.cycles.rows()
    }

    pub fn cycles(&self) -> &Echelon {
        &self.cycles
    }

    /// Coordinates of the class of `v` on the generators, each reduced
    /// modulo its summand's order.
    pub fn coordinates(&self, v: &SparseVec) -> Result<Vec<UniPoly>> {
        let y = self.cycles.solve(v).ok_or(CourantError::ContainmentViolation { column: 0 })?;
        Ok(self
            .summands
            .iter()
            .map(|s| {
                let mut acc = UniPoly::zero();
                for (i, c) in &y {
                    let w = &self.u[s.slot][*i];
                    if !w.is_zero() {
                        acc += &(w * c);
                    }
                }
                acc.rem_mod(&s.modulus)
            })
            .collect())
    }

    /// Whether `v` (a cycle) represents the zero class.
    pub fn is_trivial(&self, v: &SparseVec) -> Result<bool> {
        Ok(self.coordinates(v)?.iter().all(UniPoly::is_zero))
    }
}

/// `span(cycles) / span(boundaries)` for column-generated submodules.
pub fn subquotient(cycles: &ExactMatrix, boundaries: &ExactMatrix) -> Result<ModulePresentation> {
    if cycles.rows() != boundaries.rows() && boundaries.cols() > 0 {
        return Err(CourantError::DimensionMismatch(format!(
            "cycles live in rank {} but boundaries in rank {}",
            cycles.rows(),
            boundaries.rows()
        )));
    }
    if cycles.ring() != boundaries.ring() && boundaries.cols() > 0 {
        return Err(CourantError::RingMismatch(format!(
            "cycles over {} but boundaries over {}",
            cycles.ring(),
            boundaries.ring()
        )));
    }
    let z: Vec<SparseVec> = cycles.columns().iter().map(|c| sparse::from_dense(c)).collect();
    let b: Vec<SparseVec> = boundaries.columns().iter().map(|c| sparse::from_dense(c)).collect();
    let sq = Subquotient::new(cycles.rows(), z, &b)?;
    let p = sq.presentation();
    debug_assert!(cycles.ring() == CoefficientRing::Polynomials || p.torsion.is_empty());
    Ok(p)
}
