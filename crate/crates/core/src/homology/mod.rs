//! Integral simplicial homology of order complexes of finite posets.

mod snf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nord::PosetView;
use crate::poset::Poset;

pub use snf::{smith_normal_form, smith_normal_form_dense, SmithForm, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("order complex would exceed {cap} chains")]
    TooManyChains { cap: usize },
    #[error("boundary of boundary is nonzero in degree {0}")]
    BoundarySquared(usize),
    #[error("torsion coefficient {0} does not fit in 64 bits")]
    Overflow(String),
}

/// Strict chains `x_0 < … < x_k` of a finite poset, grouped by `k` and
/// sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderComplex {
    simplices: Vec<Vec<Vec<u32>>>,
}

impl OrderComplex {
    /// All strict chains, failing once more than `max_chains` are produced.
    pub fn new(poset: &Poset, max_chains: usize) -> Result<Self, HomologyError> {
        let n = poset.len();
        if n > max_chains {
            return Err(HomologyError::TooManyChains { cap: max_chains });
        }
        let mut total = n;
        let mut simplices = Vec::new();
        if n > 0 {
            simplices.push((0..n as u32).map(|i| vec![i]).collect::<Vec<_>>());
        }
        while let Some(last) = simplices.last() {
            let mut next: Vec<Vec<u32>> = last
                .par_iter()
                .flat_map_iter(|chain: &Vec<u32>| {
                    let top = *chain.last().unwrap() as usize;
                    poset.up_set(top).iter().filter(move |&j| j != top).map(move |j| {
                        let mut c = chain.clone();
                        c.push(j as u32);
                        c
                    })
                })
                .collect();
            if next.is_empty() {
                break;
            }
            next.par_sort_unstable();
            total += next.len();
            if total > max_chains {
                return Err(HomologyError::TooManyChains { cap: max_chains });
            }
            simplices.push(next);
        }
        Ok(Self { simplices })
    }

    /// Number of `k`-simplices for each `k`.
    pub fn simplex_counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn simplices(&self, k: usize) -> &[Vec<u32>] {
        self.simplices.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(self.simplex_counts().iter().map(|&c| c as i64))
    }

    /// Alternating-sign boundary matrices `∂_k` for `k ≥ 1`.
    pub fn boundary_matrices(&self) -> ChainComplex {
        let boundaries = (1..self.simplices.len())
            .into_par_iter()
            .map(|k| {
                let faces = &self.simplices[k - 1];
                let columns = self.simplices[k]
                    .iter()
                    .map(|simplex| {
                        (0..simplex.len())
                            .map(|drop| {
                                let mut face = simplex.clone();
                                face.remove(drop);
                                let row = faces.binary_search(&face).expect("faces of a chain are chains");
                                (row, if drop % 2 == 0 { 1 } else { -1 })
                            })
                            .collect()
                    })
                    .collect();
                SparseMatrix::from_columns(faces.len(), columns)
            })
            .collect();
        ChainComplex { dims: self.simplex_counts(), boundaries }
    }
}

fn alternating_sum(values: impl Iterator<Item = i64>) -> i64 {
    values.enumerate().map(|(k, v)| if k % 2 == 0 { v } else { -v }).sum()
}

/// Chain groups `C_k = ℤ^{dims[k]}` with boundaries `∂_k: C_k → C_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `∂_k` for `k ≥ 1`.
    pub fn boundary(&self, k: usize) -> Option<&SparseMatrix> {
        k.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    /// First degree `k` with `∂_{k-1} ∂_k ≠ 0`, if any.
    pub fn boundary_squared_defect(&self) -> Option<usize> {
        (2..=self.boundaries.len()).find(|&k| {
            let product = self.boundaries[k - 2].checked_mul(&self.boundaries[k - 1]);
            !product.is_some_and(|p| p.is_zero())
        })
    }

    /// CSV lines `degree,row,col,value` for every nonzero boundary entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,row,col,value\n");
        for (i, m) in self.boundaries.iter().enumerate() {
            for j in 0..m.cols() {
                for &(r, v) in m.column(j) {
                    out.push_str(&format!("{},{r},{j},{v}\n", i + 1));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub betti: Vec<usize>,
    /// Invariant factors greater than one of `∂_{k+1}`, per degree `k`.
    pub torsion: Vec<Vec<u64>>,
    pub euler: i64,
    pub simplex_counts: Vec<usize>,
}

impl HomologyResult {
    /// Betti numbers with trailing zeros removed.
    pub fn trimmed_betti(&self) -> Vec<usize> {
        let mut b = self.betti.clone();
        while b.last() == Some(&0) {
            b.pop();
        }
        b
    }

    pub fn betti_euler(&self) -> i64 {
        alternating_sum(self.betti.iter().map(|&b| b as i64))
    }

    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().any(|t| !t.is_empty())
    }
}

/// Homology of a chain complex, checking `∂∂ = 0` first. Each boundary is
/// reduced independently, in parallel.
pub fn homology(cc: &ChainComplex) -> Result<HomologyResult, HomologyError> {
    if let Some(k) = cc.boundary_squared_defect() {
        return Err(HomologyError::BoundarySquared(k));
    }
    let forms: Vec<SmithForm> = cc.boundaries.par_iter().map(smith_normal_form).collect();
    // rank[k] = rank of ∂_k, with ∂_0 = 0 and ∂_{top+1} = 0
    let rank = |k: usize| k.checked_sub(1).and_then(|i| forms.get(i)).map_or(0, SmithForm::rank);
    let top = cc.dims.len();
    let betti = (0..top).map(|k| cc.dims[k] - rank(k) - rank(k + 1)).collect();
    let torsion = (0..top)
        .map(|k| {
            forms.get(k).map_or(Ok(Vec::new()), |f| {
                f.torsion().map(|d| u64::try_from(d).map_err(|_| HomologyError::Overflow(d.to_string()))).collect()
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(HomologyResult {
        betti,
        torsion,
        euler: alternating_sum(cc.dims.iter().map(|&d| d as i64)),
        simplex_counts: cc.dims.clone(),
    })
}

/// The order complex of nOrd(A).
pub fn order_complex(view: &PosetView, max_chains: usize) -> Result<OrderComplex, HomologyError> {
    OrderComplex::new(view.poset(), max_chains)
}

/// Homology of the order complex of `poset`.
pub fn poset_homology(poset: &Poset, max_chains: usize) -> Result<HomologyResult, HomologyError> {
    homology(&OrderComplex::new(poset, max_chains)?.boundary_matrices())
}
