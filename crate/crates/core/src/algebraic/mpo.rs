use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use num_traits::Zero;

use super::pauli::{Pauli, PauliString};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{IndexId, LabelAlloc, Tensor};

/// Largest site count `dense` will expand.
pub const DENSE_SITE_LIMIT: usize = 10;

/// One site: legs (left bond, right bond, bra, ket), row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MpoSite {
    left: usize,
    right: usize,
    data: Vec<C64>,
}

impl MpoSite {
    pub fn new(left: usize, right: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != left * right * 4 {
            return Err(Error::ComponentCount {
                expected: left * right * 4,
                found: data.len(),
            });
        }
        Ok(MpoSite { left, right, data })
    }

    fn from_matrix(m: &DMatrix<C64>) -> Self {
        let data = (0..2).flat_map(|b| (0..2).map(move |k| m[(b, k)])).collect();
        MpoSite { left: 1, right: 1, data }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    fn at(&self, l: usize, r: usize, bra: usize, ket: usize) -> C64 {
        self.data[((l * self.right + r) * 2 + bra) * 2 + ket]
    }
}

/// An operator on `m` qubits as a chain of sites, site `q` acting on qubit
/// `q`. The end bonds have dimension 1. No truncation is ever applied.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixProductOperator {
    sites: Vec<MpoSite>,
}

impl MatrixProductOperator {
    pub fn new(sites: Vec<MpoSite>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::SiteMismatch { left: 0, right: 0 });
        }
        if sites[0].left != 1 || sites[sites.len() - 1].right != 1 {
            return Err(Error::InvalidCircuit("end bonds of an MPO must have dimension 1".into()));
        }
        for w in sites.windows(2) {
            if w[0].right != w[1].left {
                return Err(Error::InvalidCircuit(format!(
                    "adjacent MPO bonds differ: {} vs {}",
                    w[0].right, w[1].left
                )));
            }
        }
        Ok(MatrixProductOperator { sites })
    }

    pub fn identity(m: usize) -> Self {
        Self::product(&vec![DMatrix::identity(2, 2); m])
    }

    pub fn zero(m: usize) -> Self {
        let mut id = Self::identity(m);
        id.sites[0].data.iter_mut().for_each(|c| *c = C64::zero());
        id
    }

    /// χ = 1 product of single-qubit matrices, `factors[q]` on qubit `q`.
    pub fn product(factors: &[DMatrix<C64>]) -> Self {
        MatrixProductOperator {
            sites: factors.iter().map(MpoSite::from_matrix).collect(),
        }
    }

    pub fn sites(&self) -> &[MpoSite] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Largest internal bond dimension (1 for a single site).
    pub fn chi(&self) -> usize {
        self.sites[..self.sites.len() - 1].iter().map(|s| s.right).max().unwrap_or(1)
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.sites[0].data.iter_mut().for_each(|x| *x *= c);
        self
    }

    /// Dense `2^m × 2^m` matrix, site 0 least significant.
    pub fn dense(&self) -> Result<DMatrix<C64>> {
        let m = self.sites.len();
        if m > DENSE_SITE_LIMIT {
            return Err(Error::BudgetExceeded {
                what: "dense MPO expansion (sites)",
                requested: m,
                limit: DENSE_SITE_LIMIT,
            });
        }
        // acc[(bra, ket)] is a row vector over the current right bond
        let mut acc: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
        let mut dim = 1usize;
        for (q, site) in self.sites.iter().enumerate() {
            let new_dim = dim * 2;
            let mut next = vec![vec![C64::zero(); site.right]; new_dim * new_dim];
            for b in 0..dim {
                for k in 0..dim {
                    let v = &acc[b * dim + k];
                    for sb in 0..2 {
                        for sk in 0..2 {
                            let nb = b | (sb << q);
                            let nk = k | (sk << q);
                            let out = &mut next[nb * new_dim + nk];
                            for (l, &vl) in v.iter().enumerate() {
                                if vl.is_zero() {
                                    continue;
                                }
                                for (r, o) in out.iter_mut().enumerate() {
                                    *o += vl * site.at(l, r, sb, sk);
                                }
                            }
                        }
                    }
                }
            }
            acc = next;
            dim = new_dim;
        }
        Ok(DMatrix::from_fn(dim, dim, |b, k| acc[b * dim + k][0]))
    }

    /// Site tensors joining the given ket and bra legs, qubit `q` on
    /// `ket[q]`/`bra[q]`. Legs are (left, right, bra, ket) with the end
    /// bonds left out.
    pub fn site_tensors<T: Scalar>(&self, ket: &[IndexId], bra: &[IndexId], alloc: &mut LabelAlloc) -> Result<Vec<Tensor<T>>> {
        let m = self.sites.len();
        if ket.len() != m || bra.len() != m {
            return Err(Error::SiteMismatch {
                left: m,
                right: ket.len().min(bra.len()),
            });
        }
        let bonds = alloc.fresh_n(m.saturating_sub(1));
        let mut out = Vec::with_capacity(m);
        for (q, site) in self.sites.iter().enumerate() {
            let mut labels = Vec::with_capacity(4);
            let mut dims = Vec::with_capacity(4);
            if q > 0 {
                labels.push(bonds[q - 1]);
                dims.push(site.left);
            }
            if q + 1 < m {
                labels.push(bonds[q]);
                dims.push(site.right);
            }
            labels.extend([bra[q], ket[q]]);
            dims.extend([2, 2]);
            let data = site
                .data
                .iter()
                .map(|&c| {
                    T::from_c64(c).ok_or_else(|| Error::NumberSystem {
                        system: T::SYSTEM,
                        what: format!("MPO entry {c}"),
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            out.push(Tensor::new(labels, dims, data)?);
        }
        Ok(out)
    }
}

/// χ = 1 MPO of a Pauli string, the phase on site 0.
pub fn pauli_to_mpo(p: &PauliString) -> MatrixProductOperator {
    let factors: Vec<DMatrix<C64>> = p.letters().iter().map(|&l: &Pauli| l.matrix()).collect();
    MatrixProductOperator::product(&factors).scaled(p.phase_value())
}

fn check_sizes(a: &MatrixProductOperator, b: &MatrixProductOperator) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::SiteMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Block direct sum of the bonds; `dense(a + b) = dense(a) + dense(b)`.
pub fn mpo_add(a: &MatrixProductOperator, b: &MatrixProductOperator) -> Result<MatrixProductOperator> {
    check_sizes(a, b)?;
    let m = a.len();
    if m == 1 {
        let data = a.sites[0].data.iter().zip(&b.sites[0].data).map(|(x, y)| x + y).collect();
        return MatrixProductOperator::new(vec![MpoSite::new(1, 1, data)?]);
    }
    let mut sites = Vec::with_capacity(m);
    for q in 0..m {
        let (sa, sb) = (&a.sites[q], &b.sites[q]);
        let left = if q == 0 { 1 } else { sa.left + sb.left };
        let right = if q == m - 1 { 1 } else { sa.right + sb.right };
        let mut site = MpoSite {
            left,
            right,
            data: vec![C64::zero(); left * right * 4],
        };
        // block offsets of b inside the summed bonds
        let lo = if q == 0 { 0 } else { sa.left };
        let ro = if q == m - 1 { 0 } else { sa.right };
        for (src, l0, r0) in [(sa, 0, 0), (sb, lo, ro)] {
            for l in 0..src.left {
                for r in 0..src.right {
                    for p in 0..4 {
                        site.data[((l + l0) * right + (r + r0)) * 4 + p] += src.data[(l * src.right + r) * 4 + p];
                    }
                }
            }
        }
        sites.push(site);
    }
    MatrixProductOperator::new(sites)
}

/// Per-site operator product with Kronecker bonds;
/// `dense(a · b) = dense(a) · dense(b)`.
pub fn mpo_multiply(a: &MatrixProductOperator, b: &MatrixProductOperator) -> Result<MatrixProductOperator> {
    check_sizes(a, b)?;
    let mut sites = Vec::with_capacity(a.len());
    for (sa, sb) in a.sites.iter().zip(&b.sites) {
        let (left, right) = (sa.left * sb.left, sa.right * sb.right);
        let mut data = vec![C64::zero(); left * right * 4];
        for la in 0..sa.left {
            for ra in 0..sa.right {
                for lb in 0..sb.left {
                    for rb in 0..sb.right {
                        let (l, r) = (la * sb.left + lb, ra * sb.right + rb);
                        for br in 0..2 {
                            for kt in 0..2 {
                                let mut s = C64::zero();
                                for mid in 0..2 {
                                    s += sa.at(la, ra, br, mid) * sb.at(lb, rb, mid, kt);
                                }
                                data[((l * right + r) * 2 + br) * 2 + kt] = s;
                            }
                        }
                    }
                }
            }
        }
        sites.push(MpoSite { left, right, data });
    }
    MatrixProductOperator::new(sites)
}
