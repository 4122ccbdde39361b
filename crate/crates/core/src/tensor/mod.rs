//! Dense tensors over an exchangeable number system.
//!
//! Components are stored row-major over the declared index order. Index labels
//! are opaque [`IndexId`]s handed out by a [`LabelAlloc`]; two tensors in the
//! same network are bonded exactly when they carry the same label.

pub mod network;

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use network::{contract_network, contract_network_with_stats, ContractionOrder, ContractionStats, TensorNetwork};

/// Opaque index label.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexId(pub u64);

impl fmt::Display for IndexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Issues fresh labels for one network.
#[derive(Clone, Debug, Default)]
pub struct LabelAlloc {
    next: u64,
}

impl LabelAlloc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> IndexId {
        let id = IndexId(self.next);
        self.next += 1;
        id
    }

    pub fn fresh_n(&mut self, n: usize) -> Vec<IndexId> {
        (0..n).map(|_| self.fresh()).collect()
    }

    /// The label `fresh` would issue next.
    pub fn peek(&self) -> u64 {
        self.next
    }

    /// Makes sure later labels do not collide with `id`.
    pub fn reserve(&mut self, id: IndexId) {
        self.next = self.next.max(id.0 + 1);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    labels: Vec<IndexId>,
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(labels: Vec<IndexId>, dims: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::ComponentCount {
                expected: labels.len(),
                found: dims.len(),
            });
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(*l) {
                return Err(Error::DuplicateLabel(*l));
            }
        }
        if let Some(k) = dims.iter().position(|&d| d == 0) {
            return Err(Error::DimensionMismatch {
                label: labels[k],
                left: 0,
                right: 1,
            });
        }
        let expected: usize = dims.iter().product();
        if expected != data.len() {
            return Err(Error::ComponentCount {
                expected,
                found: data.len(),
            });
        }
        Ok(Tensor { labels, dims, data })
    }

    pub fn scalar(value: T) -> Self {
        Tensor {
            labels: Vec::new(),
            dims: Vec::new(),
            data: vec![value],
        }
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(labels: Vec<IndexId>, dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..total {
            data.push(f(&idx));
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Tensor::new(labels, dims, data)
    }

    /// Rank-1 tensor.
    pub fn vector(label: IndexId, data: Vec<T>) -> Self {
        let d = data.len();
        Tensor::new(vec![label], vec![d], data).expect("vector shape is consistent")
    }

    /// The copy tensor: 1 where all indices agree.
    pub fn copy(labels: Vec<IndexId>, dim: usize) -> Result<Self> {
        let dims = vec![dim; labels.len()];
        Tensor::from_fn(labels, dims, |idx| {
            if idx.windows(2).all(|w| w[0] == w[1]) {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    pub fn labels(&self) -> &[IndexId] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// The single component of a rank-0 tensor.
    pub fn scalar_value(&self) -> Option<&T> {
        (self.rank() == 0).then(|| &self.data[0])
    }

    pub fn axis(&self, label: IndexId) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn dim_of(&self, label: IndexId) -> Option<usize> {
        self.axis(label).map(|k| self.dims[k])
    }

    fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        debug_assert_eq!(idx.len(), self.rank());
        let off: usize = idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum();
        &self.data[off]
    }

    pub fn relabel(&self, mut f: impl FnMut(IndexId) -> IndexId) -> Result<Self> {
        Tensor::new(self.labels.iter().map(|&l| f(l)).collect(), self.dims.clone(), self.data.clone())
    }

    pub fn conj(&self) -> Self {
        Tensor {
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            data: self.data.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn scale(&self, factor: &T) -> Self {
        Tensor {
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            data: self.data.iter().map(|x| x.clone() * factor.clone()).collect(),
        }
    }

    /// Reorders axes; `order[k]` is the old axis placed at position `k`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Tensor {
            labels: order.iter().map(|&o| self.labels[o]).collect(),
            dims: order.iter().map(|&o| self.dims[o]).collect(),
            data: permute_data(&self.data, &self.dims, order),
        }
    }

    /// Reorders axes to follow `labels`.
    pub fn with_label_order(&self, labels: &[IndexId]) -> Result<Self> {
        if labels.len() != self.rank() {
            return Err(Error::ComponentCount {
                expected: self.rank(),
                found: labels.len(),
            });
        }
        let order = labels
            .iter()
            .map(|&l| self.axis(l).ok_or(Error::MissingLabel(l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.permuted(&order))
    }

    /// Keeps only the listed values of one index, in the listed order.
    pub fn select(&self, label: IndexId, keep: &[usize]) -> Result<Self> {
        let ax = self.axis(label).ok_or(Error::MissingLabel(label))?;
        let outer: usize = self.dims[..ax].iter().product();
        let inner: usize = self.dims[ax + 1..].iter().product();
        let d = self.dims[ax];
        let mut data = Vec::with_capacity(outer * keep.len() * inner);
        for o in 0..outer {
            for &v in keep {
                let base = (o * d + v) * inner;
                data.extend_from_slice(&self.data[base..base + inner]);
            }
        }
        let mut dims = self.dims.clone();
        dims[ax] = keep.len();
        Tensor::new(self.labels.clone(), dims, data)
    }

    /// Fixes one index to a value, removing it.
    pub fn fix(&self, label: IndexId, value: usize) -> Result<Self> {
        let t = self.select(label, &[value])?;
        t.drop_unit_axis(label)
    }

    /// Removes an index of dimension 1.
    pub fn drop_unit_axis(&self, label: IndexId) -> Result<Self> {
        let ax = self.axis(label).ok_or(Error::MissingLabel(label))?;
        if self.dims[ax] != 1 {
            return Err(Error::DimensionMismatch {
                label,
                left: self.dims[ax],
                right: 1,
            });
        }
        let mut labels = self.labels.clone();
        let mut dims = self.dims.clone();
        labels.remove(ax);
        dims.remove(ax);
        Ok(Tensor {
            labels,
            dims,
            data: self.data.clone(),
        })
    }

    /// Merges index `minor` into index `major`: the fused index keeps the
    /// label and position of `major` and takes the value
    /// `v_major * dim(minor) + v_minor`.
    pub fn fuse(&self, major: IndexId, minor: IndexId) -> Result<Self> {
        let a = self.axis(major).ok_or(Error::MissingLabel(major))?;
        let b = self.axis(minor).ok_or(Error::MissingLabel(minor))?;
        if a == b {
            return Err(Error::DuplicateLabel(major));
        }
        let mut order: Vec<usize> = (0..self.rank()).filter(|&k| k != b).collect();
        let pos = order.iter().position(|&k| k == a).expect("major axis kept");
        order.insert(pos + 1, b);
        let p = self.permuted(&order);
        let mut labels = p.labels.clone();
        let mut dims = p.dims.clone();
        dims[pos] *= dims[pos + 1];
        labels.remove(pos + 1);
        dims.remove(pos + 1);
        Ok(Tensor {
            labels,
            dims,
            data: p.data,
        })
    }

    /// Serialises as `dims: d1 d2 …` followed by components in row-major order.
    pub fn to_text(&self) -> String {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        let comps: Vec<String> = self.data.iter().map(Scalar::to_text).collect();
        format!("dims: {}\n{}\n", dims.join(" "), comps.join(" "))
    }

    /// Parses the fixture format, allocating fresh labels.
    pub fn from_text(text: &str, alloc: &mut LabelAlloc) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "missing dims header"))?;
        let dims_text = header
            .trim()
            .strip_prefix("dims:")
            .ok_or_else(|| Error::parse(ln + 1, "expected `dims:` header"))?;
        let dims = dims_text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::parse(ln + 1, format!("bad dimension {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut data = Vec::new();
        for (ln, line) in lines {
            for tok in line.split_whitespace() {
                data.push(T::parse_text(tok).ok_or_else(|| Error::parse(ln + 1, format!("bad component {tok:?}")))?);
            }
        }
        let labels = alloc.fresh_n(dims.len());
        Tensor::new(labels, dims, data)
    }
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn permute_data<T: Clone>(data: &[T], dims: &[usize], order: &[usize]) -> Vec<T> {
    if order.iter().enumerate().all(|(k, &o)| k == o) {
        return data.to_vec();
    }
    let src = strides(dims);
    let nd: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let ns: Vec<usize> = order.iter().map(|&o| src[o]).collect();
    let rank = order.len();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0usize; rank];
    let mut off = 0usize;
    for _ in 0..data.len() {
        out.push(data[off].clone());
        let mut k = rank;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            off += ns[k];
            if idx[k] < nd[k] {
                break;
            }
            off -= ns[k] * nd[k];
            idx[k] = 0;
        }
    }
    out
}

/// Contracts `a` and `b` over the listed `(label in a, label in b)` pairs.
///
/// The result carries the uncontracted indices of `a` followed by those of `b`.
pub fn contract_pair<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>, pairs: &[(IndexId, IndexId)]) -> Result<Tensor<T>> {
    let mut a_axes = Vec::with_capacity(pairs.len());
    let mut b_axes = Vec::with_capacity(pairs.len());
    for &(la, lb) in pairs {
        let ka = a.axis(la).ok_or(Error::MissingLabel(la))?;
        let kb = b.axis(lb).ok_or(Error::MissingLabel(lb))?;
        if a_axes.contains(&ka) {
            return Err(Error::DuplicateLabel(la));
        }
        if b_axes.contains(&kb) {
            return Err(Error::DuplicateLabel(lb));
        }
        if a.dims[ka] != b.dims[kb] {
            return Err(Error::DimensionMismatch {
                label: la,
                left: a.dims[ka],
                right: b.dims[kb],
            });
        }
        a_axes.push(ka);
        b_axes.push(kb);
    }
    let a_free: Vec<usize> = (0..a.rank()).filter(|k| !a_axes.contains(k)).collect();
    let b_free: Vec<usize> = (0..b.rank()).filter(|k| !b_axes.contains(k)).collect();

    let mut labels: Vec<IndexId> = a_free.iter().map(|&k| a.labels[k]).collect();
    for &k in &b_free {
        if labels.contains(&b.labels[k]) {
            return Err(Error::DuplicateLabel(b.labels[k]));
        }
        labels.push(b.labels[k]);
    }
    let mut dims: Vec<usize> = a_free.iter().map(|&k| a.dims[k]).collect();
    dims.extend(b_free.iter().map(|&k| b.dims[k]));

    let m: usize = a_free.iter().map(|&k| a.dims[k]).product();
    let n: usize = b_free.iter().map(|&k| b.dims[k]).product();
    let inner: usize = a_axes.iter().map(|&k| a.dims[k]).product();

    let a_order: Vec<usize> = a_free.iter().chain(a_axes.iter()).copied().collect();
    let b_order: Vec<usize> = b_axes.iter().chain(b_free.iter()).copied().collect();
    let ad = permute_data(&a.data, &a.dims, &a_order);
    let bd = permute_data(&b.data, &b.dims, &b_order);

    let mut out = vec![T::zero(); m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for l in 0..inner {
            let av = &ad[i * inner + l];
            if av.is_zero() {
                continue;
            }
            let brow = &bd[l * n..(l + 1) * n];
            for (c, bv) in row.iter_mut().zip(brow) {
                c.mul_add_assign(av, bv);
            }
        }
    }
    Ok(Tensor { labels, dims, data: out })
}

/// Contracts over every label the two tensors have in common.
pub fn contract_shared<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    let pairs: Vec<(IndexId, IndexId)> = a
        .labels
        .iter()
        .filter(|l| b.labels.contains(l))
        .map(|&l| (l, l))
        .collect();
    contract_pair(a, b, &pairs)
}

fn operator_order(rows: usize, cols: usize) -> Result<usize> {
    if rows != cols || rows < 2 || !rows.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { rows, cols });
    }
    Ok(rows.trailing_zeros() as usize)
}

/// Tensor of a `2^k × 2^k` operator in a given number system.
///
/// The first `k` labels (`cols`) are the legs that take the incoming state and
/// the last `k` (`rows`) carry the result, so the component at `(o…, i…)` is
/// `⟨i…|O|o…⟩`. The first leg of each group is the most significant bit.
pub fn operator_tensor<T: Scalar>(matrix: &DMatrix<C64>, cols: &[IndexId], rows: &[IndexId]) -> Result<Tensor<T>> {
    let k = operator_order(matrix.nrows(), matrix.ncols())?;
    if cols.len() != k || rows.len() != k {
        return Err(Error::ComponentCount {
            expected: k,
            found: cols.len().min(rows.len()),
        });
    }
    let d = 1usize << k;
    let mut data = Vec::with_capacity(d * d);
    for o in 0..d {
        for i in 0..d {
            let c = matrix[(i, o)];
            data.push(T::from_c64(c).ok_or_else(|| Error::NumberSystem {
                system: T::SYSTEM,
                what: format!("operator entry {c}"),
            })?);
        }
    }
    let labels: Vec<IndexId> = cols.iter().chain(rows).copied().collect();
    Tensor::new(labels, vec![2; 2 * k], data)
}

/// Complex tensor of a `2^k × 2^k` operator with freshly allocated labels.
pub fn tensor_from_operator(matrix: &DMatrix<C64>, alloc: &mut LabelAlloc) -> Result<Tensor<C64>> {
    let k = operator_order(matrix.nrows(), matrix.ncols())?;
    let cols = alloc.fresh_n(k);
    let rows = alloc.fresh_n(k);
    operator_tensor(matrix, &cols, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(v: &[u64]) -> Vec<IndexId> {
        v.iter().map(|&x| IndexId(x)).collect()
    }

    fn int_tensor(labels: &[u64], dims: &[usize], data: &[i64]) -> Tensor<BigInt> {
        Tensor::new(ids(labels), dims.to_vec(), data.iter().map(|&x| BigInt::from(x)).collect()).unwrap()
    }

    #[test]
    fn identity_times_vector() {
        let eye = int_tensor(&[0, 1], &[2, 2], &[1, 0, 0, 1]);
        let v = int_tensor(&[2], &[2], &[3, 5]);
        let r = contract_pair(&eye, &v, &[(IndexId(1), IndexId(2))]).unwrap();
        assert_eq!(r.labels(), &ids(&[0])[..]);
        assert_eq!(r, int_tensor(&[0], &[2], &[3, 5]));
    }

    #[test]
    fn ones_dot_ones() {
        let a = int_tensor(&[0], &[2], &[1, 1]);
        let b = int_tensor(&[1], &[2], &[1, 1]);
        let r = contract_pair(&a, &b, &[(IndexId(0), IndexId(1))]).unwrap();
        assert_eq!(r.scalar_value(), Some(&BigInt::from(2)));
    }

    #[test]
    fn random_rank3_pair_matches_nested_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let ad: Vec<i64> = (0..8).map(|_| rng.gen_range(-5..=5)).collect();
            let bd: Vec<i64> = (0..8).map(|_| rng.gen_range(-5..=5)).collect();
            // a[x,y,s] b[s,u,v] contracted over s (a axis 2, b axis 0)
            let a = int_tensor(&[0, 1, 2], &[2, 2, 2], &ad);
            let b = int_tensor(&[3, 4, 5], &[2, 2, 2], &bd);
            let r = contract_pair(&a, &b, &[(IndexId(2), IndexId(3))]).unwrap();
            assert_eq!(r.labels(), &ids(&[0, 1, 4, 5])[..]);
            for x in 0..2 {
                for y in 0..2 {
                    for u in 0..2 {
                        for v in 0..2 {
                            let mut acc = 0i64;
                            for s in 0..2 {
                                acc += ad[x * 4 + y * 2 + s] * bd[s * 4 + u * 2 + v];
                            }
                            assert_eq!(r.get(&[x, y, u, v]), &BigInt::from(acc));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn contraction_over_middle_axes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ad: Vec<i64> = (0..12).map(|_| rng.gen_range(-3..=3)).collect();
        let bd: Vec<i64> = (0..6).map(|_| rng.gen_range(-3..=3)).collect();
        // a[x(2), s(3), y(2)], b[t(2), s(3)], contract s
        let a = int_tensor(&[0, 1, 2], &[2, 3, 2], &ad);
        let b = int_tensor(&[3, 4], &[2, 3], &bd);
        let r = contract_pair(&a, &b, &[(IndexId(1), IndexId(4))]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for t in 0..2 {
                    let acc: i64 = (0..3).map(|s| ad[x * 6 + s * 2 + y] * bd[t * 3 + s]).sum();
                    assert_eq!(r.get(&[x, y, t]), &BigInt::from(acc));
                }
            }
        }
    }

    #[test]
    fn pair_errors() {
        let a = int_tensor(&[0, 1], &[2, 2], &[1, 0, 0, 1]);
        let b = int_tensor(&[2], &[3], &[1, 1, 1]);
        assert!(matches!(
            contract_pair(&a, &b, &[(IndexId(1), IndexId(2))]),
            Err(Error::DimensionMismatch { .. })
        ));
        let c = int_tensor(&[0, 5], &[2, 2], &[1, 0, 0, 1]);
        assert!(matches!(
            contract_pair(&a, &c, &[(IndexId(1), IndexId(5))]),
            Err(Error::DuplicateLabel(IndexId(0)))
        ));
        assert!(matches!(
            contract_pair(&a, &c, &[(IndexId(9), IndexId(5))]),
            Err(Error::MissingLabel(IndexId(9)))
        ));
    }

    #[test]
    fn operator_tensor_convention() {
        let mut alloc = LabelAlloc::new();
        let eye = DMatrix::<C64>::identity(2, 2);
        let t = tensor_from_operator(&eye, &mut alloc).unwrap();
        for i in 0..2 {
            for o in 0..2 {
                let want = if i == o { 1.0 } else { 0.0 };
                assert_eq!(t.get(&[o, i]).re, want);
            }
        }
        let not = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let t = tensor_from_operator(&not, &mut alloc).unwrap();
        assert_eq!(t.get(&[0, 1]).re, 1.0);
        assert_eq!(t.get(&[1, 0]).re, 1.0);
        assert_eq!(t.get(&[0, 0]).re, 0.0);
        assert_eq!(t.get(&[1, 1]).re, 0.0);
    }

    #[test]
    fn hadamard_components_match_matrix_elements() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DMatrix::from_row_slice(2, 2, &[C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)]);
        let t = tensor_from_operator(&h, &mut LabelAlloc::new()).unwrap();
        // ⟨i|H|o⟩ evaluated directly from H = (|0⟩+|1⟩)⟨0|/√2 + (|0⟩-|1⟩)⟨1|/√2
        for o in 0..2 {
            for i in 0..2 {
                let direct = if o == 1 && i == 1 { -s } else { s };
                assert!((t.get(&[o, i]).re - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn operator_rejects_bad_shapes() {
        let m = DMatrix::<C64>::identity(3, 3);
        assert!(matches!(
            tensor_from_operator(&m, &mut LabelAlloc::new()),
            Err(Error::NotPowerOfTwo { .. })
        ));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DMatrix::from_element(2, 2, C64::new(s, 0.0));
        assert!(matches!(
            operator_tensor::<BigInt>(&h, &[IndexId(0)], &[IndexId(1)]),
            Err(Error::NumberSystem { .. })
        ));
    }

    #[test]
    fn two_qubit_operator_uses_first_leg_as_msb() {
        // CNOT with control on the first leg
        let mut m = DMatrix::<C64>::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(r, c)] = C64::new(1.0, 0.0);
        }
        let t: Tensor<BigInt> = operator_tensor(&m, &ids(&[0, 1]), &ids(&[2, 3])).unwrap();
        // input |10⟩ → |11⟩
        assert_eq!(t.get(&[1, 0, 1, 1]), &BigInt::from(1));
        assert_eq!(t.get(&[1, 0, 1, 0]), &BigInt::from(0));
        assert_eq!(t.get(&[0, 1, 0, 1]), &BigInt::from(1));
    }

    #[test]
    fn fuse_and_select() {
        let t = int_tensor(&[0, 1, 2], &[2, 3, 2], &(0..12).collect::<Vec<_>>());
        let f = t.fuse(IndexId(2), IndexId(0)).unwrap();
        assert_eq!(f.labels(), &ids(&[1, 2])[..]);
        assert_eq!(f.dims(), &[3, 4]);
        // fused value = v2 * 2 + v0
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    assert_eq!(f.get(&[b, c * 2 + a]), t.get(&[a, b, c]));
                }
            }
        }
        let s = t.select(IndexId(1), &[2, 0]).unwrap();
        assert_eq!(s.dims(), &[2, 2, 2]);
        assert_eq!(s.get(&[1, 0, 1]), t.get(&[1, 2, 1]));
        assert_eq!(s.get(&[1, 1, 1]), t.get(&[1, 0, 1]));
        let x = t.fix(IndexId(0), 1).unwrap();
        assert_eq!(x.labels(), &ids(&[1, 2])[..]);
        assert_eq!(x.get(&[2, 1]), t.get(&[1, 2, 1]));
    }

    #[test]
    fn text_round_trip() {
        let t = int_tensor(&[0, 1], &[2, 2], &[1, 0, -4, 7]);
        let text = t.to_text();
        assert_eq!(text, "dims: 2 2\n1 0 -4 7\n");
        let mut alloc = LabelAlloc::new();
        let back: Tensor<BigInt> = Tensor::from_text(&text, &mut alloc).unwrap();
        assert_eq!(back.dims(), t.dims());
        assert_eq!(back.data(), t.data());
        assert!(Tensor::<BigInt>::from_text("dims: 2\n1 2 3\n", &mut alloc).is_err());
        assert!(Tensor::<BigInt>::from_text("2 2\n1 2\n", &mut alloc).is_err());
    }
}
