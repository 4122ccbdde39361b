use std::collections::HashMap;

use super::{contract_shared, IndexId, LabelAlloc, Tensor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A set of tensors bonded through shared labels.
///
/// A label that occurs on two tensors is a bond; a label that occurs once is
/// an open index. No label may occur more than twice.
#[derive(Clone, Debug)]
pub struct TensorNetwork<T> {
    tensors: Vec<Tensor<T>>,
    alloc: LabelAlloc,
}

/// One bond: the label and the two tensor positions it joins.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Bond {
    pub label: IndexId,
    pub a: usize,
    pub b: usize,
}

impl<T: Scalar> TensorNetwork<T> {
    pub fn new(tensors: Vec<Tensor<T>>) -> Result<Self> {
        let mut alloc = LabelAlloc::new();
        for t in &tensors {
            for &l in t.labels() {
                alloc.reserve(l);
            }
        }
        Self::with_alloc(tensors, alloc)
    }

    pub fn with_alloc(tensors: Vec<Tensor<T>>, mut alloc: LabelAlloc) -> Result<Self> {
        let mut seen: HashMap<IndexId, (usize, usize)> = HashMap::new();
        for (pos, t) in tensors.iter().enumerate() {
            for (&l, &d) in t.labels().iter().zip(t.dims()) {
                alloc.reserve(l);
                match seen.get_mut(&l) {
                    None => {
                        seen.insert(l, (1, d));
                    }
                    Some((count, dim)) => {
                        *count += 1;
                        if *count > 2 {
                            return Err(Error::OverboundLabel(l));
                        }
                        if *dim != d {
                            return Err(Error::DimensionMismatch {
                                label: l,
                                left: *dim,
                                right: d,
                            });
                        }
                    }
                }
                let _ = pos;
            }
        }
        Ok(TensorNetwork { tensors, alloc })
    }

    pub fn tensors(&self) -> &[Tensor<T>] {
        &self.tensors
    }

    pub fn into_tensors(self) -> Vec<Tensor<T>> {
        self.tensors
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn alloc(&self) -> &LabelAlloc {
        &self.alloc
    }

    pub fn fresh_label(&mut self) -> IndexId {
        self.alloc.fresh()
    }

    pub fn push(&mut self, tensor: Tensor<T>) -> Result<usize> {
        let mut tensors = std::mem::take(&mut self.tensors);
        tensors.push(tensor);
        let alloc = self.alloc.clone();
        match Self::with_alloc(tensors, alloc) {
            Ok(net) => {
                *self = net;
                Ok(self.tensors.len() - 1)
            }
            Err(e) => Err(e),
        }
    }

    /// Positions of the tensors carrying each label.
    pub fn label_sites(&self) -> HashMap<IndexId, Vec<usize>> {
        let mut map: HashMap<IndexId, Vec<usize>> = HashMap::new();
        for (pos, t) in self.tensors.iter().enumerate() {
            for &l in t.labels() {
                map.entry(l).or_default().push(pos);
            }
        }
        map
    }

    pub fn bonds(&self) -> Vec<Bond> {
        let mut bonds: Vec<Bond> = self
            .label_sites()
            .into_iter()
            .filter(|(_, s)| s.len() == 2)
            .map(|(label, s)| Bond { label, a: s[0], b: s[1] })
            .collect();
        bonds.sort_by_key(|b| b.label);
        bonds
    }

    /// Open indices in order of first appearance.
    pub fn open_labels(&self) -> Vec<IndexId> {
        let sites = self.label_sites();
        let mut out = Vec::new();
        for t in &self.tensors {
            for &l in t.labels() {
                if sites[&l].len() == 1 {
                    out.push(l);
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.open_labels().is_empty()
    }

    pub fn dim_of(&self, label: IndexId) -> Option<usize> {
        self.tensors.iter().find_map(|t| t.dim_of(label))
    }
}

/// A binary merge schedule.
///
/// Positions `0..k` are the network's tensors; merge step `s` creates
/// position `k + s`. `width` is log₂ of the largest intermediate component
/// count and `cost` the total multiply-add count, both from symbolic replay.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionOrder {
    pub steps: Vec<(usize, usize)>,
    pub width: f64,
    pub cost: f64,
}

impl ContractionOrder {
    pub fn new(steps: Vec<(usize, usize)>) -> Self {
        ContractionOrder {
            steps,
            width: 0.0,
            cost: 0.0,
        }
    }

    /// Left-to-right accumulation over `k` tensors.
    pub fn sequential(k: usize) -> Self {
        let mut steps = Vec::new();
        if k > 1 {
            steps.push((0, 1));
            for j in 2..k {
                steps.push((k + j - 2, j));
            }
        }
        ContractionOrder::new(steps)
    }
}

/// Observed during a numeric contraction.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct ContractionStats {
    /// Largest intermediate component count.
    pub peak: usize,
    pub multiply_adds: u128,
}

/// Validates a schedule against `k` tensors and returns the live-slot replay
/// as pairs of slot indices.
pub(crate) fn check_schedule(k: usize, order: &ContractionOrder) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidOrder("network has no tensors".into()));
    }
    if order.steps.len() + 1 != k {
        return Err(Error::InvalidOrder(format!(
            "{} tensors need {} merge steps, order has {}",
            k,
            k - 1,
            order.steps.len()
        )));
    }
    let mut live = vec![true; k];
    for (s, &(x, y)) in order.steps.iter().enumerate() {
        for p in [x, y] {
            if p >= live.len() {
                return Err(Error::InvalidOrder(format!("step {s} references missing position {p}")));
            }
            if !live[p] {
                return Err(Error::InvalidOrder(format!("step {s} reuses position {p}")));
            }
        }
        if x == y {
            return Err(Error::InvalidOrder(format!("step {s} merges position {x} with itself")));
        }
        live[x] = false;
        live[y] = false;
        live.push(true);
    }
    Ok(())
}

pub fn contract_network<T: Scalar>(net: &TensorNetwork<T>, order: &ContractionOrder) -> Result<Tensor<T>> {
    contract_network_with_stats(net, order).map(|(t, _)| t)
}

pub fn contract_network_with_stats<T: Scalar>(
    net: &TensorNetwork<T>,
    order: &ContractionOrder,
) -> Result<(Tensor<T>, ContractionStats)> {
    check_schedule(net.len(), order)?;
    let mut slots: Vec<Option<Tensor<T>>> = net.tensors.iter().cloned().map(Some).collect();
    let mut stats = ContractionStats::default();
    for &(x, y) in &order.steps {
        let a = slots[x].take().expect("schedule validated");
        let b = slots[y].take().expect("schedule validated");
        stats.multiply_adds += merge_cost(a.labels(), a.dims(), b.labels(), b.dims());
        let r = contract_shared(&a, &b)?;
        stats.peak = stats.peak.max(r.len());
        slots.push(Some(r));
    }
    let result = slots.into_iter().rev().flatten().next().expect("one survivor");
    Ok((result, stats))
}

/// Multiply-adds of one pairwise merge: the product of all distinct index
/// dimensions involved.
pub(crate) fn merge_cost(la: &[IndexId], da: &[usize], lb: &[IndexId], db: &[usize]) -> u128 {
    let mut c: u128 = da.iter().map(|&d| d as u128).product();
    for (l, &d) in lb.iter().zip(db) {
        if !la.contains(l) {
            c *= d as u128;
        }
    }
    c
}
