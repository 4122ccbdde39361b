//! Folding, support pruning, boundary absorption and contraction orders.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::counter::{Counter, Mode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::network::check_schedule;
use crate::tensor::{contract_network_with_stats, contract_shared, ContractionOrder, IndexId, Tensor, TensorNetwork};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Tree,
    Minfill,
    /// Tree when the bond graph is a forest, min-fill otherwise.
    Auto,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Tree => "tree",
            OrderKind::Minfill => "minfill",
            OrderKind::Auto => "auto",
        })
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(OrderKind::Tree),
            "minfill" => Ok(OrderKind::Minfill),
            "auto" => Ok(OrderKind::Auto),
            _ => Err(Error::InvalidOrder(format!("unknown order heuristic '{s}'"))),
        }
    }
}

/// Folds a probability-mode counter: each ket/bra pair becomes one tensor
/// with dimension-4 legs, input pairs become dimension-4 vectors and the
/// projector a boundary vector on the output leg. The value is unchanged.
/// Permutation checkers keep dimension-2 legs, see `Counter::fold`.
///
/// An exact-mode counter has no second layer; it is returned unfolded.
pub fn fold_and_merge<T: Scalar>(counter: &Counter<T>) -> Result<TensorNetwork<T>> {
    match counter.mode() {
        Mode::Probability => counter.fold(),
        Mode::Exact => {
            log::warn!("fold_and_merge on an exact-mode counter: nothing to fold");
            counter.network()
        }
    }
}

fn odometer_step(idx: &mut [usize], dims: &[usize]) {
    for ax in (0..idx.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < dims[ax] {
            return;
        }
        idx[ax] = 0;
    }
}

/// Removes bond values that cannot carry a nonzero term.
///
/// A value of a bond is dropped when every entry of an incident tensor
/// with that value is zero, given the values still allowed on its other
/// bonds; this repeats to a fixed point. Open legs are left alone. Returns
/// `None` when some bond has no value left, i.e. the contraction is zero.
pub fn prune_support<T: Scalar>(net: &TensorNetwork<T>) -> Result<Option<TensorNetwork<T>>> {
    let sites = net.label_sites();
    let tensors = net.tensors();
    let mut mask: HashMap<IndexId, Vec<bool>> = sites
        .iter()
        .filter(|(_, s)| s.len() == 2)
        .map(|(&l, s)| (l, vec![true; tensors[s[0]].dim_of(l).expect("label on site")]))
        .collect();
    let mut queue: VecDeque<usize> = (0..tensors.len()).collect();
    let mut queued = vec![true; tensors.len()];
    while let Some(k) = queue.pop_front() {
        queued[k] = false;
        let t = &tensors[k];
        let masks: Vec<Option<&Vec<bool>>> = t.labels().iter().map(|l| mask.get(l)).collect();
        let mut support: Vec<Vec<bool>> = t.dims().iter().map(|&d| vec![false; d]).collect();
        let mut idx = vec![0usize; t.rank()];
        for v in t.data() {
            let allowed = idx.iter().zip(&masks).all(|(&i, m)| m.is_none_or(|m| m[i]));
            if allowed && !v.is_zero() {
                for (ax, &i) in idx.iter().enumerate() {
                    support[ax][i] = true;
                }
            }
            odometer_step(&mut idx, t.dims());
        }
        for (ax, &l) in t.labels().iter().enumerate() {
            let Some(m) = mask.get_mut(&l) else { continue };
            let mut changed = false;
            for (keep, &s) in m.iter_mut().zip(&support[ax]) {
                if *keep && !s {
                    *keep = false;
                    changed = true;
                }
            }
            if !changed {
                continue;
            }
            if m.iter().all(|&b| !b) {
                return Ok(None);
            }
            for &other in &sites[&l] {
                if other != k && !queued[other] {
                    queued[other] = true;
                    queue.push_back(other);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(tensors.len());
    for t in tensors {
        let mut t = t.clone();
        for l in t.labels().to_vec() {
            if let Some(m) = mask.get(&l) {
                if m.iter().any(|&b| !b) {
                    let keep: Vec<usize> = (0..m.len()).filter(|&i| m[i]).collect();
                    t = t.select(l, &keep)?;
                }
            }
        }
        out.push(t);
    }
    TensorNetwork::with_alloc(out, net.alloc().clone()).map(Some)
}

/// Result of `absorb_boundaries`.
#[derive(Clone, Debug)]
pub struct Absorbed<T> {
    pub net: TensorNetwork<T>,
    /// Scalars split off along the way.
    pub factor: T,
    /// Vector absorptions performed.
    pub steps: usize,
    /// Multiply-adds of those absorptions.
    pub cost: u128,
    /// Largest tensor they produced.
    pub peak: usize,
}

/// Drops dimension-1 legs, then contracts rank-0 and rank-1 tensors into
/// their neighbours. The network keeps at least one tensor.
pub fn absorb_boundaries<T: Scalar>(net: &TensorNetwork<T>) -> Result<Absorbed<T>> {
    let mut ts: Vec<Option<Tensor<T>>> = Vec::with_capacity(net.len());
    for t in net.tensors() {
        let mut t = t.clone();
        for (l, d) in t.labels().to_vec().into_iter().zip(t.dims().to_vec()) {
            if d == 1 {
                t = t.drop_unit_axis(l)?;
            }
        }
        ts.push(Some(t));
    }
    let mut sites: HashMap<IndexId, Vec<usize>> = HashMap::new();
    for (k, t) in ts.iter().enumerate() {
        for &l in t.as_ref().expect("alive").labels() {
            sites.entry(l).or_default().push(k);
        }
    }
    let mut alive = ts.len();
    let mut factor = T::one();
    let (mut steps, mut cost, mut peak) = (0usize, 0u128, 0usize);
    let mut queue: VecDeque<usize> = (0..ts.len()).filter(|&k| ts[k].as_ref().unwrap().rank() <= 1).collect();
    while let Some(k) = queue.pop_front() {
        let Some(t) = ts[k].as_ref() else { continue };
        match t.rank() {
            0 if alive > 1 => {
                factor = factor * t.scalar_value().expect("rank 0").clone();
                ts[k] = None;
                alive -= 1;
            }
            1 => {
                let l = t.labels()[0];
                let Some(&other) = sites[&l].iter().find(|&&s| s != k) else { continue };
                let v = ts[k].take().expect("alive");
                let host = ts[other].as_ref().expect("bond partner alive");
                cost += host.len() as u128;
                let merged = contract_shared(host, &v)?;
                steps += 1;
                peak = peak.max(merged.len());
                sites.remove(&l);
                alive -= 1;
                if merged.rank() <= 1 {
                    queue.push_back(other);
                }
                ts[other] = Some(merged);
            }
            _ => {}
        }
    }
    let mut out: Vec<Tensor<T>> = ts.into_iter().flatten().collect();
    if out.is_empty() {
        out.push(Tensor::scalar(factor));
        factor = T::one();
    }
    Ok(Absorbed {
        net: TensorNetwork::with_alloc(out, net.alloc().clone())?,
        factor,
        steps,
        cost,
        peak,
    })
}

/// Bond structure of a network: tensors as vertices, bonds as edges
/// weighted by log₂ of the bond dimension.
#[derive(Clone, Debug)]
pub struct LineGraphView {
    n_tensors: usize,
    edges: Vec<(usize, usize, IndexId, f64)>,
    adjacency: Vec<Vec<(usize, IndexId)>>,
}

impl LineGraphView {
    pub fn new<T: Scalar>(net: &TensorNetwork<T>) -> Self {
        let n = net.len();
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        for b in net.bonds() {
            let d = net.tensors()[b.a].dim_of(b.label).expect("bond label");
            edges.push((b.a, b.b, b.label, (d as f64).log2()));
            adjacency[b.a].push((b.b, b.label));
            adjacency[b.b].push((b.a, b.label));
        }
        LineGraphView {
            n_tensors: n,
            edges,
            adjacency,
        }
    }

    pub fn n_tensors(&self) -> usize {
        self.n_tensors
    }

    /// `(a, b, label, log₂ dim)` per bond.
    pub fn edges(&self) -> &[(usize, usize, IndexId, f64)] {
        &self.edges
    }

    pub fn neighbours(&self, k: usize) -> &[(usize, IndexId)] {
        &self.adjacency[k]
    }

    /// No cycles, counting parallel bonds as a cycle.
    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n_tensors).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b, _, _) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Connected components as sorted tensor lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_tensors];
        let mut out = Vec::new();
        for s in 0..self.n_tensors {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The line graph: bonds as vertices, adjacent when they meet at a
    /// tensor.
    pub fn line_graph(&self) -> HashMap<IndexId, HashSet<IndexId>> {
        let mut g: HashMap<IndexId, HashSet<IndexId>> = HashMap::new();
        for &(_, _, l, _) in &self.edges {
            g.entry(l).or_default();
        }
        for adj in &self.adjacency {
            for &(_, x) in adj {
                for &(_, y) in adj {
                    if x != y {
                        g.get_mut(&x).expect("bond").insert(y);
                    }
                }
            }
        }
        g
    }
}

const WEIGHT_SCALE: f64 = 1024.0;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Greedy {
    /// Fewest new bond adjacencies.
    Fill,
    /// Largest drop in stored components.
    Size,
}

struct Eliminator {
    rule: Greedy,
    dims: HashMap<IndexId, usize>,
    /// Labels of each live group; `None` once merged away.
    groups: Vec<Option<Vec<IndexId>>>,
    position: Vec<usize>,
    /// The two live groups carrying each bond label.
    owners: HashMap<IndexId, [usize; 2]>,
    next_position: usize,
    steps: Vec<(usize, usize)>,
}

impl Eliminator {
    fn new<T: Scalar>(net: &TensorNetwork<T>, rule: Greedy) -> Self {
        let mut dims = HashMap::new();
        let mut owners: HashMap<IndexId, Vec<usize>> = HashMap::new();
        let groups: Vec<Option<Vec<IndexId>>> = net
            .tensors()
            .iter()
            .enumerate()
            .map(|(k, t)| {
                for (&l, &d) in t.labels().iter().zip(t.dims()) {
                    dims.insert(l, d);
                    owners.entry(l).or_default().push(k);
                }
                Some(t.labels().to_vec())
            })
            .collect();
        let owners = owners
            .into_iter()
            .filter(|(_, s)| s.len() == 2)
            .map(|(l, s)| (l, [s[0], s[1]]))
            .collect();
        Eliminator {
            rule,
            dims,
            position: (0..groups.len()).collect(),
            next_position: groups.len(),
            groups,
            owners,
            steps: Vec::new(),
        }
    }

    fn other(&self, l: IndexId, g: usize) -> Option<usize> {
        self.owners.get(&l).map(|&[a, b]| if a == g { b } else { a })
    }

    fn weight(&self, labels: impl Iterator<Item = IndexId>) -> u64 {
        labels
            .map(|l| ((self.dims[&l] as f64).log2() * WEIGHT_SCALE).round() as u64)
            .sum()
    }

    fn size(&self, labels: &[IndexId]) -> f64 {
        labels.iter().map(|l| self.dims[l] as f64).product()
    }

    /// (primary key, merged weight) of eliminating bond `l`.
    fn score(&self, l: IndexId) -> (i128, u64) {
        let [a, b] = self.owners[&l];
        let la = self.groups[a].as_ref().expect("live");
        let lb = self.groups[b].as_ref().expect("live");
        let shared: HashSet<IndexId> = la.iter().filter(|x| lb.contains(x)).copied().collect();
        let side_a: Vec<IndexId> = la.iter().filter(|x| !shared.contains(x)).copied().collect();
        let side_b: Vec<IndexId> = lb.iter().filter(|x| !shared.contains(x)).copied().collect();
        if self.rule == Greedy::Size {
            let merged: Vec<IndexId> = side_a.iter().chain(&side_b).copied().collect();
            let drop = self.size(&merged) - self.size(la) - self.size(lb);
            return (drop as i128, self.weight(merged.into_iter()));
        }
        let mut far: HashMap<usize, usize> = HashMap::new();
        let mut bonds_a = 0;
        for &x in &side_a {
            if let Some(o) = self.other(x, a) {
                bonds_a += 1;
                *far.entry(o).or_default() += 1;
            }
        }
        let mut bonds_b = 0;
        let mut adjacent = 0;
        for &y in &side_b {
            if let Some(o) = self.other(y, b) {
                bonds_b += 1;
                adjacent += far.get(&o).copied().unwrap_or(0);
            }
        }
        let fill = bonds_a * bonds_b - adjacent;
        let weight = self.weight(side_a.into_iter().chain(side_b));
        (fill as i128, weight)
    }

    fn merge(&mut self, a: usize, b: usize) -> usize {
        let la = self.groups[a].take().expect("live");
        let lb = self.groups[b].take().expect("live");
        let merged: Vec<IndexId> = la
            .iter()
            .filter(|x| !lb.contains(x))
            .chain(lb.iter().filter(|x| !la.contains(x)))
            .copied()
            .collect();
        for x in la.iter().filter(|x| lb.contains(x)) {
            self.owners.remove(x);
        }
        let g = self.groups.len();
        for x in &merged {
            if let Some(o) = self.owners.get_mut(x) {
                for s in o.iter_mut() {
                    if *s == a || *s == b {
                        *s = g;
                    }
                }
            }
        }
        self.groups.push(Some(merged));
        self.steps.push((self.position[a], self.position[b]));
        self.position.push(self.next_position);
        self.next_position += 1;
        g
    }

    fn run(mut self) -> ContractionOrder {
        let mut version: HashMap<IndexId, u64> = HashMap::new();
        let mut heap = BinaryHeap::new();
        let mut labels: Vec<IndexId> = self.owners.keys().copied().collect();
        labels.sort();
        for &l in &labels {
            let (f, w) = self.score(l);
            version.insert(l, 0);
            heap.push(Reverse((f, w, l.0, 0u64)));
        }
        while let Some(Reverse((_, _, id, ver))) = heap.pop() {
            let l = IndexId(id);
            if version.get(&l) != Some(&ver) || !self.owners.contains_key(&l) {
                continue;
            }
            let [a, b] = self.owners[&l];
            let g = self.merge(a, b);
            // rescore bonds of the new group and of its neighbours
            let mut dirty: HashSet<IndexId> = HashSet::new();
            for &x in self.groups[g].as_ref().expect("live") {
                if let Some(o) = self.other(x, g) {
                    dirty.insert(x);
                    dirty.extend(self.groups[o].as_ref().expect("live").iter().filter(|y| self.owners.contains_key(y)));
                }
            }
            let mut dirty: Vec<IndexId> = dirty.into_iter().collect();
            dirty.sort();
            for x in dirty {
                let v = version.entry(x).or_default();
                *v += 1;
                let (f, w) = self.score(x);
                heap.push(Reverse((f, w, x.0, *v)));
            }
        }
        // leftover groups are disconnected: outer products, smallest first
        loop {
            let mut live: Vec<(u64, usize)> = self
                .groups
                .iter()
                .enumerate()
                .filter_map(|(k, g)| g.as_ref().map(|ls| (self.weight(ls.iter().copied()), k)))
                .collect();
            if live.len() < 2 {
                break;
            }
            live.sort();
            self.merge(live[0].1, live[1].1);
        }
        ContractionOrder::new(self.steps)
    }
}

/// Single-accumulator order from tensor `start`: absorb the neighbour that
/// gives the smallest merged tensor, lowest index first. Disconnected
/// tensors join by outer product once the frontier is empty.
fn sweep_order<T: Scalar>(net: &TensorNetwork<T>, start: usize) -> ContractionOrder {
    let ts = net.tensors();
    let k = ts.len();
    let sites = net.label_sites();
    let weight = |d: usize| ((d as f64).log2() * WEIGHT_SCALE).round() as i64;
    let mut acc: HashSet<IndexId> = HashSet::new();
    let mut acc_weight = 0i64;
    let mut used = vec![false; k];
    let mut frontier: BTreeSet<usize> = BTreeSet::new();
    let mut steps = Vec::with_capacity(k.saturating_sub(1));
    let mut position = start;
    let mut absorb = |j: usize, acc: &mut HashSet<IndexId>, acc_weight: &mut i64, frontier: &mut BTreeSet<usize>| {
        used[j] = true;
        frontier.remove(&j);
        for (&l, &d) in ts[j].labels().iter().zip(ts[j].dims()) {
            if acc.remove(&l) {
                *acc_weight -= weight(d);
            } else {
                acc.insert(l);
                *acc_weight += weight(d);
            }
            for &o in &sites[&l] {
                if !used[o] {
                    frontier.insert(o);
                }
            }
        }
        used.iter().position(|u| !u)
    };
    let mut next_unused = absorb(start, &mut acc, &mut acc_weight, &mut frontier);
    for next_position in k..2 * k - 1 {
        let pick = frontier
            .iter()
            .map(|&j| {
                let t = &ts[j];
                let w = t.labels().iter().zip(t.dims()).fold(acc_weight, |w, (l, &d)| {
                    if acc.contains(l) {
                        w - weight(d)
                    } else {
                        w + weight(d)
                    }
                });
                (w, j)
            })
            .min()
            .map(|(_, j)| j)
            .or(next_unused)
            .expect("tensors left");
        steps.push((position, pick));
        position = next_position;
        next_unused = absorb(pick, &mut acc, &mut acc_weight, &mut frontier);
    }
    ContractionOrder::new(steps)
}

/// Greedy min-fill elimination over bonds.
///
/// Eliminating a bond merges the two tensors carrying it. The next bond is
/// the one adding the fewest new bond adjacencies, then the one with the
/// smallest merged tensor, then the lowest label. Components are ordered
/// separately and joined by outer products at the end.
///
/// Two more greedy schedules compete with it: merging whichever pair shrinks
/// storage the most, and sweeping one accumulator through the network from
/// either end. The schedule with the smallest peak, then the smallest cost,
/// is returned.
pub fn minfill_order<T: Scalar>(net: &TensorNetwork<T>) -> ContractionOrder {
    let mut candidates = vec![Eliminator::new(net, Greedy::Fill).run(), Eliminator::new(net, Greedy::Size).run()];
    if net.len() > 1 {
        candidates.push(sweep_order(net, 0));
        candidates.push(sweep_order(net, net.len() - 1));
    }
    candidates
        .into_iter()
        .map(|mut o| {
            annotate(net, &mut o);
            o
        })
        .min_by(|a, b| a.width.total_cmp(&b.width).then(a.cost.total_cmp(&b.cost)))
        .expect("at least one candidate")
}

/// Leaf-first order for forests. On a tree every zero-fill elimination
/// folds a leaf into its neighbour, so this is the min-fill schedule.
pub fn tree_order<T: Scalar>(net: &TensorNetwork<T>) -> Result<ContractionOrder> {
    if !LineGraphView::new(net).is_forest() {
        return Err(Error::CyclicNetwork);
    }
    Ok(minfill_order(net))
}

pub fn order_for<T: Scalar>(net: &TensorNetwork<T>, kind: OrderKind) -> Result<(ContractionOrder, OrderKind)> {
    match kind {
        OrderKind::Tree => Ok((tree_order(net)?, OrderKind::Tree)),
        OrderKind::Minfill => Ok((minfill_order(net), OrderKind::Minfill)),
        OrderKind::Auto => {
            if LineGraphView::new(net).is_forest() {
                Ok((minfill_order(net), OrderKind::Tree))
            } else {
                Ok((minfill_order(net), OrderKind::Minfill))
            }
        }
    }
}

fn annotate<T: Scalar>(net: &TensorNetwork<T>, order: &mut ContractionOrder) {
    if let Ok(r) = order_cost(net, order) {
        order.width = r.width;
        order.cost = r.total as f64;
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct StepCost {
    pub lhs: usize,
    pub rhs: usize,
    pub cost: u128,
    /// Component count of the merged tensor.
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub steps: Vec<StepCost>,
    pub total: u128,
    pub peak: usize,
    pub width: f64,
}

impl CostReport {
    /// Rows `step lhs rhs cost peak`, peak being the running maximum.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("step\tlhs\trhs\tcost\tpeak\n");
        let mut peak = 0;
        for (k, st) in self.steps.iter().enumerate() {
            peak = peak.max(st.size);
            s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", k, st.lhs, st.rhs, st.cost, peak));
        }
        s
    }
}

/// Multiply-add count and intermediate sizes of `order` by symbolic
/// replay.
pub fn order_cost<T: Scalar>(net: &TensorNetwork<T>, order: &ContractionOrder) -> Result<CostReport> {
    check_schedule(net.len(), order)?;
    let mut dims: HashMap<IndexId, usize> = HashMap::new();
    let mut slots: Vec<Vec<IndexId>> = Vec::with_capacity(net.len() + order.steps.len());
    for t in net.tensors() {
        for (&l, &d) in t.labels().iter().zip(t.dims()) {
            dims.insert(l, d);
        }
        slots.push(t.labels().to_vec());
    }
    let mut steps = Vec::with_capacity(order.steps.len());
    let mut total: u128 = 0;
    let mut peak = 0usize;
    for &(x, y) in &order.steps {
        let (a, b) = (&slots[x], &slots[y]);
        let mut cost: u128 = 1;
        for l in a.iter().chain(b.iter().filter(|l| !a.contains(l))) {
            cost = cost.saturating_mul(dims[l] as u128);
        }
        let merged: Vec<IndexId> = a
            .iter()
            .filter(|l| !b.contains(l))
            .chain(b.iter().filter(|l| !a.contains(l)))
            .copied()
            .collect();
        let size = merged.iter().map(|l| dims[l]).fold(1usize, |acc, d| acc.saturating_mul(d));
        total = total.saturating_add(cost);
        peak = peak.max(size);
        steps.push(StepCost {
            lhs: x,
            rhs: y,
            cost,
            size,
        });
        slots.push(merged);
    }
    Ok(CostReport {
        steps,
        total,
        peak,
        width: (peak.max(1) as f64).log2(),
    })
}

/// What a counter contraction did.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub order: OrderKind,
    pub width: f64,
    pub cost: f64,
    /// Largest intermediate actually formed.
    pub peak: usize,
    /// Tensors left after pruning and absorption.
    pub tensors: usize,
}

impl ContractionReport {
    fn trivial() -> Self {
        ContractionReport {
            order: OrderKind::Tree,
            width: 0.0,
            cost: 0.0,
            peak: 0,
            tensors: 0,
        }
    }
}

/// Prune, absorb, order and contract a closed network.
pub fn contract_closed<T: Scalar>(net: &TensorNetwork<T>, kind: OrderKind) -> Result<(T, ContractionReport)> {
    if !net.is_closed() {
        return Err(Error::InvalidOrder("network has open indices".into()));
    }
    let Some(pruned) = prune_support(net)? else {
        return Ok((T::zero(), ContractionReport::trivial()));
    };
    let absorbed = absorb_boundaries(&pruned)?;
    let reduced = &absorbed.net;
    let (order, used) = order_for(reduced, kind)?;
    let (t, stats) = contract_network_with_stats(reduced, &order)?;
    let value = t.scalar_value().cloned().ok_or_else(|| Error::InvalidOrder("result is not a scalar".into()))?;
    let peak = stats.peak.max(absorbed.peak);
    Ok((
        value * absorbed.factor,
        ContractionReport {
            order: used,
            width: (peak.max(1) as f64).log2(),
            cost: order.cost + absorbed.cost as f64,
            peak,
            tensors: reduced.len(),
        },
    ))
}

/// Contraction value of a counter: folded first in probability mode.
pub fn contract_counter<T: Scalar>(counter: &Counter<T>, kind: OrderKind) -> Result<(T, ContractionReport)> {
    let net = match counter.mode() {
        Mode::Probability => counter.fold()?,
        Mode::Exact => counter.network()?,
    };
    contract_closed(&net, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::circuit::quantum::{GateName, QuantumCircuit, QuantumGate};
    use crate::circuit::{boolean_to_quantum, lower_boolean, lower_quantum, parse_dimacs};
    use crate::counter::{build_counter, CountQuery};
    use crate::tensor::{contract_network, ContractionOrder, LabelAlloc};
    use num_bigint::BigInt;
    use num_complex::Complex64 as C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn full_value<T: Scalar>(net: &TensorNetwork<T>) -> T {
        contract_network(net, &ContractionOrder::sequential(net.len()))
            .unwrap()
            .scalar_value()
            .unwrap()
            .clone()
    }

    fn ones(labels: &[u64], dims: &[usize]) -> Tensor<BigInt> {
        let len = dims.iter().product();
        Tensor::new(labels.iter().map(|&l| IndexId(l)).collect(), dims.to_vec(), vec![BigInt::from(1); len]).unwrap()
    }

    #[test]
    fn hadamard_fold() {
        let q = QuantumCircuit::new(1, vec![QuantumGate::named(GateName::H, &[0])]).unwrap();
        let c = lower_quantum::<C64>(&q).unwrap();
        let counter = build_counter(&c, &CountQuery::at(1, "0".parse().unwrap()).unwrap(), Mode::Probability).unwrap();
        let folded = fold_and_merge(&counter).unwrap();
        let mut shapes: Vec<Vec<usize>> = folded.tensors().iter().map(|t| t.dims().to_vec()).collect();
        shapes.sort();
        assert_eq!(shapes, vec![vec![4], vec![4], vec![4, 4]]);
        let v = full_value(&folded);
        assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((full_value(&counter.network().unwrap()) - v).norm() < 1e-15);
    }

    #[test]
    fn identity_fold_gives_identity_tensors() {
        let q = QuantumCircuit::new(2, vec![QuantumGate::named(GateName::Swap, &[0, 1]), QuantumGate::named(GateName::Swap, &[0, 1])])
            .unwrap();
        let c = lower_quantum::<C64>(&q).unwrap();
        let counter = build_counter(&c, &CountQuery::at(2, "01".parse().unwrap()).unwrap(), Mode::Probability).unwrap();
        let folded = fold_and_merge(&counter).unwrap();
        let (a, b) = (full_value(&folded), full_value(&counter.network().unwrap()));
        assert!((a - b).norm() < 1e-14);
        assert!((a - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fig1_fold_preserves_value() {
        let qc = boolean_to_quantum(&parse_dimacs("p cnf 4 4\n4 0\n-3 0\n-2 0\n1 0\n").unwrap());
        let c = lower_quantum::<C64>(&qc).unwrap();
        for s in ["", "1", "01", "1001", "0001"] {
            let counter = build_counter(&c, &CountQuery::at(4, s.parse().unwrap()).unwrap(), Mode::Probability).unwrap();
            let folded = fold_and_merge(&counter).unwrap();
            assert_eq!(folded.len(), c.network().len() + 1 + c.lines());
            let unfolded = counter.network().unwrap();
            let (u, _) = contract_closed(&unfolded, OrderKind::Minfill).unwrap();
            let (f, _) = contract_closed(&folded, OrderKind::Minfill).unwrap();
            assert!((u - f).norm() < 1e-12, "suffix {s}");
        }
    }

    #[test]
    fn exact_counter_fold_is_a_no_op() {
        let c = lower_boolean::<BigInt>(&parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap()).unwrap();
        let counter = build_counter(&c, &CountQuery::at(2, BitString::empty()).unwrap(), Mode::Exact).unwrap();
        assert_eq!(fold_and_merge(&counter).unwrap().len(), counter.network().unwrap().len());
    }

    #[test]
    fn pruning_keeps_values_and_detects_zero() {
        let c = lower_boolean::<BigInt>(&parse_dimacs("p cnf 4 4\n4 0\n-3 0\n-2 0\n1 0\n").unwrap()).unwrap();
        for s in ["", "1", "0", "01"] {
            let counter = build_counter(&c, &CountQuery::at(4, s.parse().unwrap()).unwrap(), Mode::Exact).unwrap();
            let net = counter.network().unwrap();
            let direct = full_value(&net);
            match prune_support(&net).unwrap() {
                Some(p) => assert_eq!(full_value(&p), direct),
                None => assert_eq!(direct, BigInt::from(0)),
            }
        }
        let zero = TensorNetwork::new(vec![
            Tensor::vector(IndexId(0), vec![BigInt::from(1), BigInt::from(0)]),
            Tensor::vector(IndexId(0), vec![BigInt::from(0), BigInt::from(5)]),
        ])
        .unwrap();
        assert!(prune_support(&zero).unwrap().is_none());
    }

    #[test]
    fn absorption_keeps_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rnd = |labels: &[u64]| {
            let dims = vec![2; labels.len()];
            Tensor::from_fn(labels.iter().map(|&l| IndexId(l)).collect(), dims, |_| BigInt::from(rng.gen_range(-3..4)))
                .unwrap()
        };
        let net = TensorNetwork::new(vec![rnd(&[0]), rnd(&[0, 1, 2]), rnd(&[1]), rnd(&[2, 3]), rnd(&[3]), rnd(&[])]).unwrap();
        let Absorbed {
            net: reduced, factor, ..
        } = absorb_boundaries(&net).unwrap();
        assert_eq!(reduced.len(), 1);
        assert_eq!(full_value(&reduced) * factor, full_value(&net));
    }

    #[test]
    fn path_and_star_orders() {
        // path of 5 tensors
        let path = TensorNetwork::new(vec![
            ones(&[0], &[2]),
            ones(&[0, 1], &[2, 2]),
            ones(&[1, 2], &[2, 2]),
            ones(&[2, 3], &[2, 2]),
            ones(&[3], &[2]),
        ])
        .unwrap();
        let o = tree_order(&path).unwrap();
        assert!(o.width <= 2.0);
        assert_eq!(full_value(&path), contract_network(&path, &o).unwrap().scalar_value().unwrap().clone());
        // star: centre rank 4, leaves merged one by one into it
        let mut ts = vec![ones(&[0, 1, 2, 3], &[2, 2, 2, 2])];
        ts.extend((0..4).map(|l| ones(&[l], &[2])));
        let star = TensorNetwork::new(ts).unwrap();
        let o = tree_order(&star).unwrap();
        assert_eq!(o.steps.len(), 4);
        for (k, &(a, b)) in o.steps.iter().enumerate() {
            let centre = if k == 0 { 0 } else { 4 + k };
            assert!(a == centre || b == centre, "step {k} = {:?}", (a, b));
        }
        assert!(o.width <= 4.0);
    }

    #[test]
    fn cycle_is_rejected_by_tree_order() {
        let ring = TensorNetwork::new(vec![ones(&[0, 1], &[2, 2]), ones(&[1, 2], &[2, 2]), ones(&[2, 0], &[2, 2])]).unwrap();
        assert!(matches!(tree_order(&ring), Err(Error::CyclicNetwork)));
        let parallel = TensorNetwork::new(vec![ones(&[0, 1], &[2, 2]), ones(&[0, 1], &[2, 2])]).unwrap();
        assert!(!LineGraphView::new(&parallel).is_forest());
        assert_eq!(full_value(&ring), contract_network(&ring, &minfill_order(&ring)).unwrap().scalar_value().unwrap().clone());
    }

    #[test]
    fn disconnected_components_are_joined() {
        let net = TensorNetwork::new(vec![
            ones(&[0], &[2]),
            ones(&[0], &[2]),
            ones(&[1, 2], &[3, 2]),
            ones(&[1, 2], &[3, 2]),
        ])
        .unwrap();
        assert_eq!(LineGraphView::new(&net).components().len(), 2);
        let o = minfill_order(&net);
        assert_eq!(o.steps.len(), 3);
        assert_eq!(contract_network(&net, &o).unwrap().scalar_value(), Some(&BigInt::from(12)));
    }

    #[test]
    fn chain_cost() {
        let mut alloc = LabelAlloc::new();
        let l = alloc.fresh_n(4);
        let net = TensorNetwork::new(vec![
            ones(&[l[0].0, l[1].0], &[2, 2]),
            ones(&[l[1].0, l[2].0], &[2, 2]),
            ones(&[l[2].0, l[3].0], &[2, 2]),
        ])
        .unwrap();
        let r = order_cost(&net, &ContractionOrder::sequential(3)).unwrap();
        assert_eq!(r.steps.iter().map(|s| s.cost).collect::<Vec<_>>(), vec![8, 8]);
        assert_eq!(r.peak, 4);
        let (_, stats) = contract_network_with_stats(&net, &ContractionOrder::sequential(3)).unwrap();
        assert_eq!(stats.peak, r.peak);
        assert_eq!(stats.multiply_adds, r.total);
        assert!(r.to_tsv().starts_with("step\tlhs\trhs\tcost\tpeak\n0\t0\t1\t8\t4\n"));
    }

    /// Fewest wires any pairwise merge tree must hold at once, by
    /// exhaustive search over subsets.
    fn best_tree_wires(k: usize, edges: &[(usize, usize)]) -> usize {
        let cut = |s: usize| edges.iter().filter(|&&(a, b)| (s >> a & 1) != (s >> b & 1)).count();
        let mut best = vec![usize::MAX; 1 << k];
        for s in 1..1usize << k {
            if s.count_ones() == 1 {
                best[s] = 0;
                continue;
            }
            let low = s & s.wrapping_neg();
            let rest = s & !low;
            let mut sub = rest;
            let mut b = usize::MAX;
            loop {
                let a = sub | low;
                if a != s {
                    b = b.min(best[a].max(best[s & !a]));
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            best[s] = b.max(cut(s));
        }
        best[(1 << k) - 1]
    }

    #[test]
    fn grid_order_is_optimal() {
        let mut alloc = LabelAlloc::new();
        let mut edges = Vec::new();
        let mut legs: Vec<Vec<u64>> = vec![Vec::new(); 9];
        for r in 0..3 {
            for c in 0..3 {
                let k = 3 * r + c;
                for nb in [(c < 2).then_some(k + 1), (r < 2).then_some(k + 3)].into_iter().flatten() {
                    let l = alloc.fresh().0;
                    legs[k].push(l);
                    legs[nb].push(l);
                    edges.push((k, nb));
                }
            }
        }
        let net = TensorNetwork::new(legs.iter().map(|ls| ones(ls, &vec![2; ls.len()])).collect()).unwrap();
        let optimum = best_tree_wires(9, &edges);
        assert_eq!(optimum, 4);
        let order = minfill_order(&net);
        assert_eq!(order.width, optimum as f64);
        let value = contract_network(&net, &order).unwrap();
        assert_eq!(value.scalar_value(), Some(&BigInt::from(1u64 << 12)));
    }

    #[test]
    fn fig1_minfill_peak_below_dense_bound() {
        let qc = boolean_to_quantum(&parse_dimacs("p cnf 4 4\n4 0\n-3 0\n-2 0\n1 0\n").unwrap());
        let c = lower_quantum::<C64>(&qc).unwrap();
        let counter = build_counter(&c, &CountQuery::at(4, BitString::empty()).unwrap(), Mode::Probability).unwrap();
        let net = fold_and_merge(&counter).unwrap();
        let r = order_cost(&net, &minfill_order(&net)).unwrap();
        assert!((r.peak as f64) < 2f64.powi(qc.qubits() as i32));
    }

    #[test]
    fn order_kind_text() {
        for k in [OrderKind::Tree, OrderKind::Minfill, OrderKind::Auto] {
            assert_eq!(k.to_string().parse::<OrderKind>().unwrap(), k);
        }
        assert!("greedy".parse::<OrderKind>().is_err());
    }
}
