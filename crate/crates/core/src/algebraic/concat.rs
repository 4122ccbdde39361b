use super::mpo::MatrixProductOperator;
use crate::circuit::lower::CheckerNetwork;
use crate::counter::{build_layers, CountQuery, Counter, Role};
use crate::error::{Error, Result};
use crate::geometric::{contract_counter, ContractionReport, OrderKind};
use crate::scalar::Scalar;

/// Probability counter whose two layers are joined by the sites of
/// `evolved`, site `q` on line `q`.
pub fn concatenated_counter<T: Scalar>(
    front: &CheckerNetwork<T>,
    evolved: &MatrixProductOperator,
    q: &CountQuery,
) -> Result<Counter<T>> {
    let outs = front
        .line_outputs()
        .ok_or_else(|| Error::InvalidCircuit("front network has no per-line outputs".into()))?
        .to_vec();
    if outs.len() != evolved.len() {
        return Err(Error::SiteMismatch {
            left: outs.len(),
            right: evolved.len(),
        });
    }
    build_layers(front, q, &[], |ket, bra, alloc| {
        let kets: Vec<_> = outs.iter().map(|&l| ket(l)).collect();
        let bras: Vec<_> = outs.iter().map(|&l| bra(l)).collect();
        Ok(evolved
            .site_tensors(&kets, &bras, alloc)?
            .into_iter()
            .map(|t| (t, Role::Bridge))
            .collect())
    })
}

/// `⟨W| C₁† M C₁ |W⟩` for the front `C₁` and an evolved projector `M`.
pub fn contract_concatenated<T: Scalar>(
    front: &CheckerNetwork<T>,
    evolved: &MatrixProductOperator,
    q: &CountQuery,
    kind: OrderKind,
) -> Result<(T, ContractionReport)> {
    contract_counter(&concatenated_counter(front, evolved, q)?, kind)
}
