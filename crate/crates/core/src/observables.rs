//! Perturbative ground-state expectation values.
//!
//! The conjugated observable `e^{-S} O e^{S}` is expanded order by order; at
//! each order only the Pauli strings commuting with every stabilizer row can
//! contribute, and each contributes its coefficient times the sign of its
//! stabilizer decomposition.

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::stabilizer::{stabilizer_decompose, GroundStateSpec};
use crate::sw::SwGenerator;
use num_complex::Complex64;
use std::collections::HashMap;

/// Per-order contributions `<0| O^(m) |0>` and their running sums.
#[derive(Clone, Debug)]
pub struct ExpectationReport {
    pub observable: String,
    pub orders: Vec<Complex64>,
    pub cumulative: Vec<Complex64>,
}

impl ExpectationReport {
    pub fn total(&self) -> Complex64 {
        *self.cumulative.last().expect("at least order zero")
    }

    pub fn total_real(&self) -> f64 {
        self.total().re
    }

    /// Rescale per-order contributions for a different coupling strength,
    /// using order-m homogeneity: contribution_m(t) = t^m contribution_m(1).
    pub fn rescaled(&self, t: f64) -> ExpectationReport {
        let orders: Vec<Complex64> = self
            .orders
            .iter()
            .enumerate()
            .map(|(m, c)| c * t.powi(m as i32))
            .collect();
        let mut cumulative = Vec::with_capacity(orders.len());
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &orders {
            acc += c;
            cumulative.push(acc);
        }
        ExpectationReport { observable: self.observable.clone(), orders, cumulative }
    }

    pub fn to_json(&self, params: &[(String, String)]) -> serde_json::Value {
        let pairs = |v: &[Complex64]| -> Vec<serde_json::Value> {
            v.iter().map(|c| serde_json::json!([c.re, c.im])).collect()
        };
        let params: serde_json::Map<String, serde_json::Value> = params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        serde_json::json!({
            "observable": self.observable,
            "orders": pairs(&self.orders),
            "cumulative": pairs(&self.cumulative),
            "params": params,
        })
    }
}

/// Conjugation orders `O^(0) = O`,
/// `O^(m) = sum over compositions (m_1..m_c) of m, 1/c! [..[O,S^(m_1)],..,S^(m_c)]`.
pub fn conjugate_expand(o: &PauliSum, s: &SwGenerator, max_order: usize) -> Result<Vec<PauliSum>> {
    if s.max_order() < max_order {
        return Err(Error::MissingOrders { needed: max_order, available: s.max_order() });
    }
    let mut chains: HashMap<Vec<u8>, PauliSum> = HashMap::new();
    chains.insert(Vec::new(), o.clone());
    let mut orders: Vec<PauliSum> = vec![o.clone()];

    fn chain(
        comp: &[u8],
        chains: &mut HashMap<Vec<u8>, PauliSum>,
        s: &SwGenerator,
    ) -> Result<PauliSum> {
        if let Some(hit) = chains.get(comp) {
            return Ok(hit.clone());
        }
        let parent = chain(&comp[..comp.len() - 1], chains, s)?;
        let value = parent.commutator(s.order(comp[comp.len() - 1] as usize))?;
        chains.insert(comp.to_vec(), value.clone());
        Ok(value)
    }

    for m in 1..=max_order {
        let mut acc = PauliSum::zero(o.nqubits());
        for comp in crate::sw::compositions(m, 1) {
            let term = chain(&comp, &mut chains, s)?;
            let weight = 1.0 / (1..=comp.len()).map(|k| k as f64).product::<f64>();
            acc = acc.add(&term.scale(Complex64::new(weight, 0.0)))?;
        }
        orders.push(acc);
    }
    Ok(orders)
}

/// `<0| sum_i c_i P_i |0>`: keep rows commuting with every stabilizer row,
/// sum coefficient times decomposition sign.
pub fn expectation_order0(op: &PauliSum, gs: &GroundStateSpec) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    'rows: for (c, t) in op.terms() {
        for row in gs.rows() {
            if !t.commutes_with(row)? {
                continue 'rows;
            }
        }
        let d = stabilizer_decompose(&t, gs)?;
        total += c * f64::from(d.sign);
    }
    Ok(total)
}

/// Expectation report of one observable through order `max_order`.
pub fn expectation(
    name: &str,
    o: &PauliSum,
    s: &SwGenerator,
    gs: &GroundStateSpec,
    max_order: usize,
) -> Result<ExpectationReport> {
    let expanded = conjugate_expand(o, s, max_order)?;
    expectation_of_orders(name, &expanded, gs)
}

/// Expectation report from a precomputed list of conjugation orders.
pub fn expectation_of_orders(
    name: &str,
    orders: &[PauliSum],
    gs: &GroundStateSpec,
) -> Result<ExpectationReport> {
    let mut per_order = Vec::with_capacity(orders.len());
    let mut cumulative = Vec::with_capacity(orders.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for o in orders {
        let v = expectation_order0(o, gs)?;
        acc += v;
        per_order.push(v);
        cumulative.push(acc);
    }
    Ok(ExpectationReport { observable: name.to_string(), orders: per_order, cumulative })
}

/// Connected correlator `<O1 O2> - <O1><O2>` with both factors truncated at
/// the same total order: the product expansion is the convolution of the
/// per-order lists, never a product of independently truncated factors.
pub fn connected_correlation_orders(
    o1: &PauliSum,
    o2: &PauliSum,
    s: &SwGenerator,
    gs: &GroundStateSpec,
    max_order: usize,
) -> Result<Vec<f64>> {
    let e1_orders = conjugate_expand(o1, s, max_order)?;
    let e2_orders = conjugate_expand(o2, s, max_order)?;
    let e1: Vec<Complex64> = e1_orders
        .iter()
        .map(|o| expectation_order0(o, gs))
        .collect::<Result<_>>()?;
    let e2: Vec<Complex64> = e2_orders
        .iter()
        .map(|o| expectation_order0(o, gs))
        .collect::<Result<_>>()?;

    let mut connected = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        let mut joint = Complex64::new(0.0, 0.0);
        for k in 0..=m {
            let prod = e1_orders[k].multiply(&e2_orders[m - k])?;
            joint += expectation_order0(&prod, gs)?;
        }
        let disconnected: Complex64 = (0..=m).map(|k| e1[k] * e2[m - k]).sum();
        connected.push((joint - disconnected).re);
    }
    Ok(connected)
}

pub fn connected_correlation(
    o1: &PauliSum,
    o2: &PauliSum,
    s: &SwGenerator,
    gs: &GroundStateSpec,
    max_order: usize,
) -> Result<f64> {
    Ok(connected_correlation_orders(o1, o2, s, gs, max_order)?.iter().sum())
}

/// Correlation-length estimate from magnitudes at distances d and d+1:
/// `xi_d = 1 / (log|C(d)| - log|C(d+1)|)`.
pub fn correlation_length(mag_d: f64, mag_d_plus_1: f64) -> Result<f64> {
    if mag_d <= 0.0 || mag_d_plus_1 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "correlation magnitudes must be positive (got {mag_d}, {mag_d_plus_1})"
        )));
    }
    let diff = mag_d.ln() - mag_d_plus_1.ln();
    if diff == 0.0 {
        return Err(Error::InvalidInput("zero log difference".into()));
    }
    Ok(1.0 / diff)
}
