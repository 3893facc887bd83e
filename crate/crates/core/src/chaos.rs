//! Hermite chaos basis and the layout of strategy coefficients.
//!
//! A trade `π(j, i)` decided at trade slot `s = j + 1` is a finite sum of
//! coefficients times normalized Hermite products `∏ H_{n_m}(x_m)/√(n_m!)` of
//! the variables visible at that slot. Slot 0 (the agreement date) sees no
//! randomness, so its only basis element is the constant.
//!
//! Coefficients are stored flat: slot ascending, then maturity ascending, then
//! multi-index in graded order (total degree ascending; within a degree,
//! leading exponents descending).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{binomial, sqrt};
use crate::yield_model::{rate_loadings, TenorStructure, VasicekParams};

/// Probabilists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..n {
                let next = x * cur - k as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Writes `H_k(x)/√(k!)` for `k = 0..=degree` into `out`.
pub fn normalized_hermite_into(degree: u32, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > degree as usize);
    out[0] = 1.0;
    if degree == 0 {
        return;
    }
    out[1] = x;
    // h_{k+1} = (x h_k - √k h_{k-1}) / √(k+1) for the normalized sequence.
    for k in 1..degree as usize {
        out[k + 1] = (x * out[k] - sqrt(k as f64) * out[k - 1]) / sqrt((k + 1) as f64);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

impl core::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("(")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(")")
    }
}

/// All multi-indices in `num_vars` variables of total degree at most `degree`,
/// in graded order. With zero variables the only index is the empty one.
pub fn enumerate_multiindices(num_vars: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(num_vars + degree as usize, degree as usize));
    if num_vars == 0 {
        out.push(MultiIndex(Vec::new()));
        return out;
    }
    let mut buf = vec![0u32; num_vars];
    for total in 0..=degree {
        compositions(&mut buf, 0, total, &mut out);
    }
    out
}

fn compositions(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for lead in (0..=remaining).rev() {
        buf[pos] = lead;
        compositions(buf, pos + 1, remaining - lead, out);
    }
}

/// Normalized Hermite product `∏ H_{n_m}(g_m)/√(n_m!)`.
pub fn basis_eval(index: &MultiIndex, g: &[f64]) -> Result<f64> {
    if index.num_vars() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: index.num_vars(),
            found: g.len(),
        });
    }
    let mut table = [0.0; 32];
    let mut value = 1.0;
    for (&n, &x) in index.exponents().iter().zip(g) {
        if n == 0 {
            continue;
        }
        if (n as usize) < table.len() {
            normalized_hermite_into(n, x, &mut table);
            value *= table[n as usize];
        } else {
            let mut big = vec![0.0; n as usize + 1];
            normalized_hermite_into(n, x, &mut big);
            value *= big[n as usize];
        }
    }
    Ok(value)
}

/// Truncation of the strategy space: total degree `degree` at every date,
/// optionally restricted to the `memory + 1` most recent short rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationScheme {
    pub degree: u32,
    pub num_periods: usize,
    pub memory: Option<usize>,
}

impl TruncationScheme {
    pub fn full(num_periods: usize, degree: u32) -> Self {
        TruncationScheme {
            degree,
            num_periods,
            memory: None,
        }
    }

    pub fn with_memory(num_periods: usize, degree: u32, memory: usize) -> Self {
        TruncationScheme {
            degree,
            num_periods,
            memory: Some(memory),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_periods == 0 {
            return Err(Error::invalid("num_periods", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of Gaussian variables a strategy may use at trade slot `slot`.
    pub fn num_visible(&self, slot: usize) -> usize {
        match self.memory {
            None => slot,
            Some(q) => slot.min(q + 1),
        }
    }

    pub fn layout(&self) -> StrategyLayout {
        StrategyLayout::new(self)
    }

    /// Closed-form coefficient count for the full-history scheme:
    /// `Σ_{s=0}^{N-1} (N - s) C(s + d, d)`.
    pub fn full_dimension(num_periods: usize, degree: u32) -> usize {
        let d = degree as usize;
        (0..num_periods)
            .map(|s| (num_periods - s) * binomial(s + d, d))
            .sum()
    }
}

/// Where each `(slot, maturity)` block lives in the flat coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyLayout {
    num_periods: usize,
    indices: Vec<Vec<MultiIndex>>,
    slot_offsets: Vec<usize>,
    dim: usize,
}

impl StrategyLayout {
    fn new(scheme: &TruncationScheme) -> Self {
        let n = scheme.num_periods;
        let mut indices = Vec::with_capacity(n);
        let mut slot_offsets = Vec::with_capacity(n + 1);
        let mut dim = 0;
        for slot in 0..n {
            let set = enumerate_multiindices(scheme.num_visible(slot), scheme.degree);
            slot_offsets.push(dim);
            dim += (n - slot) * set.len();
            indices.push(set);
        }
        slot_offsets.push(dim);
        StrategyLayout {
            num_periods: n,
            indices,
            slot_offsets,
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_periods(&self) -> usize {
        self.num_periods
    }

    /// Multi-indices used at `slot` (empty for slots without free trades).
    pub fn indices(&self, slot: usize) -> &[MultiIndex] {
        self.indices.get(slot).map_or(&[], |v| v.as_slice())
    }

    pub fn block_len(&self, slot: usize) -> usize {
        self.indices(slot).len()
    }

    /// Offset of block `(slot, maturity)`; maturities run over `slot..N`.
    pub fn offset(&self, slot: usize, maturity: usize) -> Result<usize> {
        if slot >= self.num_periods || maturity < slot || maturity >= self.num_periods {
            return Err(Error::IndexOutOfRange { slot, maturity });
        }
        Ok(self.slot_offsets[slot] + (maturity - slot) * self.block_len(slot))
    }

    /// `(slot, maturity)` pairs in storage order.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_periods).flat_map(move |s| (s..self.num_periods).map(move |m| (s, m)))
    }
}

/// One `(slot, maturity)` group of coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBlock {
    pub slot: usize,
    pub maturity: usize,
    pub values: Vec<f64>,
}

/// A point in strategy space together with the truncation it belongs to.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategyParams {
    pub scheme: TruncationScheme,
    pub coefficients: Vec<f64>,
}

impl StrategyParams {
    pub fn zeros(scheme: TruncationScheme) -> Self {
        let dim = scheme.layout().dim();
        StrategyParams {
            scheme,
            coefficients: vec![0.0; dim],
        }
    }

    pub fn from_vec(scheme: TruncationScheme, coefficients: Vec<f64>) -> Result<Self> {
        let dim = scheme.layout().dim();
        if coefficients.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coefficients.len(),
            });
        }
        Ok(StrategyParams {
            scheme,
            coefficients,
        })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coefficients
    }

    /// Split into per-trade blocks in storage order.
    pub fn unflatten(&self) -> Vec<CoefficientBlock> {
        let layout = self.scheme.layout();
        layout
            .blocks()
            .map(|(slot, maturity)| {
                let off = layout.offset(slot, maturity).expect("block from layout");
                let len = layout.block_len(slot);
                CoefficientBlock {
                    slot,
                    maturity,
                    values: self.coefficients[off..off + len].to_vec(),
                }
            })
            .collect()
    }

    pub fn flatten(scheme: TruncationScheme, blocks: &[CoefficientBlock]) -> Result<Self> {
        let layout = scheme.layout();
        let mut out = Self::zeros(scheme);
        let mut seen = 0;
        for block in blocks {
            let off = layout.offset(block.slot, block.maturity)?;
            let len = layout.block_len(block.slot);
            if block.values.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: block.values.len(),
                });
            }
            out.coefficients[off..off + len].copy_from_slice(&block.values);
            seen += len;
        }
        if seen != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: seen,
            });
        }
        Ok(out)
    }
}

/// Linear map from the path innovations to the variables a strategy sees.
#[derive(Debug, Clone, PartialEq)]
enum VariableMap {
    /// Full history: slot `s` sees `G^(0..s)` directly.
    Identity,
    /// Recent-rates restriction: per slot, orthonormal rows over `G^(0..s)`.
    Whitened(Vec<Vec<Vec<f64>>>),
}

/// Basis evaluation for a given model, tenor and truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyBasis {
    scheme: TruncationScheme,
    layout: StrategyLayout,
    map: VariableMap,
}

impl StrategyBasis {
    pub fn new(
        scheme: TruncationScheme,
        params: &VasicekParams,
        tenor: &TenorStructure,
    ) -> Result<Self> {
        scheme.validate()?;
        if scheme.num_periods != tenor.num_periods() {
            return Err(Error::DimensionMismatch {
                expected: tenor.num_periods(),
                found: scheme.num_periods,
            });
        }
        let map = match scheme.memory {
            None => VariableMap::Identity,
            Some(q) => VariableMap::Whitened(
                (0..scheme.num_periods)
                    .map(|slot| whitening_rows(params, tenor, slot, q))
                    .collect(),
            ),
        };
        Ok(StrategyBasis {
            layout: scheme.layout(),
            scheme,
            map,
        })
    }

    pub fn scheme(&self) -> &TruncationScheme {
        &self.scheme
    }

    pub fn layout(&self) -> &StrategyLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Rows expressing the visible variables of `slot` in terms of `G^(0..slot)`.
    pub fn visible_rows(&self, slot: usize) -> Vec<Vec<f64>> {
        match &self.map {
            VariableMap::Identity => (0..slot)
                .map(|k| {
                    let mut row = vec![0.0; slot];
                    row[k] = 1.0;
                    row
                })
                .collect(),
            VariableMap::Whitened(rows) => rows[slot].clone(),
        }
    }

    /// Variables visible at `slot`, given all draws of a path (only
    /// `draws[..slot]` are read).
    pub fn visible_variables(&self, slot: usize, draws: &[f64], out: &mut Vec<f64>) {
        out.clear();
        match &self.map {
            VariableMap::Identity => out.extend_from_slice(&draws[..slot]),
            VariableMap::Whitened(rows) => out.extend(
                rows[slot]
                    .iter()
                    .map(|row| row.iter().zip(draws).map(|(w, g)| w * g).sum::<f64>()),
            ),
        }
    }

    /// Values of every basis element of `slot` on the given draws.
    pub fn basis_values(&self, slot: usize, draws: &[f64], out: &mut Vec<f64>) {
        let mut vars = Vec::new();
        self.visible_variables(slot, draws, &mut vars);
        let d = self.scheme.degree as usize;
        let mut table = vec![0.0; vars.len() * (d + 1)];
        for (m, &x) in vars.iter().enumerate() {
            normalized_hermite_into(
                self.scheme.degree,
                x,
                &mut table[m * (d + 1)..(m + 1) * (d + 1)],
            );
        }
        out.clear();
        out.extend(self.layout.indices(slot).iter().map(|idx| {
            idx.exponents()
                .iter()
                .enumerate()
                .fold(1.0, |acc, (m, &n)| acc * table[m * (d + 1) + n as usize])
        }));
    }

    /// Quantity of `maturity` bonds traded at `slot` under `alpha`.
    pub fn quantity(
        &self,
        alpha: &StrategyParams,
        slot: usize,
        maturity: usize,
        draws: &[f64],
    ) -> Result<f64> {
        if alpha.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: alpha.dim(),
            });
        }
        let off = self.layout.offset(slot, maturity)?;
        if draws.len() < slot {
            return Err(Error::DimensionMismatch {
                expected: slot,
                found: draws.len(),
            });
        }
        let mut values = Vec::new();
        self.basis_values(slot, draws, &mut values);
        Ok(dot(&alpha.coefficients[off..off + values.len()], &values))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal combinations of `G^(0..slot)` spanning the Gaussian space of
/// the rates `R_{T_j}, R_{T_{j-1}}, …, R_{T_{j-q}}` visible at `slot = j + 1`.
///
/// Gram–Schmidt runs from the most recent rate backwards, so the first
/// variable is the standardized `R_{T_j}`. A rate with no new randomness
/// (zero volatility, or `t = T_0`) yields an all-zero row.
pub fn whitening_rows(
    params: &VasicekParams,
    tenor: &TenorStructure,
    slot: usize,
    memory: usize,
) -> Vec<Vec<f64>> {
    if slot == 0 {
        return Vec::new();
    }
    let j = slot - 1;
    let count = slot.min(memory + 1);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(count);
    for back in 0..count {
        let k = j - back;
        let mut v = rate_loadings(params, tenor, k);
        v.resize(slot, 0.0);
        let scale = dot(&v, &v).max(0.0);
        for u in &rows {
            let c = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        let norm = sqrt(dot(&v, &v));
        if norm > 1e-12 * sqrt(scale) && norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        } else {
            v.iter_mut().for_each(|x| *x = 0.0);
        }
        rows.push(v);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 3.7), 1.0);
        assert_eq!(hermite(2, 2.0), 3.0);
        assert_eq!(hermite(3, 1.0), -2.0);
        // H_4 = x^4 - 6x^2 + 3
        assert_relative_eq!(
            hermite(4, 1.5),
            1.5f64.powi(4) - 6.0 * 2.25 + 3.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn normalized_table_matches_definition() {
        let mut t = [0.0; 6];
        normalized_hermite_into(5, -0.8, &mut t);
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0f64];
        for n in 0..6 {
            assert_relative_eq!(
                t[n],
                hermite(n as u32, -0.8) / fact[n].sqrt(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn enumeration_order() {
        let v: Vec<Vec<u32>> = enumerate_multiindices(2, 2)
            .into_iter()
            .map(|m| m.0)
            .collect();
        assert_eq!(
            v,
            [
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        let v: Vec<Vec<u32>> = enumerate_multiindices(1, 1)
            .into_iter()
            .map(|m| m.0)
            .collect();
        assert_eq!(v, [vec![0], vec![1]]);
        let v: Vec<Vec<u32>> = enumerate_multiindices(3, 0)
            .into_iter()
            .map(|m| m.0)
            .collect();
        assert_eq!(v, [vec![0, 0, 0]]);
        assert_eq!(enumerate_multiindices(0, 4).len(), 1);
    }

    #[test]
    fn enumeration_counts() {
        for nv in 1..=6 {
            for d in 0..=5u32 {
                let idx = enumerate_multiindices(nv, d);
                assert_eq!(idx.len(), binomial(nv + d as usize, d as usize));
                assert!(idx.windows(2).all(|w| w[0].degree() <= w[1].degree()));
                assert!(idx.iter().all(|m| m.degree() <= d));
            }
        }
    }

    #[test]
    fn basis_eval_cases() {
        let zero = MultiIndex(vec![0, 0, 0]);
        assert_eq!(basis_eval(&zero, &[0.3, -2.0, 9.0]).unwrap(), 1.0);
        assert_relative_eq!(
            basis_eval(&MultiIndex(vec![1, 1]), &[0.7, -1.3]).unwrap(),
            0.7 * -1.3
        );
        assert_relative_eq!(
            basis_eval(&MultiIndex(vec![2, 0]), &[2.0, 5.0]).unwrap(),
            3.0 / 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(matches!(
            basis_eval(&MultiIndex(vec![1]), &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dimension_formula() {
        let s = TruncationScheme::full(2, 1);
        assert_eq!(s.layout().dim(), 4);
        for n in 1..=6 {
            for d in 0..=4 {
                assert_eq!(
                    TruncationScheme::full(n, d).layout().dim(),
                    TruncationScheme::full_dimension(n, d)
                );
            }
        }
    }

    #[test]
    fn layout_offsets() {
        let layout = TruncationScheme::full(2, 1).layout();
        assert_eq!(layout.offset(0, 0).unwrap(), 0);
        assert_eq!(layout.offset(0, 1).unwrap(), 1);
        assert_eq!(layout.offset(1, 1).unwrap(), 2);
        assert!(layout.offset(1, 0).is_err());
        assert!(layout.offset(0, 2).is_err());
        assert!(layout.offset(2, 2).is_err());
        let blocks: Vec<_> = layout.blocks().collect();
        assert_eq!(blocks, [(0, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn quantity_two_term_expansion() {
        let params = VasicekParams::default();
        let tenor = TenorStructure::annual(2).unwrap();
        let scheme = TruncationScheme::full(2, 1);
        let basis = StrategyBasis::new(scheme, &params, &tenor).unwrap();
        let alpha = StrategyParams::from_vec(scheme, vec![0.0, 0.0, 0.4, -1.5]).unwrap();
        let q = basis.quantity(&alpha, 1, 1, &[0.8, 9.0, 9.0]).unwrap();
        assert_relative_eq!(q, 0.4 - 1.5 * 0.8, epsilon = 1e-15);
        let c = StrategyParams::from_vec(scheme, vec![2.5, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(basis.quantity(&c, 0, 0, &[1.0, 2.0, 3.0]).unwrap(), 2.5);
        assert_eq!(
            basis
                .quantity(&StrategyParams::zeros(scheme), 1, 1, &[1.0, 2.0, 3.0])
                .unwrap(),
            0.0
        );
        assert!(basis.quantity(&alpha, 2, 2, &[0.0; 3]).is_err());
    }

    #[test]
    fn whitening_first_row_is_standardized_rate() {
        let params = VasicekParams::default();
        let tenor = TenorStructure::annual(4).unwrap();
        let rows = whitening_rows(&params, &tenor, 3, 0);
        assert_eq!(rows.len(), 1);
        let c = rate_loadings(&params, &tenor, 2);
        let sd = dot(&c, &c).sqrt();
        for (w, c) in rows[0].iter().zip(&c) {
            assert_relative_eq!(*w, c / sd, epsilon = 1e-15);
        }
    }

    #[test]
    fn whitening_rows_are_orthonormal() {
        let params = VasicekParams::default();
        let tenor = TenorStructure::annual(6).unwrap();
        for slot in 1..6 {
            for q in 0..4 {
                let rows = whitening_rows(&params, &tenor, slot, q);
                assert_eq!(rows.len(), slot.min(q + 1));
                for a in 0..rows.len() {
                    for b in 0..rows.len() {
                        let want = if a == b { 1.0 } else { 0.0 };
                        assert_relative_eq!(dot(&rows[a], &rows[b]), want, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_volatility_gives_zero_rows() {
        let params = VasicekParams::new(0.1, 0.05, 0.0, 0.05).unwrap();
        let tenor = TenorStructure::annual(3).unwrap();
        let rows = whitening_rows(&params, &tenor, 2, 1);
        assert!(rows.iter().flatten().all(|&w| w == 0.0));
    }
}
