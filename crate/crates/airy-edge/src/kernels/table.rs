//! Whole kernel columns on a panel grid.
//!
//! For β = 1, 4 the entry ∫_y^x J(u, y) du makes single evaluations cost a
//! quadrature each. On a grid of contiguous Gauss–Legendre panels the column
//! K(·, y_j) is instead built from cached per-node data, with the integral
//! carried panel by panel by the spectral integration matrix.

use super::blocks::NodeData;
use super::{Base, Kernel, KernelValue};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integration_matrix};

/// Contiguous Gauss–Legendre panels of one order.
#[derive(Debug, Clone)]
pub struct PanelGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    order: usize,
    panels: Vec<(f64, f64)>,
}

impl PanelGrid {
    /// `panels` must be ascending with each panel starting where the
    /// previous one ends.
    pub fn new(panels: Vec<(f64, f64)>, order: usize) -> Result<Self> {
        if panels.is_empty() || order == 0 {
            return Err(Error::Input("panel grid needs panels and a positive order".into()));
        }
        for w in panels.windows(2) {
            if w[0].1 != w[1].0 {
                return Err(Error::Precondition(format!("panels {:?} and {:?} are not contiguous", w[0], w[1])));
            }
        }
        if panels.iter().any(|(a, b)| !(a < b && a.is_finite() && b.is_finite())) {
            return Err(Error::Domain("panels must be finite and non-empty".into()));
        }
        let rule = gauss_legendre(order);
        let (mut nodes, mut weights) = (Vec::new(), Vec::new());
        for &(a, b) in &panels {
            let (x, w) = rule.mapped(a, b);
            nodes.extend(x);
            weights.extend(w);
        }
        Ok(Self { nodes, weights, order, panels })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> &[(f64, f64)] {
        &self.panels
    }

    /// ∫ from the first panel start to each node of f sampled at the nodes,
    /// with lengths multiplied by `scale`.
    fn cumulative(&self, f: &[f64], scale: f64) -> Vec<f64> {
        let m = integration_matrix(self.order);
        let rule = gauss_legendre(self.order);
        let mut out = Vec::with_capacity(f.len());
        let mut carry = 0.0;
        for (p, &(a, b)) in self.panels.iter().enumerate() {
            let half = 0.5 * (b - a) * scale;
            let block = &f[p * self.order..(p + 1) * self.order];
            for row in m.iter() {
                out.push(carry + half * row.iter().zip(block).map(|(r, v)| r * v).sum::<f64>());
            }
            carry += half * rule.weights.iter().zip(block).map(|(w, v)| w * v).sum::<f64>();
        }
        out
    }
}

/// Column access to a kernel on a panel grid.
pub struct KernelColumns<'a> {
    kernel: &'a Kernel,
    grid: &'a PanelGrid,
    nodes: Option<Vec<NodeData>>,
}

impl Kernel {
    /// Column access on `grid`; Palm-anchored kernels are not supported.
    pub fn columns<'a>(&'a self, grid: &'a PanelGrid) -> Result<KernelColumns<'a>> {
        if self.anchor.is_some() {
            return Err(Error::Precondition("kernel columns need an unanchored kernel".into()));
        }
        let nodes = match &self.base {
            Base::Scalar(_) => None,
            Base::Quaternion(j) => {
                let c = j.coord_scale();
                Some(grid.nodes.iter().map(|&u| j.node(c * u)).collect())
            }
        };
        Ok(KernelColumns { kernel: self, grid, nodes })
    }
}

impl KernelColumns<'_> {
    /// K(u_i, u_j) for every node u_i.
    pub fn column(&self, j: usize) -> Vec<KernelValue> {
        let g = &self.grid.nodes;
        match (&self.kernel.base, &self.nodes) {
            (Base::Scalar(k), _) => g.iter().map(|&u| KernelValue::Scalar(k.value(u, g[j]))).collect(),
            (Base::Quaternion(jk), Some(nodes)) => {
                let c = jk.coord_scale();
                jk.column(nodes, j, |f| self.grid.cumulative(f, c)).into_iter().map(KernelValue::Quaternion).collect()
            }
            (Base::Quaternion(_), None) => unreachable!("quaternion columns carry node data"),
        }
    }
}
