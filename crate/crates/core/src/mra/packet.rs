//! Wavelet packet tables and the minimum-entropy best basis.

use ndarray::{ArrayD, ArrayViewD, IxDyn, Slice};

use super::dwt::{analysis_step, transform_segments};
use super::wavelet::WaveletSpec;
use crate::error::{Error, Result};

/// A packet node: `band[a]` indexes the filter sequence along axis `a`
/// (`0 ≤ band[a] < 2^depth`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketNode {
    pub depth: usize,
    pub band: Vec<usize>,
}

impl PacketNode {
    pub fn root(ndim: usize) -> Self {
        PacketNode { depth: 0, band: vec![0; ndim] }
    }

    /// The `2^ndim` children, in row-major order of the split bits.
    pub fn children(&self) -> Vec<PacketNode> {
        let ndim = self.band.len();
        (0..1usize << ndim)
            .map(|bits| PacketNode {
                depth: self.depth + 1,
                band: (0..ndim).map(|a| 2 * self.band[a] + ((bits >> (ndim - 1 - a)) & 1)).collect(),
            })
            .collect()
    }

    /// Index range covered along each axis of a field of the given shape.
    pub fn extent(&self, shape: &[usize]) -> Vec<std::ops::Range<usize>> {
        shape
            .iter()
            .zip(&self.band)
            .map(|(&n, &b)| {
                let m = n >> self.depth;
                b * m..(b + 1) * m
            })
            .collect()
    }
}

/// Packet coefficients at every depth `0..=max_depth`, each stored in the
/// field's shape with node `(d, b)` occupying [`PacketNode::extent`].
#[derive(Debug, Clone)]
pub struct PacketTable {
    pub tables: Vec<ArrayD<f64>>,
    pub energy: f64,
}

fn shannon_cost(values: impl Iterator<Item = f64>, energy: f64) -> f64 {
    if energy <= 0.0 {
        return 0.0;
    }
    values
        .map(|c| {
            let v = c * c / energy;
            if v > 0.0 {
                -v * v.ln()
            } else {
                0.0
            }
        })
        .sum()
}

impl PacketTable {
    pub fn build(field: ArrayViewD<'_, f64>, spec: &WaveletSpec, max_depth: usize) -> Result<Self> {
        let shape = field.shape().to_vec();
        if shape.is_empty() {
            return Err(Error::Dimension("packet transform needs at least one axis".into()));
        }
        for &n in &shape {
            if (n >> max_depth) << max_depth != n || n >> max_depth == 0 {
                return Err(Error::Dimension(format!("axis length {n} is not divisible by 2^{max_depth}")));
            }
        }
        let (h, g) = (spec.lowpass(), spec.highpass());
        let mut tables = vec![field.as_standard_layout().into_owned()];
        for d in 0..max_depth {
            let mut next = tables[d].clone();
            for (axis, &n) in shape.iter().enumerate() {
                transform_segments(next.view_mut(), axis, n >> d, |x, o| analysis_step(x, h, g, o));
            }
            tables.push(next);
        }
        let energy = tables[0].iter().map(|v| v * v).sum();
        Ok(PacketTable { tables, energy })
    }

    pub fn max_depth(&self) -> usize {
        self.tables.len() - 1
    }

    pub fn shape(&self) -> &[usize] {
        self.tables[0].shape()
    }

    pub fn node_coefficients(&self, node: &PacketNode) -> ArrayViewD<'_, f64> {
        let ext = node.extent(self.shape());
        self.tables[node.depth].slice_each_axis(|ax| Slice::from(ext[ax.axis.index()].clone()))
    }

    /// Additive Shannon cost `−Σ v ln v`, `v = c² / E_total`, of one node.
    pub fn cost(&self, node: &PacketNode) -> f64 {
        shannon_cost(self.node_coefficients(node).iter().copied(), self.energy)
    }

    /// Entropy of a basis given by its leaves (no tiling check).
    pub fn entropy_of(&self, leaves: &[PacketNode]) -> f64 {
        leaves.iter().map(|l| self.cost(l)).sum()
    }

    /// All nodes at `depth`.
    pub fn level_nodes(&self, depth: usize) -> Vec<PacketNode> {
        let ndim = self.shape().len();
        let per_axis = 1usize << depth;
        (0..per_axis.pow(ndim as u32))
            .map(|mut flat| {
                let mut band = vec![0; ndim];
                for a in (0..ndim).rev() {
                    band[a] = flat % per_axis;
                    flat /= per_axis;
                }
                PacketNode { depth, band }
            })
            .collect()
    }
}

/// A selected packet basis and its entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketBasis {
    pub leaves: Vec<PacketNode>,
    pub entropy: f64,
    pub shape: Vec<usize>,
    pub max_depth: usize,
}

impl PacketBasis {
    /// Basis made of every node at one depth.
    pub fn fixed_depth(table: &PacketTable, depth: usize) -> Result<Self> {
        if depth > table.max_depth() {
            return Err(Error::Argument(format!("depth {depth} exceeds table depth {}", table.max_depth())));
        }
        let leaves = table.level_nodes(depth);
        Ok(PacketBasis { entropy: table.entropy_of(&leaves), leaves, shape: table.shape().to_vec(), max_depth: table.max_depth() })
    }

    /// `true` when the leaves cover every coefficient index exactly once.
    pub fn tiles_exactly(&self) -> bool {
        let total: usize = self.shape.iter().product();
        let mut count = ArrayD::<u8>::zeros(IxDyn(&self.shape));
        for leaf in &self.leaves {
            if leaf.depth > self.max_depth || leaf.band.len() != self.shape.len() {
                return false;
            }
            let ext = leaf.extent(&self.shape);
            let mut view = count.slice_each_axis_mut(|ax| Slice::from(ext[ax.axis.index()].clone()));
            for c in view.iter_mut() {
                *c = c.saturating_add(1);
            }
        }
        count.len() == total && count.iter().all(|&c| c == 1)
    }

    /// Number of coefficients in the basis.
    pub fn coefficient_count(&self) -> usize {
        self.shape.iter().product()
    }

    /// Coefficients of the selected leaves, leaf by leaf.
    pub fn coefficients(&self, table: &PacketTable) -> Vec<f64> {
        self.leaves.iter().flat_map(|l| table.node_coefficients(l).iter().copied().collect::<Vec<_>>()).collect()
    }
}

/// Bottom-up best-basis selection: a node is split only when its children's
/// best total cost is strictly lower than its own cost.
pub fn best_basis_from_table(table: &PacketTable) -> PacketBasis {
    fn visit(table: &PacketTable, node: PacketNode, leaves: &mut Vec<PacketNode>) -> f64 {
        let own = table.cost(&node);
        if node.depth == table.max_depth() {
            leaves.push(node);
            return own;
        }
        let mark = leaves.len();
        let split: f64 = node.children().into_iter().map(|c| visit(table, c, leaves)).sum();
        if split < own {
            split
        } else {
            leaves.truncate(mark);
            leaves.push(node);
            own
        }
    }
    let mut leaves = Vec::new();
    let entropy = visit(table, PacketNode::root(table.shape().len()), &mut leaves);
    PacketBasis { leaves, entropy, shape: table.shape().to_vec(), max_depth: table.max_depth() }
}

/// Minimum Shannon-entropy packet basis of `field` down to `max_depth`.
pub fn best_basis(field: ArrayViewD<'_, f64>, spec: &WaveletSpec, max_depth: usize) -> Result<PacketBasis> {
    Ok(best_basis_from_table(&PacketTable::build(field, spec, max_depth)?))
}
