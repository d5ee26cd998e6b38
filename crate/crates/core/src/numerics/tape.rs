//! Reverse-mode differentiation over [`Matrix`] values.
//!
//! Operations append nodes to a [`Tape`]; parents always precede children,
//! so the node list is already a topological order and `backward` is a
//! single reverse sweep. Gradient accumulation order is fixed by node
//! order, which keeps training bitwise deterministic.

use crate::error::NumericsError;

use super::matrix::{Matrix, NumResult, SigmaKind};
use super::segment::{segment_softmax, SegmentIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(NodeId, NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Hadamard(NodeId, NodeId),
    ScalarMul(f64, NodeId),
    AddScalar(NodeId),
    Transpose(NodeId),
    Sigma(SigmaKind, NodeId),
    LeakyRelu(f64, NodeId),
    /// `(matrix n x d, row 1 x d)`: add the row to every matrix row.
    AddRowBroadcast(NodeId, NodeId),
    GatherRows(NodeId, Vec<usize>),
    /// Rows of the input are added into `out[indices[e]]`; output has the
    /// given row count.
    ScatterAddRows(NodeId, Vec<usize>),
    /// Per-row inner product of two equal-shape matrices -> m x 1.
    RowDot(NodeId, NodeId),
    /// `(matrix m x d, column m x 1)`: scale row i by column entry i.
    MulRowScalar(NodeId, NodeId),
    L2NormalizeRows(NodeId, f64),
    SegmentSoftmax(NodeId, SegmentIndex),
    ConcatCols(Vec<NodeId>),
    Sum(NodeId),
}

struct TapeNode {
    value: Matrix,
    op: Op,
}

/// Gradients of a scalar loss with respect to every tape node.
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
    shapes: Vec<(usize, usize)>,
}

impl Gradients {
    /// Gradient for `id`; zero matrix when the node does not reach the loss.
    pub fn wrt(&self, id: NodeId) -> Matrix {
        match &self.grads[id.0] {
            Some(g) => g.clone(),
            None => {
                let (r, c) = self.shapes[id.0];
                Matrix::zeros(r, c)
            }
        }
    }
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<TapeNode>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Matrix {
        &self.nodes[id.0].value
    }

    fn push(&mut self, value: Matrix, op: Op) -> NodeId {
        self.nodes.push(TapeNode { value, op });
        NodeId(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Matrix) -> NodeId {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NumResult<NodeId> {
        let v = self.value(a).matmul(self.value(b))?;
        Ok(self.push(v, Op::MatMul(a, b)))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NumResult<NodeId> {
        let v = self.value(a).add(self.value(b))?;
        Ok(self.push(v, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NumResult<NodeId> {
        let v = self.value(a).sub(self.value(b))?;
        Ok(self.push(v, Op::Sub(a, b)))
    }

    pub fn hadamard(&mut self, a: NodeId, b: NodeId) -> NumResult<NodeId> {
        let v = self.value(a).hadamard(self.value(b))?;
        Ok(self.push(v, Op::Hadamard(a, b)))
    }

    pub fn scalar_mul(&mut self, c: f64, a: NodeId) -> NumResult<NodeId> {
        let v = self.value(a).scalar_mul(c)?;
        Ok(self.push(v, Op::ScalarMul(c, a)))
    }

    pub fn add_scalar(&mut self, c: f64, a: NodeId) -> NumResult<NodeId> {
        let v = self.value(a).add_scalar(c)?;
        Ok(self.push(v, Op::AddScalar(a)))
    }

    pub fn transpose(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).transpose();
        self.push(v, Op::Transpose(a))
    }

    pub fn sigma(&mut self, kind: SigmaKind, a: NodeId) -> NodeId {
        let v = self.value(a).map_sigma(kind);
        self.push(v, Op::Sigma(kind, a))
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        self.sigma(SigmaKind::Tanh, a)
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        self.sigma(SigmaKind::Relu, a)
    }

    pub fn leaky_relu(&mut self, slope: f64, a: NodeId) -> NumResult<NodeId> {
        let v = self.value(a).leaky_relu(slope)?;
        Ok(self.push(v, Op::LeakyRelu(slope, a)))
    }

    pub fn add_row_broadcast(&mut self, a: NodeId, row: NodeId) -> NumResult<NodeId> {
        let (ar, ac) = self.value(a).shape();
        let (br, bc) = self.value(row).shape();
        if br != 1 || bc != ac {
            return Err(NumericsError::Shape {
                op: "add_row_broadcast",
                left_rows: ar,
                left_cols: ac,
                right_rows: br,
                right_cols: bc,
            });
        }
        let mut v = self.value(a).clone();
        for i in 0..ar {
            let b = self.nodes[row.0].value.row(0).to_vec();
            for (x, y) in v.row_mut(i).iter_mut().zip(b) {
                *x += y;
            }
        }
        v.check_finite("add_row_broadcast")?;
        Ok(self.push(v, Op::AddRowBroadcast(a, row)))
    }

    pub fn gather_rows(&mut self, a: NodeId, indices: &[usize]) -> NumResult<NodeId> {
        let v = self.value(a).gather_rows(indices)?;
        Ok(self.push(v, Op::GatherRows(a, indices.to_vec())))
    }

    pub fn scatter_add_rows(
        &mut self,
        a: NodeId,
        indices: &[usize],
        n_rows: usize,
    ) -> NumResult<NodeId> {
        let src = self.value(a);
        if indices.len() != src.rows() {
            return Err(NumericsError::InvalidArgument {
                op: "scatter_add_rows",
                message: format!("{} indices for {} rows", indices.len(), src.rows()),
            });
        }
        let mut v = Matrix::zeros(n_rows, src.cols());
        for (e, &i) in indices.iter().enumerate() {
            if i >= n_rows {
                return Err(NumericsError::IndexOutOfRange {
                    op: "scatter_add_rows",
                    index: i,
                    limit: n_rows,
                });
            }
            let row = src.row(e).to_vec();
            for (x, y) in v.row_mut(i).iter_mut().zip(row) {
                *x += y;
            }
        }
        v.check_finite("scatter_add_rows")?;
        Ok(self.push(v, Op::ScatterAddRows(a, indices.to_vec())))
    }

    pub fn row_dot(&mut self, a: NodeId, b: NodeId) -> NumResult<NodeId> {
        let (ar, ac) = self.value(a).shape();
        if self.value(b).shape() != (ar, ac) {
            let (br, bc) = self.value(b).shape();
            return Err(NumericsError::Shape {
                op: "row_dot",
                left_rows: ar,
                left_cols: ac,
                right_rows: br,
                right_cols: bc,
            });
        }
        let mut v = Matrix::zeros(ar, 1);
        for i in 0..ar {
            let dot: f64 = self.value(a).row(i).iter().zip(self.value(b).row(i)).map(|(x, y)| x * y).sum();
            v.set(i, 0, dot);
        }
        v.check_finite("row_dot")?;
        Ok(self.push(v, Op::RowDot(a, b)))
    }

    pub fn mul_row_scalar(&mut self, a: NodeId, col: NodeId) -> NumResult<NodeId> {
        let (ar, ac) = self.value(a).shape();
        let (cr, cc) = self.value(col).shape();
        if cr != ar || cc != 1 {
            return Err(NumericsError::Shape {
                op: "mul_row_scalar",
                left_rows: ar,
                left_cols: ac,
                right_rows: cr,
                right_cols: cc,
            });
        }
        let mut v = self.value(a).clone();
        for i in 0..ar {
            let s = self.value(col).get(i, 0);
            for x in v.row_mut(i) {
                *x *= s;
            }
        }
        v.check_finite("mul_row_scalar")?;
        Ok(self.push(v, Op::MulRowScalar(a, col)))
    }

    pub fn l2_normalize_rows(&mut self, a: NodeId, eps: f64) -> NumResult<NodeId> {
        let v = self.value(a).l2_normalize_rows(eps)?;
        Ok(self.push(v, Op::L2NormalizeRows(a, eps)))
    }

    pub fn segment_softmax(&mut self, scores: NodeId, segments: &SegmentIndex) -> NumResult<NodeId> {
        let val = self.value(scores);
        if val.cols() != 1 {
            return Err(NumericsError::InvalidArgument {
                op: "segment_softmax",
                message: format!("expected a column vector, got {}x{}", val.rows(), val.cols()),
            });
        }
        let out = segment_softmax(val.data(), segments)?;
        let v = Matrix::from_vec(val.rows(), 1, out)?;
        Ok(self.push(v, Op::SegmentSoftmax(scores, segments.clone())))
    }

    pub fn concat_cols(&mut self, parts: &[NodeId]) -> NumResult<NodeId> {
        if parts.is_empty() {
            return Err(NumericsError::InvalidArgument {
                op: "concat_cols",
                message: "no inputs".into(),
            });
        }
        let rows = self.value(parts[0]).rows();
        let mut total_cols = 0;
        for &p in parts {
            let (r, c) = self.value(p).shape();
            if r != rows {
                return Err(NumericsError::InvalidArgument {
                    op: "concat_cols",
                    message: format!("row count mismatch: {r} vs {rows}"),
                });
            }
            total_cols += c;
        }
        let mut v = Matrix::zeros(rows, total_cols);
        for i in 0..rows {
            let mut off = 0;
            for &p in parts {
                let part = self.value(p);
                let c = part.cols();
                v.row_mut(i)[off..off + c].copy_from_slice(part.row(i));
                off += c;
            }
        }
        Ok(self.push(v, Op::ConcatCols(parts.to_vec())))
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let total = self.value(a).sum();
        let v = Matrix::from_vec(1, 1, vec![total]).expect("sum of finite entries");
        self.push(v, Op::Sum(a))
    }

    /// Reverse sweep from a scalar loss. Leaves that do not reach the loss
    /// report zero gradients.
    pub fn backward(&self, loss: NodeId) -> NumResult<Gradients> {
        let loss_val = self.value(loss);
        if loss_val.shape() != (1, 1) {
            return Err(NumericsError::NonScalarLoss {
                rows: loss_val.rows(),
                cols: loss_val.cols(),
            });
        }
        let mut grads: Vec<Option<Matrix>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Matrix::identity(1));

        for idx in (0..=loss.0).rev() {
            let Some(grad) = grads[idx].clone() else {
                continue;
            };
            match &self.nodes[idx].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let da = grad.matmul(&self.value(*b).transpose())?;
                    let db = self.value(*a).transpose().matmul(&grad)?;
                    accumulate(&mut grads, *a, da)?;
                    accumulate(&mut grads, *b, db)?;
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, grad.clone())?;
                    accumulate(&mut grads, *b, grad)?;
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, *a, grad.clone())?;
                    accumulate(&mut grads, *b, grad.scalar_mul(-1.0)?)?;
                }
                Op::Hadamard(a, b) => {
                    let da = grad.hadamard(self.value(*b))?;
                    let db = grad.hadamard(self.value(*a))?;
                    accumulate(&mut grads, *a, da)?;
                    accumulate(&mut grads, *b, db)?;
                }
                Op::ScalarMul(c, a) => {
                    accumulate(&mut grads, *a, grad.scalar_mul(*c)?)?;
                }
                Op::AddScalar(a) => {
                    accumulate(&mut grads, *a, grad)?;
                }
                Op::Transpose(a) => {
                    accumulate(&mut grads, *a, grad.transpose())?;
                }
                Op::Sigma(kind, a) => {
                    let x = self.value(*a);
                    let y = &self.nodes[idx].value;
                    let dx = Matrix::from_fn(x.rows(), x.cols(), |i, j| {
                        grad.get(i, j) * kind.derivative(x.get(i, j), y.get(i, j))
                    });
                    accumulate(&mut grads, *a, dx)?;
                }
                Op::LeakyRelu(slope, a) => {
                    let x = self.value(*a);
                    let dx = Matrix::from_fn(x.rows(), x.cols(), |i, j| {
                        let d = if x.get(i, j) > 0.0 { 1.0 } else { *slope };
                        grad.get(i, j) * d
                    });
                    accumulate(&mut grads, *a, dx)?;
                }
                Op::AddRowBroadcast(a, row) => {
                    accumulate(&mut grads, *a, grad.clone())?;
                    let mut drow = Matrix::zeros(1, grad.cols());
                    for i in 0..grad.rows() {
                        for j in 0..grad.cols() {
                            drow.set(0, j, drow.get(0, j) + grad.get(i, j));
                        }
                    }
                    accumulate(&mut grads, *row, drow)?;
                }
                Op::GatherRows(a, indices) => {
                    let src = self.value(*a);
                    let mut da = Matrix::zeros(src.rows(), src.cols());
                    for (e, &i) in indices.iter().enumerate() {
                        for j in 0..grad.cols() {
                            da.set(i, j, da.get(i, j) + grad.get(e, j));
                        }
                    }
                    accumulate(&mut grads, *a, da)?;
                }
                Op::ScatterAddRows(a, indices) => {
                    let src = self.value(*a);
                    let mut da = Matrix::zeros(src.rows(), src.cols());
                    for (e, &i) in indices.iter().enumerate() {
                        da.row_mut(e).copy_from_slice(grad.row(i));
                    }
                    accumulate(&mut grads, *a, da)?;
                }
                Op::RowDot(a, b) => {
                    let va = self.value(*a);
                    let vb = self.value(*b);
                    let da = Matrix::from_fn(va.rows(), va.cols(), |i, j| {
                        grad.get(i, 0) * vb.get(i, j)
                    });
                    let db = Matrix::from_fn(vb.rows(), vb.cols(), |i, j| {
                        grad.get(i, 0) * va.get(i, j)
                    });
                    accumulate(&mut grads, *a, da)?;
                    accumulate(&mut grads, *b, db)?;
                }
                Op::MulRowScalar(a, col) => {
                    let va = self.value(*a);
                    let vc = self.value(*col);
                    let da = Matrix::from_fn(va.rows(), va.cols(), |i, j| {
                        grad.get(i, j) * vc.get(i, 0)
                    });
                    let mut dcol = Matrix::zeros(va.rows(), 1);
                    for i in 0..va.rows() {
                        let mut acc = 0.0;
                        for j in 0..va.cols() {
                            acc += grad.get(i, j) * va.get(i, j);
                        }
                        dcol.set(i, 0, acc);
                    }
                    accumulate(&mut grads, *a, da)?;
                    accumulate(&mut grads, *col, dcol)?;
                }
                Op::L2NormalizeRows(a, eps) => {
                    let x = self.value(*a);
                    let y = &self.nodes[idx].value;
                    let mut dx = Matrix::zeros(x.rows(), x.cols());
                    for i in 0..x.rows() {
                        let norm = x.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
                        if norm < *eps {
                            continue; // zeroed row: gradient is zero
                        }
                        let ydotg: f64 = y
                            .row(i)
                            .iter()
                            .zip(grad.row(i))
                            .map(|(u, g)| u * g)
                            .sum();
                        for j in 0..x.cols() {
                            dx.set(i, j, (grad.get(i, j) - y.get(i, j) * ydotg) / norm);
                        }
                    }
                    accumulate(&mut grads, *a, dx)?;
                }
                Op::SegmentSoftmax(a, segments) => {
                    let alpha = &self.nodes[idx].value;
                    let mut dscores = Matrix::zeros(alpha.rows(), 1);
                    for range in segments.iter() {
                        if range.is_empty() {
                            continue;
                        }
                        let weighted: f64 = range
                            .clone()
                            .map(|e| grad.get(e, 0) * alpha.get(e, 0))
                            .sum();
                        for e in range {
                            let d = alpha.get(e, 0) * (grad.get(e, 0) - weighted);
                            dscores.set(e, 0, d);
                        }
                    }
                    accumulate(&mut grads, *a, dscores)?;
                }
                Op::ConcatCols(parts) => {
                    let mut off = 0;
                    for &p in parts {
                        let c = self.value(p).cols();
                        let dp = Matrix::from_fn(grad.rows(), c, |i, j| grad.get(i, off + j));
                        accumulate(&mut grads, p, dp)?;
                        off += c;
                    }
                }
                Op::Sum(a) => {
                    let g = grad.get(0, 0);
                    let src = self.value(*a);
                    accumulate(&mut grads, *a, Matrix::filled(src.rows(), src.cols(), g))?;
                }
            }
        }

        let shapes = self.nodes.iter().map(|n| n.value.shape()).collect();
        Ok(Gradients { grads, shapes })
    }
}

fn accumulate(grads: &mut [Option<Matrix>], id: NodeId, delta: Matrix) -> NumResult<()> {
    match &mut grads[id.0] {
        Some(g) => {
            *g = g.add(&delta)?;
        }
        slot @ None => {
            *slot = Some(delta);
        }
    }
    Ok(())
}
