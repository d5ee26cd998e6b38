//! Dense row-major matrix of 64-bit floats.
//!
//! Every operation that can produce a new value checks the result for
//! NaN/Inf and reports a hard error instead of letting it propagate.

use crate::error::NumericsError;

pub type NumResult<T> = std::result::Result<T, NumericsError>;

/// Elementwise non-linearity selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaKind {
    Relu,
    Tanh,
    Sigmoid,
    Identity,
}

impl SigmaKind {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            SigmaKind::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            SigmaKind::Tanh => x.tanh(),
            SigmaKind::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            SigmaKind::Identity => x,
        }
    }

    /// Derivative expressed in terms of input `x` and output `y`.
    pub fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            SigmaKind::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SigmaKind::Tanh => 1.0 - y * y,
            SigmaKind::Sigmoid => y * (1.0 - y),
            SigmaKind::Identity => 1.0,
        }
    }
}

impl std::str::FromStr for SigmaKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "relu" => Ok(SigmaKind::Relu),
            "tanh" => Ok(SigmaKind::Tanh),
            "sigmoid" => Ok(SigmaKind::Sigmoid),
            "identity" => Ok(SigmaKind::Identity),
            other => Err(format!("unknown activation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> NumResult<Self> {
        if data.len() != rows * cols {
            return Err(NumericsError::InvalidArgument {
                op: "from_vec",
                message: format!("{} values for a {rows}x{cols} matrix", data.len()),
            });
        }
        let m = Matrix { rows, cols, data };
        m.check_finite("from_vec")?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> NumResult<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(NumericsError::InvalidArgument {
                    op: "from_rows",
                    message: format!("ragged rows: {} vs {}", row.len(), c),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::from_vec(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn check_finite(&self, op: &'static str) -> NumResult<()> {
        for (k, v) in self.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(NumericsError::NonFinite {
                    op,
                    row: k / self.cols.max(1),
                    col: k % self.cols.max(1),
                });
            }
        }
        Ok(())
    }

    fn shape_err(
        &self,
        other: &Matrix,
        op: &'static str,
    ) -> NumericsError {
        NumericsError::Shape {
            op,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }

    pub fn matmul(&self, other: &Matrix) -> NumResult<Matrix> {
        if self.cols != other.rows {
            return Err(self.shape_err(other, "matmul"));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out.check_finite("matmul")?;
        Ok(out)
    }

    pub fn hadamard(&self, other: &Matrix) -> NumResult<Matrix> {
        if self.shape() != other.shape() {
            return Err(self.shape_err(other, "hadamard"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .collect();
        let out = Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        };
        out.check_finite("hadamard")?;
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> NumResult<Matrix> {
        if self.shape() != other.shape() {
            return Err(self.shape_err(other, "add"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        let out = Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        };
        out.check_finite("add")?;
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> NumResult<Matrix> {
        if self.shape() != other.shape() {
            return Err(self.shape_err(other, "sub"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        let out = Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        };
        out.check_finite("sub")?;
        Ok(out)
    }

    pub fn scalar_mul(&self, c: f64) -> NumResult<Matrix> {
        let out = Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        };
        out.check_finite("scalar_mul")?;
        Ok(out)
    }

    pub fn add_scalar(&self, c: f64) -> NumResult<Matrix> {
        let out = Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a + c).collect(),
        };
        out.check_finite("add_scalar")?;
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn map_tanh(&self) -> Matrix {
        self.map_sigma(SigmaKind::Tanh)
    }

    pub fn map_sigma(&self, kind: SigmaKind) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| kind.apply(x)).collect(),
        }
    }

    pub fn leaky_relu(&self, slope: f64) -> NumResult<Matrix> {
        if !(0.0 < slope && slope < 1.0) {
            return Err(NumericsError::InvalidArgument {
                op: "leaky_relu",
                message: format!("slope {slope} outside (0, 1)"),
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&x| if x > 0.0 { x } else { slope * x })
                .collect(),
        })
    }

    /// Rescale each row to unit L2 norm. Rows with norm below `eps` are zeroed.
    pub fn l2_normalize_rows(&self, eps: f64) -> NumResult<Matrix> {
        if eps <= 0.0 {
            return Err(NumericsError::InvalidArgument {
                op: "l2_normalize_rows",
                message: format!("eps {eps} must be positive"),
            });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let row = out.row_mut(i);
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < eps {
                row.iter_mut().for_each(|v| *v = 0.0);
            } else {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
        out.check_finite("l2_normalize_rows")?;
        Ok(out)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Minimum and maximum entry; `None` for empty matrices.
    pub fn min_max(&self) -> Option<(f64, f64)> {
        let mut it = self.data.iter();
        let first = *it.next()?;
        let mut lo = first;
        let mut hi = first;
        for &v in it {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        Some((lo, hi))
    }

    /// Select whole rows by index, in order. Indices may repeat.
    pub fn gather_rows(&self, indices: &[usize]) -> NumResult<Matrix> {
        let mut out = Matrix::zeros(indices.len(), self.cols);
        for (e, &i) in indices.iter().enumerate() {
            if i >= self.rows {
                return Err(NumericsError::IndexOutOfRange {
                    op: "gather_rows",
                    index: i,
                    limit: self.rows,
                });
            }
            out.row_mut(e).copy_from_slice(self.row(i));
        }
        Ok(out)
    }

    /// Serialize in row-major TSV with 17 significant digits per entry.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let fields: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&fields.join("\t"));
            out.push('\n');
        }
        out
    }
}
