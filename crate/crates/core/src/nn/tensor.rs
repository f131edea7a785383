use crate::error::{Error, Result};
use crate::nn::rng::SeededRng;

/// Dense row-major `f64` array.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Self::filled(shape, 0.0)
    }

    pub fn filled(shape: &[usize], value: f64) -> Self {
        assert!(
            !shape.is_empty() && shape.iter().all(|&s| s > 0),
            "tensor dimensions must be positive, got {shape:?}"
        );
        let n = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; n],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::shape("tensor", format!("invalid shape {shape:?}")));
        }
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::shape(
                "tensor",
                format!("shape {shape:?} needs {n} elements, got {}", data.len()),
            ));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// 1-D tensor from a slice.
    pub fn vector(values: &[f64]) -> Self {
        Self::from_vec(&[values.len()], values.to_vec()).expect("non-empty vector")
    }

    /// 2-D tensor from equal-length rows.
    pub fn matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("tensor", "ragged rows"));
        }
        Self::from_vec(&[rows.len(), cols], rows.concat())
    }

    pub fn uniform(shape: &[usize], low: f64, high: f64, rng: &mut SeededRng) -> Self {
        let mut t = Self::zeros(shape);
        for x in &mut t.data {
            *x = rng.uniform(low, high);
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Leading dimension.
    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    /// Number of elements per leading-dimension slice.
    pub fn row_len(&self) -> usize {
        self.shape[1..].iter().product()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.row_len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.row_len();
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn fill(&mut self, value: f64) {
        self.data.iter_mut().for_each(|x| *x = value);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Keep only the first `rows` rows.
    pub fn truncate_rows(&self, rows: usize) -> Tensor {
        let rows = rows.clamp(1, self.rows());
        let mut shape = self.shape.clone();
        shape[0] = rows;
        Tensor {
            data: self.data[..rows * self.row_len()].to_vec(),
            shape,
        }
    }

    /// Concatenate 1-D tensors end to end.
    pub fn concat(parts: &[&Tensor]) -> Tensor {
        let data: Vec<f64> = parts.iter().flat_map(|t| t.data.iter().copied()).collect();
        Tensor::vector(&data)
    }

    /// Inverse of [`Tensor::concat`]: cut a 1-D tensor into pieces of the given sizes.
    pub fn split(&self, sizes: &[usize]) -> Vec<Tensor> {
        debug_assert_eq!(sizes.iter().sum::<usize>(), self.len());
        let mut offset = 0;
        sizes
            .iter()
            .map(|&n| {
                let t = Tensor::vector(&self.data[offset..offset + n]);
                offset += n;
                t
            })
            .collect()
    }
}
