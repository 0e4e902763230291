//! Dense row-major matrices, elementwise nonlinearities, row softmax, and a
//! small deterministic RNG. All arithmetic is f64; iteration order is fixed
//! row-major so results are bit-reproducible across runs.

use crate::{Error, Result};

/// Dense row-major matrix of f64. Serializes as nested row arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl serde::Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Mat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Mat::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::param("matrix entries must be finite".to_string()));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds from nested rows; rows must be rectangular.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::shape(format!(
                    "row {i} has length {} but row 0 has length {c}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Mat::from_vec(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
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

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Standard matrix product, shape (self.rows x b.cols).
    pub fn matmul(&self, b: &Mat) -> Result<Mat> {
        if self.cols != b.rows {
            return Err(Error::shape(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a_ik = self.data[i * self.cols + k];
                if a_ik == 0.0 {
                    continue;
                }
                let brow = &b.data[k * b.cols..(k + 1) * b.cols];
                let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
                for j in 0..b.cols {
                    orow[j] += a_ik * brow[j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, b: &Mat) -> Result<Mat> {
        if self.rows != b.rows || self.cols != b.cols {
            return Err(Error::shape(format!(
                "add {}x{} to {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| x + y)
            .collect();
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, b: &Mat) -> Result<Mat> {
        if self.rows != b.rows || self.cols != b.cols {
            return Err(Error::shape(format!(
                "sub {}x{} from {}x{}",
                b.rows, b.cols, self.rows, self.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| x - y)
            .collect();
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Row-wise softmax of self/tau with per-row max subtraction for
    /// numerical stability.
    pub fn row_softmax(&self, tau: f64) -> Result<Mat> {
        if tau <= 0.0 || !tau.is_finite() {
            return Err(Error::param(format!("softmax temperature {tau} must be > 0")));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let row = out.row_mut(i);
            for x in row.iter_mut() {
                *x /= tau;
            }
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for x in row.iter_mut() {
                *x = (*x - max).exp();
                sum += *x;
            }
            for x in row.iter_mut() {
                *x /= sum;
            }
        }
        Ok(out)
    }

    pub fn relu(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x.max(0.0)).collect(),
        }
    }

    pub fn leaky_relu(&self, slope: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&x| if x > 0.0 { x } else { slope * x })
                .collect(),
        }
    }

    /// Gaussian matrix, entries i.i.d. N(0, std^2), deterministic given rng state.
    pub fn randn(rng: &mut Rng, rows: usize, cols: usize, std: f64) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for x in m.data.iter_mut() {
            *x = rng.normal() * std;
        }
        m
    }

    /// Count of singular values above rel_tol * sigma_max, computed through a
    /// Jacobi eigendecomposition of the smaller Gram matrix.
    pub fn numerical_rank(&self, rel_tol: f64) -> Result<usize> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::shape("numerical_rank of empty matrix".to_string()));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::param(format!("rel_tol {rel_tol} must be in (0,1)")));
        }
        // Gram matrix on the smaller side: A^T A or A A^T.
        let gram = if self.cols <= self.rows {
            self.transpose().matmul(self)?
        } else {
            self.matmul(&self.transpose())?
        };
        let eigs = symmetric_eigenvalues(&gram);
        let lam_max = eigs.iter().copied().fold(0.0_f64, f64::max);
        // Forming the Gram matrix perturbs zero eigenvalues by O(eps * lam_max);
        // floor anything at that noise level before taking square roots.
        let floor = gram.rows() as f64 * f64::EPSILON * lam_max;
        let sigma: Vec<f64> = eigs
            .iter()
            .map(|&l| if l <= floor { 0.0 } else { l.sqrt() })
            .collect();
        let sigma_max = sigma.iter().copied().fold(0.0_f64, f64::max);
        Ok(sigma.iter().filter(|&&s| s > rel_tol * sigma_max).count())
    }

    pub fn max_abs_diff(&self, b: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (b.rows, b.cols));
        self.data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
/// Desk-scale only; panics are avoided by bounding the sweep count.
fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.at(i, j) * m.at(i, j);
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&m)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.at(p, p);
                let aqq = m.at(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q.
                for k in 0..n {
                    let mkp = m.at(k, p);
                    let mkq = m.at(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.at(p, k);
                    let mqk = m.at(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
            }
        }
    }
    (0..n).map(|i| m.at(i, i)).collect()
}

fn frobenius(m: &Mat) -> f64 {
    m.data().iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Deterministic seeded generator (SplitMix64 stream) with Box-Muller
/// normals. No OS entropy; identical seeds give identical sequences.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
    cached_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            state: seed,
            cached_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        // SplitMix64 step.
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1], keeps ln finite
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Unbiased integer in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let limit = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < limit {
                return (v % n) as usize;
            }
        }
    }

    /// Bernoulli draw with probability p.
    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Derives an independent child stream.
    pub fn split(&mut self) -> Rng {
        Rng::new(self.next_u64())
    }

    /// First k indices of a Fisher-Yates shuffle of 0..n (sample without
    /// replacement).
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        let n = items.len();
        for i in 0..n.saturating_sub(1) {
            let j = i + self.below(n - i);
            items.swap(i, j);
        }
    }
}
