//! GNN parameter container, seeded initialization and the versioned
//! binary weight file (magic bytes, shape table, little-endian f32).

use std::io::{Read, Write};
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::GnnError;

pub const INPUT_DIM: usize = crate::embedding::DIM;
pub const HIDDEN_DIM: usize = 64;
pub const NUM_HEADS: usize = 4;
pub const NUM_LAYERS: usize = 3;
/// Width of h^(0) and of every concatenated layer output.
pub const NODE_DIM: usize = HIDDEN_DIM * NUM_HEADS;
/// Final layer averages its heads instead of concatenating.
pub const OUTPUT_DIM: usize = HIDDEN_DIM;
pub const NUM_RELATIONS: usize = 5;

const MAGIC: &[u8; 4] = b"NSGW";
const VERSION: u32 = 1;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m.data[i * cols + i] = 1.0;
        }
        m
    }

    pub fn xavier(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound);
        let data = (0..rows * cols).map(|_| dist.sample(rng) as f32).collect();
        Matrix { rows, cols, data }
    }

    pub fn matvec(&self, v: &[f32]) -> Vec<f32> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        let mut out = vec![0.0f32; self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *slot = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }
}

/// One attention head: shared linear map plus the split attention vector
/// scoring `a_src · (W h_i) + a_dst · (W h_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadWeights {
    pub w: Matrix,
    pub a_src: Vec<f32>,
    pub a_dst: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    pub heads: Vec<HeadWeights>,
}

/// All inference parameters: input projection, 3 layers × 4 heads of
/// attention, and the 5-way edge classifier over concatenated pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GnnWeights {
    pub w_input: Matrix,
    pub b_input: Vec<f32>,
    pub layers: Vec<LayerWeights>,
    pub w_edge: Matrix,
    pub b_edge: Vec<f32>,
}

impl GnnWeights {
    /// Xavier-style uniform initialization from a fixed seed.
    pub fn seeded(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w_input = Matrix::xavier(NODE_DIM, INPUT_DIM, &mut rng);
        let b_input = vec![0.0; NODE_DIM];
        let mut layers = Vec::with_capacity(NUM_LAYERS);
        for layer in 0..NUM_LAYERS {
            let in_dim = layer_input_dim(layer);
            let mut heads = Vec::with_capacity(NUM_HEADS);
            for _ in 0..NUM_HEADS {
                let w = Matrix::xavier(HIDDEN_DIM, in_dim, &mut rng);
                let a = Matrix::xavier(2, HIDDEN_DIM, &mut rng);
                heads.push(HeadWeights {
                    w,
                    a_src: a.data[..HIDDEN_DIM].to_vec(),
                    a_dst: a.data[HIDDEN_DIM..].to_vec(),
                });
            }
            layers.push(LayerWeights { heads });
        }
        let w_edge = Matrix::xavier(NUM_RELATIONS, 2 * OUTPUT_DIM, &mut rng);
        let b_edge = vec![0.0; NUM_RELATIONS];
        GnnWeights { w_input, b_input, layers, w_edge, b_edge }
    }

    pub fn validate(&self) -> Result<(), GnnError> {
        let check = |name: &str, ok: bool| -> Result<(), GnnError> {
            if ok {
                Ok(())
            } else {
                Err(GnnError::ShapeMismatch { what: name.to_string() })
            }
        };
        check("w_input", self.w_input.rows == NODE_DIM && self.w_input.cols == INPUT_DIM)?;
        check("b_input", self.b_input.len() == NODE_DIM)?;
        check("layers", self.layers.len() == NUM_LAYERS)?;
        for (l, layer) in self.layers.iter().enumerate() {
            check("heads", layer.heads.len() == NUM_HEADS)?;
            for head in &layer.heads {
                check(
                    "head.w",
                    head.w.rows == HIDDEN_DIM && head.w.cols == layer_input_dim(l),
                )?;
                check("head.a_src", head.a_src.len() == HIDDEN_DIM)?;
                check("head.a_dst", head.a_dst.len() == HIDDEN_DIM)?;
            }
        }
        check(
            "w_edge",
            self.w_edge.rows == NUM_RELATIONS && self.w_edge.cols == 2 * OUTPUT_DIM,
        )?;
        check("b_edge", self.b_edge.len() == NUM_RELATIONS)?;

        let all_finite = self.tensors().iter().all(|(_, _, data)| {
            data.iter().all(|v| v.is_finite())
        });
        if !all_finite {
            return Err(GnnError::Format("weights contain non-finite values".into()));
        }
        Ok(())
    }

    /// Named tensor table in file order.
    fn tensors(&self) -> Vec<(String, Vec<u32>, &[f32])> {
        let mut out: Vec<(String, Vec<u32>, &[f32])> = vec![
            (
                "w_input".into(),
                vec![self.w_input.rows as u32, self.w_input.cols as u32],
                &self.w_input.data,
            ),
            ("b_input".into(), vec![self.b_input.len() as u32], &self.b_input),
        ];
        for (l, layer) in self.layers.iter().enumerate() {
            for (h, head) in layer.heads.iter().enumerate() {
                out.push((
                    format!("layer{l}.head{h}.w"),
                    vec![head.w.rows as u32, head.w.cols as u32],
                    &head.w.data,
                ));
                out.push((
                    format!("layer{l}.head{h}.a_src"),
                    vec![head.a_src.len() as u32],
                    &head.a_src,
                ));
                out.push((
                    format!("layer{l}.head{h}.a_dst"),
                    vec![head.a_dst.len() as u32],
                    &head.a_dst,
                ));
            }
        }
        out.push((
            "w_edge".into(),
            vec![self.w_edge.rows as u32, self.w_edge.cols as u32],
            &self.w_edge.data,
        ));
        out.push(("b_edge".into(), vec![self.b_edge.len() as u32], &self.b_edge));
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), GnnError> {
        self.validate()?;
        let mut out: Vec<u8> = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        let tensors = self.tensors();
        out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
        for (name, dims, _) in &tensors {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
            for d in dims {
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
        for (_, _, data) in &tensors {
            for v in *data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        std::fs::File::create(path)?.write_all(&out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, GnnError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut cursor = 0usize;

        let take = |cursor: &mut usize, n: usize| -> Result<&[u8], GnnError> {
            let end = *cursor + n;
            let slice = bytes.get(*cursor..end).ok_or_else(|| {
                GnnError::Format("truncated weight file".into())
            })?;
            *cursor = end;
            Ok(slice)
        };
        let take_u32 = |cursor: &mut usize| -> Result<u32, GnnError> {
            let b = take(cursor, 4)?;
            Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        };

        if take(&mut cursor, 4)? != MAGIC {
            return Err(GnnError::Format("bad magic bytes".into()));
        }
        let version = take_u32(&mut cursor)?;
        if version != VERSION {
            return Err(GnnError::Format(format!("unsupported weight file version {version}")));
        }
        let count = take_u32(&mut cursor)? as usize;
        let mut shapes = Vec::with_capacity(count);
        for _ in 0..count {
            let name_len = take_u32(&mut cursor)? as usize;
            let name = String::from_utf8(take(&mut cursor, name_len)?.to_vec())
                .map_err(|_| GnnError::Format("tensor name is not utf-8".into()))?;
            let ndim = take_u32(&mut cursor)? as usize;
            let mut dims = Vec::with_capacity(ndim);
            for _ in 0..ndim {
                dims.push(take_u32(&mut cursor)? as usize);
            }
            shapes.push((name, dims));
        }
        let mut tensors: std::collections::HashMap<String, (Vec<usize>, Vec<f32>)> =
            std::collections::HashMap::new();
        for (name, dims) in shapes {
            let len: usize = dims.iter().product();
            let raw = take(&mut cursor, len * 4)?;
            let data: Vec<f32> = raw
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            tensors.insert(name, (dims, data));
        }

        type Table = std::collections::HashMap<String, (Vec<usize>, Vec<f32>)>;
        fn matrix(tensors: &mut Table, name: &str) -> Result<Matrix, GnnError> {
            let (dims, data) = tensors
                .remove(name)
                .ok_or_else(|| GnnError::Format(format!("missing tensor {name}")))?;
            if dims.len() != 2 {
                return Err(GnnError::ShapeMismatch { what: name.to_string() });
            }
            Ok(Matrix { rows: dims[0], cols: dims[1], data })
        }
        fn vector(tensors: &mut Table, name: &str) -> Result<Vec<f32>, GnnError> {
            let (dims, data) = tensors
                .remove(name)
                .ok_or_else(|| GnnError::Format(format!("missing tensor {name}")))?;
            if dims.len() != 1 {
                return Err(GnnError::ShapeMismatch { what: name.to_string() });
            }
            Ok(data)
        }

        let w_input = matrix(&mut tensors, "w_input")?;
        let b_input = vector(&mut tensors, "b_input")?;
        let mut layers = Vec::with_capacity(NUM_LAYERS);
        for l in 0..NUM_LAYERS {
            let mut heads = Vec::with_capacity(NUM_HEADS);
            for h in 0..NUM_HEADS {
                heads.push(HeadWeights {
                    w: matrix(&mut tensors, &format!("layer{l}.head{h}.w"))?,
                    a_src: vector(&mut tensors, &format!("layer{l}.head{h}.a_src"))?,
                    a_dst: vector(&mut tensors, &format!("layer{l}.head{h}.a_dst"))?,
                });
            }
            layers.push(LayerWeights { heads });
        }
        let weights = GnnWeights {
            w_input,
            b_input,
            layers,
            w_edge: matrix(&mut tensors, "w_edge")?,
            b_edge: vector(&mut tensors, "b_edge")?,
        };
        weights.validate()?;
        Ok(weights)
    }
}

/// Every layer consumes NODE_DIM features: h^(0) is projected to that
/// width and the two concatenating layers preserve it.
pub(crate) fn layer_input_dim(_layer: usize) -> usize {
    NODE_DIM
}
