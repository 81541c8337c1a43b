//! Dataset acquisition: IDX image files, numeric CSV, binary label
//! filtering, seeded subsampling and synthetic generators.
//!
//! All random draws go through a seeded PCG-64 stream, so every dataset is
//! reproducible from its recorded seed within this implementation.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_pcg::Pcg64;
use std::io::Read;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad IDX magic in {path}: expected two zero bytes, got {b0:#04x} {b1:#04x}")]
    BadMagic { path: String, b0: u8, b1: u8 },
    #[error("unsupported IDX type byte {found:#04x} in {path}: only 0x08 (unsigned byte) is supported")]
    BadTypeByte { path: String, found: u8 },
    #[error("IDX file {path} is truncated: expected {expected} data bytes, found {found}")]
    Truncated {
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("IDX file {path} declares an empty dataset (a dimension is 0)")]
    EmptyDataset { path: String },
    #[error("IDX image file has {images} items but label file has {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("IDX image file {path} must have 3 dimensions (count, rows, cols), got {dims}")]
    BadImageDims { path: String, dims: usize },
    #[error("IDX label file {path} must have 1 dimension, got {dims}")]
    BadLabelDims { path: String, dims: usize },
    #[error("CSV {path} row {row} has {got} fields, expected {expected}")]
    RaggedRow {
        path: String,
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("CSV {path} row {row}, column {col}: cannot parse {value:?} as a number")]
    BadNumber {
        path: String,
        row: usize,
        col: usize,
        value: String,
    },
    #[error("CSV {path} contains no data rows")]
    EmptyCsv { path: String },
    #[error("class {0} is not present in the dataset labels")]
    ClassAbsent(f64),
    #[error("binary filter classes must differ, both are {0}")]
    IdenticalClasses(f64),
    #[error("subsample size {requested} exceeds dataset size {available}")]
    SubsampleTooLarge { requested: usize, available: usize },
    #[error("subsample size must be at least 1")]
    EmptySubsample,
    #[error("uniform range is empty: low {low} >= high {high}")]
    EmptyRange { low: f64, high: f64 },
    #[error("dataset contains a non-finite feature at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

/// An in-memory dataset: `n x p` features plus optional labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Array2<f64>,
    /// Empty when the source carries no labels.
    pub labels: Vec<f64>,
    pub name: String,
    pub seed_used: u64,
    /// `(rows, cols)` of the source images when loaded from IDX.
    pub image_shape: Option<(usize, usize)>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    fn check_finite(self) -> Result<Self, DataError> {
        for ((row, col), &v) in self.features.indexed_iter() {
            if !v.is_finite() {
                return Err(DataError::NonFinite { row, col });
            }
        }
        Ok(self)
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, DataError> {
    let mut buf = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
    Ok(buf)
}

struct IdxPayload {
    dims: Vec<usize>,
    data: Vec<u8>,
}

/// Parses the IDX header (two zero bytes, type byte 0x08, dimension count,
/// then big-endian u32 dimension sizes) and returns the raw payload.
fn parse_idx(path: &Path) -> Result<IdxPayload, DataError> {
    let name = path.display().to_string();
    let bytes = read_file(path)?;
    if bytes.len() < 4 {
        return Err(DataError::Truncated {
            path: name,
            expected: 4,
            found: bytes.len(),
        });
    }
    if bytes[0] != 0 || bytes[1] != 0 {
        return Err(DataError::BadMagic {
            path: name,
            b0: bytes[0],
            b1: bytes[1],
        });
    }
    if bytes[2] != 0x08 {
        return Err(DataError::BadTypeByte {
            path: name,
            found: bytes[2],
        });
    }
    let ndims = bytes[3] as usize;
    let header_len = 4 + 4 * ndims;
    if bytes.len() < header_len {
        return Err(DataError::Truncated {
            path: name,
            expected: header_len,
            found: bytes.len(),
        });
    }
    let mut dims = Vec::with_capacity(ndims);
    for d in 0..ndims {
        let off = 4 + 4 * d;
        let size = u32::from_be_bytes([
            bytes[off],
            bytes[off + 1],
            bytes[off + 2],
            bytes[off + 3],
        ]) as usize;
        if size == 0 {
            return Err(DataError::EmptyDataset { path: name });
        }
        dims.push(size);
    }
    let expected: usize = dims.iter().product();
    let data = bytes[header_len..].to_vec();
    if data.len() != expected {
        return Err(DataError::Truncated {
            path: name,
            expected: header_len + expected,
            found: bytes.len(),
        });
    }
    Ok(IdxPayload { dims, data })
}

/// Loads an IDX image/label pair. Pixels are flattened row-major to
/// `n x (rows * cols)` and divided by 255 unless `scale_pixels` is false.
pub fn load_idx_with_options(
    images_path: &Path,
    labels_path: &Path,
    scale_pixels: bool,
) -> Result<Dataset, DataError> {
    let images = parse_idx(images_path)?;
    if images.dims.len() != 3 {
        return Err(DataError::BadImageDims {
            path: images_path.display().to_string(),
            dims: images.dims.len(),
        });
    }
    let labels = parse_idx(labels_path)?;
    if labels.dims.len() != 1 {
        return Err(DataError::BadLabelDims {
            path: labels_path.display().to_string(),
            dims: labels.dims.len(),
        });
    }
    let (n, rows, cols) = (images.dims[0], images.dims[1], images.dims[2]);
    if labels.dims[0] != n {
        return Err(DataError::CountMismatch {
            images: n,
            labels: labels.dims[0],
        });
    }
    let divisor = if scale_pixels { 255.0 } else { 1.0 };
    let features = Array2::from_shape_fn((n, rows * cols), |(i, j)| {
        images.data[i * rows * cols + j] as f64 / divisor
    });
    let label_values = labels.data.iter().map(|&b| b as f64).collect();
    Dataset {
        features,
        labels: label_values,
        name: images_path.display().to_string(),
        seed_used: 0,
        image_shape: Some((rows, cols)),
    }
    .check_finite()
}

/// Loads an IDX image/label pair with pixels scaled to `[0, 1]`.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset, DataError> {
    load_idx_with_options(images_path, labels_path, true)
}

/// Serializes images back to IDX bytes (3-dimensional, unsigned byte).
/// Pixel values are expected in `[0, 1]` and are mapped back through 255.
pub fn write_idx_images(ds: &Dataset) -> Vec<u8> {
    let (rows, cols) = ds
        .image_shape
        .unwrap_or((1, ds.dim()));
    let n = ds.len();
    let mut out = vec![0u8, 0, 0x08, 3];
    out.extend((n as u32).to_be_bytes());
    out.extend((rows as u32).to_be_bytes());
    out.extend((cols as u32).to_be_bytes());
    for &v in ds.features.iter() {
        out.push((v * 255.0).round() as u8);
    }
    out
}

/// Serializes labels back to IDX bytes (1-dimensional, unsigned byte).
pub fn write_idx_labels(ds: &Dataset) -> Vec<u8> {
    let mut out = vec![0u8, 0, 0x08, 1];
    out.extend((ds.len() as u32).to_be_bytes());
    for &v in &ds.labels {
        out.push(v as u8);
    }
    out
}

/// Loads a rectangular numeric CSV. With `has_label_column` the last column
/// becomes the labels; `skip_header` drops the first row.
pub fn load_csv_with_options(
    path: &Path,
    has_label_column: bool,
    skip_header: bool,
) -> Result<Dataset, DataError> {
    let name = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(skip_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| DataError::Io {
            path: name.clone(),
            source: std::io::Error::other(e),
        })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError::Io {
            path: name.clone(),
            source: std::io::Error::other(e),
        })?;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(DataError::RaggedRow {
                path: name,
                row: row_idx,
                got: record.len(),
                expected,
            });
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| DataError::BadNumber {
                path: name.clone(),
                row: row_idx,
                col,
                value: field.to_string(),
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DataError::EmptyCsv { path: name });
    }
    let total_cols = rows[0].len();
    let feature_cols = if has_label_column {
        total_cols - 1
    } else {
        total_cols
    };
    let n = rows.len();
    let features = Array2::from_shape_fn((n, feature_cols), |(i, j)| rows[i][j]);
    let labels = if has_label_column {
        rows.iter().map(|r| r[feature_cols]).collect()
    } else {
        Vec::new()
    };
    Dataset {
        features,
        labels,
        name,
        seed_used: 0,
        image_shape: None,
    }
    .check_finite()
}

pub fn load_csv(path: &Path, has_label_column: bool) -> Result<Dataset, DataError> {
    load_csv_with_options(path, has_label_column, false)
}

/// Keeps rows labeled `class_a` or `class_b`, mapping them to -1 and +1.
/// Row order is preserved.
pub fn filter_binary(ds: &Dataset, class_a: f64, class_b: f64) -> Result<Dataset, DataError> {
    if class_a == class_b {
        return Err(DataError::IdenticalClasses(class_a));
    }
    if !ds.labels.iter().any(|&l| l == class_a) {
        return Err(DataError::ClassAbsent(class_a));
    }
    if !ds.labels.iter().any(|&l| l == class_b) {
        return Err(DataError::ClassAbsent(class_b));
    }
    let keep: Vec<usize> = ds
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == class_a || l == class_b)
        .map(|(i, _)| i)
        .collect();
    let features = Array2::from_shape_fn((keep.len(), ds.dim()), |(i, j)| {
        ds.features[[keep[i], j]]
    });
    let labels = keep
        .iter()
        .map(|&i| if ds.labels[i] == class_a { -1.0 } else { 1.0 })
        .collect();
    Ok(Dataset {
        features,
        labels,
        name: ds.name.clone(),
        seed_used: ds.seed_used,
        image_shape: ds.image_shape,
    })
}

/// Deterministic seeded sample of `n` rows without replacement. Kept and
/// held-out indices are both returned in ascending order, so sampling all
/// rows is the identity split.
pub fn subsample(
    ds: &Dataset,
    n: usize,
    seed: u64,
) -> Result<(Dataset, Vec<usize>, Vec<usize>), DataError> {
    let total = ds.len();
    if n == 0 {
        return Err(DataError::EmptySubsample);
    }
    if n > total {
        return Err(DataError::SubsampleTooLarge {
            requested: n,
            available: total,
        });
    }
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut kept = rand::seq::index::sample(&mut rng, total, n).into_vec();
    kept.sort_unstable();
    let mut in_sample = vec![false; total];
    for &i in &kept {
        in_sample[i] = true;
    }
    let held_out: Vec<usize> = (0..total).filter(|&i| !in_sample[i]).collect();
    let features = Array2::from_shape_fn((n, ds.dim()), |(i, j)| ds.features[[kept[i], j]]);
    let labels = if ds.labels.is_empty() {
        Vec::new()
    } else {
        kept.iter().map(|&i| ds.labels[i]).collect()
    };
    Ok((
        Dataset {
            features,
            labels,
            name: ds.name.clone(),
            seed_used: seed,
            image_shape: ds.image_shape,
        },
        kept,
        held_out,
    ))
}

/// `n` scalar features drawn i.i.d. uniform from `(low, high)`.
pub fn synth_uniform(n: usize, low: f64, high: f64, seed: u64) -> Result<Dataset, DataError> {
    if low >= high {
        return Err(DataError::EmptyRange { low, high });
    }
    let mut rng = Pcg64::seed_from_u64(seed);
    let features = Array2::from_shape_fn((n, 1), |_| rng.gen_range(low..high));
    Ok(Dataset {
        features,
        labels: Vec::new(),
        name: format!("synth-uniform({low},{high})"),
        seed_used: seed,
        image_shape: None,
    })
}

/// `n x p` standard normal features.
pub fn synth_gaussian(n: usize, p: usize, seed: u64) -> Dataset {
    let mut rng = Pcg64::seed_from_u64(seed);
    let features = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
    Dataset {
        features,
        labels: Vec::new(),
        name: format!("synth-gaussian({n}x{p})"),
        seed_used: seed,
        image_shape: None,
    }
}

/// Deterministic two-class synthetic image set used as the bundled fixture
/// when no real image data is available.
///
/// Each image mixes a class-specific blob (top-left vs bottom-right) with a
/// per-image random smooth field (a handful of Gaussian bumps) and a touch
/// of pixel noise, clamped to `[0, 1]` on a `side x side` grid. The smooth
/// fields give the Gram matrix a gradually decaying spectrum, so eigenvector
/// targets remain meaningful well past the leading ranks. Labels alternate
/// between `class_a_label` and `class_b_label` so any contiguous split
/// contains both classes.
pub fn synth_binary_images(
    n: usize,
    side: usize,
    class_a_label: f64,
    class_b_label: f64,
    seed: u64,
) -> Dataset {
    let mut rng = Pcg64::seed_from_u64(seed);
    let p = side * side;
    let bump = |cx: f64, cy: f64, width: f64, r: usize, c: usize| -> f64 {
        let dr = r as f64 / side as f64 - cx;
        let dc = c as f64 / side as f64 - cy;
        (-(dr * dr + dc * dc) / (2.0 * width * width)).exp()
    };
    let mut features = Array2::<f64>::zeros((n, p));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let is_a = i % 2 == 0;
        let (cx, cy) = if is_a { (0.3, 0.3) } else { (0.7, 0.7) };
        labels.push(if is_a { class_a_label } else { class_b_label });
        let bumps: Vec<(f64, f64, f64, f64)> = (0..6)
            .map(|_| {
                let bx = rng.gen_range(0.0..1.0);
                let by = rng.gen_range(0.0..1.0);
                let amp = rng.gen_range(-1.0..1.0);
                let width = rng.gen_range(0.08..0.25);
                (bx, by, amp, width)
            })
            .collect();
        for r in 0..side {
            for c in 0..side {
                let class_part = bump(cx, cy, 0.15, r, c);
                let field: f64 = bumps
                    .iter()
                    .map(|&(bx, by, amp, width)| amp * bump(bx, by, width, r, c))
                    .sum();
                let noise: f64 = rng.gen_range(-0.01..0.01);
                let v: f64 = 0.35 + 0.45 * class_part + 0.25 * field + noise;
                features[[i, r * side + c]] = v.clamp(0.0, 1.0);
            }
        }
    }
    Dataset {
        features,
        labels,
        name: format!("synth-binary-images({n}x{side}x{side})"),
        seed_used: seed,
        image_shape: Some((side, side)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sym_eig, SymMatrix, DEFAULT_RANK_TOL};
    use std::io::Write;
    use tempfile::TempDir;

    fn write_temp(dir: &TempDir, name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(bytes).unwrap();
        path
    }

    /// 2 images of 2x2 pixels: 0, 255, 128, 64 / 255, 0, 0, 255.
    fn fixture_idx() -> (Vec<u8>, Vec<u8>) {
        let mut images = vec![0u8, 0, 0x08, 3];
        images.extend(2u32.to_be_bytes());
        images.extend(2u32.to_be_bytes());
        images.extend(2u32.to_be_bytes());
        images.extend([0, 255, 128, 64, 255, 0, 0, 255]);
        let mut labels = vec![0u8, 0, 0x08, 1];
        labels.extend(2u32.to_be_bytes());
        labels.extend([4, 9]);
        (images, labels)
    }

    #[test]
    fn idx_round_trip_and_values() {
        let dir = TempDir::new().unwrap();
        let (images, labels) = fixture_idx();
        let ipath = write_temp(&dir, "img.idx", &images);
        let lpath = write_temp(&dir, "lbl.idx", &labels);
        let ds = load_idx(&ipath, &lpath).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 4);
        assert_eq!(ds.features[[0, 0]], 0.0);
        assert_eq!(ds.features[[0, 1]], 1.0);
        assert_eq!(ds.features[[0, 2]], 128.0 / 255.0);
        assert_eq!(ds.labels, vec![4.0, 9.0]);
        // Byte-identical round trip through the serializer.
        assert_eq!(write_idx_images(&ds), images);
        assert_eq!(write_idx_labels(&ds), labels);
    }

    #[test]
    fn idx_rejects_bad_magic_and_type() {
        let dir = TempDir::new().unwrap();
        let (mut images, labels) = fixture_idx();
        images[0] = 1;
        let ipath = write_temp(&dir, "bad.idx", &images);
        let lpath = write_temp(&dir, "lbl.idx", &labels);
        assert!(matches!(
            load_idx(&ipath, &lpath),
            Err(DataError::BadMagic { .. })
        ));

        let (mut images, _) = fixture_idx();
        images[2] = 0x0D; // float type
        let ipath = write_temp(&dir, "badtype.idx", &images);
        assert!(matches!(
            load_idx(&ipath, &lpath),
            Err(DataError::BadTypeByte { found: 0x0D, .. })
        ));
    }

    #[test]
    fn idx_rejects_zero_dimension() {
        let dir = TempDir::new().unwrap();
        let mut images = vec![0u8, 0, 0x08, 3];
        images.extend(0u32.to_be_bytes());
        images.extend(2u32.to_be_bytes());
        images.extend(2u32.to_be_bytes());
        let (_, labels) = fixture_idx();
        let ipath = write_temp(&dir, "empty.idx", &images);
        let lpath = write_temp(&dir, "lbl.idx", &labels);
        assert!(matches!(
            load_idx(&ipath, &lpath),
            Err(DataError::EmptyDataset { .. })
        ));
    }

    #[test]
    fn idx_rejects_count_mismatch() {
        let dir = TempDir::new().unwrap();
        let (images, _) = fixture_idx();
        let mut labels = vec![0u8, 0, 0x08, 1];
        labels.extend(3u32.to_be_bytes());
        labels.extend([4, 9, 4]);
        let ipath = write_temp(&dir, "img.idx", &images);
        let lpath = write_temp(&dir, "lbl3.idx", &labels);
        assert!(matches!(
            load_idx(&ipath, &lpath),
            Err(DataError::CountMismatch {
                images: 2,
                labels: 3
            })
        ));
    }

    #[test]
    fn idx_rejects_truncated_payload() {
        let dir = TempDir::new().unwrap();
        let (mut images, labels) = fixture_idx();
        images.pop();
        let ipath = write_temp(&dir, "trunc.idx", &images);
        let lpath = write_temp(&dir, "lbl.idx", &labels);
        assert!(matches!(
            load_idx(&ipath, &lpath),
            Err(DataError::Truncated { .. })
        ));
    }

    #[test]
    fn csv_loading() {
        let dir = TempDir::new().unwrap();
        let path = write_temp(&dir, "plain.csv", b"1,2\n3,4\n");
        let ds = load_csv(&path, false).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 2);
        assert!(ds.labels.is_empty());

        let path = write_temp(&dir, "labeled.csv", b"1,2,0\n3,4,1\n");
        let ds = load_csv(&path, true).unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.labels, vec![0.0, 1.0]);

        let path = write_temp(&dir, "empty.csv", b"");
        assert!(matches!(
            load_csv(&path, false),
            Err(DataError::EmptyCsv { .. })
        ));

        let path = write_temp(&dir, "ragged.csv", b"1,2\n3\n");
        assert!(matches!(
            load_csv(&path, false),
            Err(DataError::RaggedRow { .. })
        ));

        let path = write_temp(&dir, "alpha.csv", b"1,x\n");
        assert!(matches!(
            load_csv(&path, false),
            Err(DataError::BadNumber { .. })
        ));
    }

    #[test]
    fn binary_filter() {
        let ds = Dataset {
            features: Array2::from_shape_fn((4, 2), |(i, j)| (i * 2 + j) as f64),
            labels: vec![4.0, 9.0, 7.0, 4.0],
            name: "t".into(),
            seed_used: 0,
            image_shape: None,
        };
        let filtered = filter_binary(&ds, 4.0, 9.0).unwrap();
        assert_eq!(filtered.labels, vec![-1.0, 1.0, -1.0]);
        assert_eq!(filtered.features[[2, 0]], 6.0);

        assert!(matches!(
            filter_binary(&ds, 4.0, 4.0),
            Err(DataError::IdenticalClasses(_))
        ));
        assert!(matches!(
            filter_binary(&ds, 4.0, 5.0),
            Err(DataError::ClassAbsent(_))
        ));

        // All rows already binary: size unchanged.
        let all = filter_binary(&filtered_to_raw(&filtered), -1.0, 1.0).unwrap();
        assert_eq!(all.len(), 3);
    }

    fn filtered_to_raw(ds: &Dataset) -> Dataset {
        ds.clone()
    }

    #[test]
    fn subsample_behaviour() {
        let ds = synth_gaussian(30, 2, 5);
        let (sub, kept, held) = subsample(&ds, 30, 1).unwrap();
        assert_eq!(kept, (0..30).collect::<Vec<_>>());
        assert!(held.is_empty());
        assert_eq!(sub.features, ds.features);

        let (_, kept_a, held_a) = subsample(&ds, 10, 7).unwrap();
        let (_, kept_b, _) = subsample(&ds, 10, 7).unwrap();
        assert_eq!(kept_a, kept_b);
        assert_eq!(kept_a.len(), 10);
        assert_eq!(held_a.len(), 20);
        for w in kept_a.windows(2) {
            assert!(w[0] < w[1]);
        }

        let (_, kept_c, _) = subsample(&ds, 10, 8).unwrap();
        assert_ne!(kept_a, kept_c);

        assert!(matches!(
            subsample(&ds, 31, 1),
            Err(DataError::SubsampleTooLarge { .. })
        ));
    }

    #[test]
    fn filter_and_subsample_commute_on_multisets() {
        let ds = Dataset {
            features: Array2::from_shape_fn((12, 1), |(i, _)| i as f64),
            labels: vec![4.0, 9.0, 4.0, 9.0, 4.0, 9.0, 4.0, 9.0, 4.0, 9.0, 4.0, 9.0],
            name: "t".into(),
            seed_used: 0,
            image_shape: None,
        };
        // Filter keeps everything here, so filtering first and subsampling
        // with an aligned seed yields the same multiset of rows.
        let filtered = filter_binary(&ds, 4.0, 9.0).unwrap();
        let (a, _, _) = subsample(&filtered, 6, 3).unwrap();
        let (pre, kept, _) = subsample(&ds, 6, 3).unwrap();
        let b = filter_binary(&pre, 4.0, 9.0).unwrap();
        let mut rows_a: Vec<f64> = a.features.column(0).to_vec();
        let mut rows_b: Vec<f64> = b.features.column(0).to_vec();
        rows_a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        rows_b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(rows_a, rows_b);
        assert_eq!(kept.len(), 6);
    }

    #[test]
    fn uniform_generator() {
        let ds = synth_uniform(1000, -3.0, 3.0, 11).unwrap();
        assert!(ds.features.iter().all(|&v| v > -3.0 && v < 3.0));
        let again = synth_uniform(1000, -3.0, 3.0, 11).unwrap();
        assert_eq!(ds.features, again.features);
        // CLT: mean within 5 sigma of 0 (sigma = sqrt(3) / sqrt(1000)).
        let mean = ds.features.iter().sum::<f64>() / 1000.0;
        assert!(mean.abs() < 0.3, "mean {mean}");
        assert!(matches!(
            synth_uniform(5, 2.0, 2.0, 1),
            Err(DataError::EmptyRange { .. })
        ));
    }

    #[test]
    fn gaussian_generator() {
        let ds = synth_gaussian(100, 80, 13);
        let again = synth_gaussian(100, 80, 13);
        assert_eq!(ds.features, again.features);
        let total = (100 * 80) as f64;
        let mean = ds.features.iter().sum::<f64>() / total;
        assert!(mean.abs() <= 5.0 / total.sqrt(), "mean {mean}");
    }

    #[test]
    fn gaussian_gram_is_full_rank_when_overparameterized() {
        let ds = synth_gaussian(100, 800, 17);
        let gram = ds.features.dot(&ds.features.t());
        let eig = sym_eig(&SymMatrix::new(gram).unwrap(), DEFAULT_RANK_TOL).unwrap();
        assert!(eig.is_full_rank());
    }

    #[test]
    fn binary_images_fixture_is_deterministic_and_bounded() {
        let a = synth_binary_images(20, 8, 4.0, 9.0, 3);
        let b = synth_binary_images(20, 8, 4.0, 9.0, 3);
        assert_eq!(a.features, b.features);
        assert!(a.features.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(a.labels.iter().filter(|&&l| l == 4.0).count(), 10);
    }
}
