use std::path::Path;

use super::{DataError, LabeledDataset};

/// Big-endian magic of an unsigned-byte 3-D array (images).
pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
/// Big-endian magic of an unsigned-byte 1-D array (labels).
pub const IDX_LABEL_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32, DataError> {
    let chunk = bytes.get(offset..offset + 4).ok_or(DataError::Truncated {
        expected: offset + 4,
        found: bytes.len(),
    })?;
    Ok(u32::from_be_bytes(chunk.try_into().expect("four bytes")))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<(), DataError> {
    let found = read_u32(bytes, 0)?;
    if found != expected {
        return Err(DataError::WrongMagic { expected, found });
    }
    Ok(())
}

/// Returns `(count, rows, cols, pixels)` with pixels scaled by `1/255`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, Vec<f64>), DataError> {
    check_magic(bytes, IDX_IMAGE_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() < expected {
        return Err(DataError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    let pixels = bytes[16..expected]
        .iter()
        .map(|&b| b as f64 / 255.0)
        .collect();
    Ok((count, rows, cols, pixels))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<usize>, DataError> {
    check_magic(bytes, IDX_LABEL_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(DataError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    Ok(bytes[8..expected].iter().map(|&b| b as usize).collect())
}

fn read(path: &Path) -> Result<Vec<u8>, DataError> {
    std::fs::read(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Loads an image/label IDX pair; images are flattened row-major.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<LabeledDataset, DataError> {
    let (count, rows, cols, pixels) = parse_idx_images(&read(images_path)?)?;
    let labels = parse_idx_labels(&read(labels_path)?)?;
    if labels.len() != count {
        return Err(DataError::CountMismatch {
            images: count,
            labels: labels.len(),
        });
    }
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    LabeledDataset::new(
        pixels,
        rows * cols,
        labels,
        num_classes,
        images_path.display().to_string(),
    )
}

/// Writes `dataset` as an IDX pair with `rows × cols` images. Features are
/// stored as `round(255·x)`, so datasets loaded from IDX round-trip exactly.
pub fn write_idx(
    dataset: &LabeledDataset,
    rows: usize,
    cols: usize,
    images_path: &Path,
    labels_path: &Path,
) -> Result<(), DataError> {
    if rows * cols != dataset.feature_dim {
        return Err(DataError::Invalid(format!(
            "{rows}×{cols} images do not match feature width {}",
            dataset.feature_dim
        )));
    }
    if let Some(&l) = dataset.labels.iter().find(|&&l| l > 255) {
        return Err(DataError::Invalid(format!(
            "label {l} does not fit in a byte"
        )));
    }
    let n = dataset.len() as u32;
    let mut img = Vec::with_capacity(16 + dataset.features.len());
    for v in [IDX_IMAGE_MAGIC, n, rows as u32, cols as u32] {
        img.extend_from_slice(&v.to_be_bytes());
    }
    img.extend(
        dataset
            .features
            .iter()
            .map(|&x| (x.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    let mut lab = Vec::with_capacity(8 + dataset.len());
    for v in [IDX_LABEL_MAGIC, n] {
        lab.extend_from_slice(&v.to_be_bytes());
    }
    lab.extend(dataset.labels.iter().map(|&l| l as u8));
    for (path, bytes) in [(images_path, img), (labels_path, lab)] {
        std::fs::write(path, bytes).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}
