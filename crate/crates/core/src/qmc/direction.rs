//! Sobol' direction numbers in the Joe–Kuo text format.

use crate::error::{Error, Result};

/// Number of binary digits carried by every coordinate word.
pub const DIGIT_WIDTH: u32 = 53;

/// Joe–Kuo (new-joe-kuo-6.21201) records for dimensions 2..=16.
pub const EMBEDDED_JOE_KUO: &str = "d       s       a       m_i
2       1       0       1
3       2       1       1 3
4       3       1       1 3 1
5       3       2       1 1 1
6       4       1       1 1 3 3
7       4       4       1 3 5 13
8       5       2       1 1 5 5 17
9       5       4       1 1 5 5 5
10      5       7       1 1 7 11 19
11      5       11      1 1 5 1 1
12      5       13      1 1 1 3 11
13      5       14      1 3 5 5 31
14      6       1       1 3 3 9 7 49
15      6       13      1 1 1 15 21 21
16      6       16      1 3 1 13 27 49
";

/// Maximum dimension available without loading an external file.
pub const EMBEDDED_DIMS: usize = 16;

/// Primitive polynomial and initial direction values for one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionRecord {
    pub degree: u32,
    /// Interior coefficients a_1..a_{deg-1} packed with a_1 as the high bit.
    pub coeff: u64,
    /// Odd initial values m_1..m_deg with m_i < 2^i.
    pub initial: Vec<u64>,
}

/// Expanded generator columns for each dimension.
///
/// `columns[j][k]` is the word of v_{j,k+1}: digit `i` of the fraction sits
/// at bit `DIGIT_WIDTH - i`.
#[derive(Clone, Debug)]
pub struct DirectionNumbers {
    records: Vec<Option<DimensionRecord>>,
    columns: Vec<[u64; DIGIT_WIDTH as usize]>,
}

impl DirectionNumbers {
    /// Expanded table for the first `dims` dimensions from the built-in records.
    pub fn embedded(dims: usize) -> Result<Self> {
        load_direction_numbers(EMBEDDED_JOE_KUO, dims)
    }

    pub fn dims(&self) -> usize {
        self.columns.len()
    }

    /// `None` for dimension 0 (van der Corput).
    pub fn record(&self, dim: usize) -> Option<&DimensionRecord> {
        self.records.get(dim).and_then(|r| r.as_ref())
    }

    pub fn columns(&self, dim: usize) -> &[u64; DIGIT_WIDTH as usize] {
        &self.columns[dim]
    }
}

/// Parses a Joe–Kuo file and expands the first `dims` dimensions.
///
/// The first line is a header. Dimension 1 is implicit, so `dims - 1`
/// records are consumed.
pub fn load_direction_numbers(text: &str, dims: usize) -> Result<DirectionNumbers> {
    if dims == 0 {
        return Err(Error::Domain("dimension count must be at least 1".into()));
    }
    let mut records = vec![None];
    let mut columns = vec![van_der_corput_columns()];

    for (idx, line) in text.lines().enumerate().skip(1) {
        if records.len() == dims {
            break;
        }
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_record(line, line_no)?;
        columns.push(expand(&record));
        records.push(Some(record));
    }

    if records.len() < dims {
        return Err(Error::Capacity { requested: dims, available: records.len() });
    }
    Ok(DirectionNumbers { records, columns })
}

fn parse_record(line: &str, line_no: usize) -> Result<DimensionRecord> {
    let parse_err = |msg: String| Error::Parse { line: line_no, msg };
    let fields = line
        .split_whitespace()
        .map(|f| f.parse::<u64>().map_err(|e| parse_err(format!("field {f:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if fields.len() < 3 {
        return Err(parse_err("expected \"d s a m_1 ... m_s\"".into()));
    }
    let degree = fields[1];
    if degree == 0 || degree > DIGIT_WIDTH as u64 {
        return Err(parse_err(format!("degree {degree} out of range")));
    }
    let initial = fields[3..].to_vec();
    if initial.len() as u64 != degree {
        return Err(parse_err(format!(
            "degree {degree} needs {degree} initial values, found {}",
            initial.len()
        )));
    }
    let coeff = fields[2];
    if degree < 64 && coeff >= 1 << (degree - 1) {
        return Err(parse_err(format!("coefficient {coeff} too wide for degree {degree}")));
    }
    for (i, &m) in initial.iter().enumerate() {
        let pos = i as u32 + 1;
        if m % 2 == 0 || m >= 1u64 << pos {
            return Err(Error::Validation(format!(
                "line {line_no}: m_{pos} = {m} must be odd and below 2^{pos}"
            )));
        }
    }
    Ok(DimensionRecord { degree: degree as u32, coeff, initial })
}

fn van_der_corput_columns() -> [u64; DIGIT_WIDTH as usize] {
    let mut cols = [0u64; DIGIT_WIDTH as usize];
    for (k, c) in cols.iter_mut().enumerate() {
        *c = 1u64 << (DIGIT_WIDTH - 1 - k as u32);
    }
    cols
}

/// Runs the Sobol' recurrence
/// m_k = 2a_1 m_{k-1} ^ 4a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}.
fn expand(rec: &DimensionRecord) -> [u64; DIGIT_WIDTH as usize] {
    let s = rec.degree as usize;
    let w = DIGIT_WIDTH as usize;
    let mut m = vec![0u64; w];
    m[..s.min(w)].copy_from_slice(&rec.initial[..s.min(w)]);
    for k in s..w {
        let mut value = m[k - s] ^ (m[k - s] << s);
        for i in 1..s {
            let a_i = (rec.coeff >> (s - 1 - i)) & 1;
            if a_i == 1 {
                value ^= m[k - i] << i;
            }
        }
        m[k] = value;
    }
    let mut cols = [0u64; DIGIT_WIDTH as usize];
    for (k, c) in cols.iter_mut().enumerate() {
        *c = m[k] << (w - 1 - k);
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_one_is_identity() {
        let dirs = load_direction_numbers(EMBEDDED_JOE_KUO, 1).unwrap();
        assert_eq!(dirs.dims(), 1);
        assert!(dirs.record(0).is_none());
        for k in 0..DIGIT_WIDTH as usize {
            assert_eq!(dirs.columns(0)[k], 1u64 << (DIGIT_WIDTH as usize - 1 - k));
        }
    }

    #[test]
    fn degree_one_record() {
        let dirs = load_direction_numbers("header\n2 1 0 1\n", 2).unwrap();
        let rec = dirs.record(1).unwrap();
        assert_eq!(rec.degree, 1);
        assert_eq!(rec.initial, vec![1]);
        // x + 1: m_k = m_{k-1} ^ 2 m_{k-1}, giving 1, 3, 5, 15, 17, ...
        let top = |k: usize| dirs.columns(1)[k] >> (DIGIT_WIDTH as usize - 1 - k);
        let got: Vec<u64> = (0..6).map(top).collect();
        assert_eq!(got, vec![1, 3, 5, 15, 17, 51]);
    }

    #[test]
    fn even_initial_value_rejected() {
        let err = load_direction_numbers("header\n2 1 0 2\n", 2).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err:?}");
        let err = load_direction_numbers("header\n2 2 1 1 5\n", 2).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err:?}");
    }

    #[test]
    fn malformed_line_names_line_number() {
        let err = load_direction_numbers("header\n2 1 0 1\n3 2 x 1 3\n", 3).unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, msg: "field \"x\": invalid digit found in string".into() });
        let err = load_direction_numbers("header\n2 2 1 1\n", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn too_many_dimensions_is_capacity_error() {
        let err = DirectionNumbers::embedded(EMBEDDED_DIMS + 1).unwrap_err();
        assert_eq!(err, Error::Capacity { requested: 17, available: 16 });
        assert_eq!(DirectionNumbers::embedded(EMBEDDED_DIMS).unwrap().dims(), 16);
    }

    #[test]
    fn columns_are_nonzero_on_diagonal() {
        let dirs = DirectionNumbers::embedded(EMBEDDED_DIMS).unwrap();
        for j in 0..dirs.dims() {
            for k in 0..DIGIT_WIDTH as usize {
                let diag = 1u64 << (DIGIT_WIDTH as usize - 1 - k);
                let col = dirs.columns(j)[k];
                assert_ne!(col & diag, 0, "dim {j} col {k}");
                assert_eq!(col & (diag - 1), 0, "dim {j} col {k} has bits below the diagonal");
            }
        }
    }
}
