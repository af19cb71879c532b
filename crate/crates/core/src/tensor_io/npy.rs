//! NPY v1.0 subset: little-endian `<f4`/`<f8`, C order, rank 2.

use crate::error::{Error, Result};
use crate::matrix::EmbeddingMatrix;

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const PREAMBLE_LEN: usize = 10;
const ALIGN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NpyDtype {
    F4,
    F8,
}

impl NpyDtype {
    fn descr(self) -> &'static str {
        match self {
            NpyDtype::F4 => "<f4",
            NpyDtype::F8 => "<f8",
        }
    }

    fn item_size(self) -> usize {
        match self {
            NpyDtype::F4 => 4,
            NpyDtype::F8 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Header {
    dtype: NpyDtype,
    shape: Vec<usize>,
}

/// Decodes an in-memory NPY file. `<f4` payloads are widened to `f64` exactly.
pub fn decode(bytes: &[u8]) -> Result<EmbeddingMatrix<f64>> {
    if bytes.len() < PREAMBLE_LEN {
        return Err(Error::at_byte(
            bytes.len(),
            "file shorter than the npy preamble",
        ));
    }
    if let Some(pos) = (0..MAGIC.len()).find(|&i| bytes[i] != MAGIC[i]) {
        return Err(Error::at_byte(pos, "bad npy magic"));
    }
    if bytes[6] != 1 || bytes[7] != 0 {
        return Err(Error::at_byte(
            6,
            format!("unsupported npy version {}.{}", bytes[6], bytes[7]),
        ));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_start = PREAMBLE_LEN + header_len;
    if bytes.len() < data_start {
        return Err(Error::at_byte(bytes.len(), "header runs past end of file"));
    }
    let header = parse_header(&bytes[PREAMBLE_LEN..data_start])?;
    if header.shape.len() != 2 {
        return Err(Error::Shape(format!(
            "expected a rank-2 array, found rank {}",
            header.shape.len()
        )));
    }
    let (rows, cols) = (header.shape[0], header.shape[1]);
    if cols == 0 {
        return Err(Error::Shape("second axis has length 0".into()));
    }
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Shape("shape overflows".into()))?;
    let item = header.dtype.item_size();
    let payload = &bytes[data_start..];
    if payload.len() != count * item {
        let at = data_start + payload.len().min(count * item);
        return Err(Error::at_byte(
            at,
            format!(
                "payload holds {} bytes, shape ({rows}, {cols}) needs {}",
                payload.len(),
                count * item
            ),
        ));
    }
    let values: Vec<f64> = match header.dtype {
        NpyDtype::F8 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
        NpyDtype::F4 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    };
    EmbeddingMatrix::new(rows, cols, values)
}

/// Encodes a matrix as NPY v1.0. `F4` rounds each value to the nearest `f32`.
pub fn encode(m: &EmbeddingMatrix<f64>, dtype: NpyDtype) -> Vec<u8> {
    let dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': ({}, {}), }}",
        dtype.descr(),
        m.n_items(),
        m.dim()
    );
    let unpadded = PREAMBLE_LEN + dict.len() + 1;
    let padding = (ALIGN - unpadded % ALIGN) % ALIGN;
    let header_len = dict.len() + padding + 1;

    let mut out = Vec::with_capacity(PREAMBLE_LEN + header_len + m.values().len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.extend(std::iter::repeat_n(b' ', padding));
    out.push(b'\n');
    match dtype {
        NpyDtype::F8 => m
            .values()
            .iter()
            .for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        NpyDtype::F4 => m
            .values()
            .iter()
            .for_each(|v| out.extend_from_slice(&(*v as f32).to_le_bytes())),
    }
    out
}

// Header dict grammar: a Python literal dict with string keys whose values are
// strings, booleans, or tuples of non-negative integers.

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Str(String),
    Bool(bool),
    Tuple(Vec<usize>),
}

struct HeaderParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderParser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::at_byte(PREAMBLE_LEN + self.pos, message)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn string(&mut self) -> Result<String> {
        let quote = match self.peek() {
            Some(q @ (b'\'' | b'"')) => q,
            _ => return Err(self.err("expected a quoted string")),
        };
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos] != quote {
            self.pos += 1;
        }
        if self.pos == self.bytes.len() {
            return Err(self.err("unterminated string"));
        }
        let s = String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned();
        self.pos += 1;
        Ok(s)
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let bytes = self.bytes;
        let start = self.pos;
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&bytes[start..self.pos]).unwrap_or("");
        let Ok(v) = digits.parse() else {
            self.pos = start;
            return Err(self.err("expected a non-negative integer"));
        };
        // `L` suffixes appear in headers written by Python 2.
        if bytes.get(self.pos) == Some(&b'L') {
            self.pos += 1;
        }
        Ok(v)
    }

    fn value(&mut self) -> Result<Value> {
        match self.peek() {
            Some(b'\'' | b'"') => self.string().map(Value::Str),
            Some(b'(') => {
                self.pos += 1;
                let mut dims = Vec::new();
                loop {
                    if self.peek() == Some(b')') {
                        self.pos += 1;
                        break;
                    }
                    dims.push(self.integer()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {}
                        _ => return Err(self.err("expected ',' or ')' in shape tuple")),
                    }
                }
                Ok(Value::Tuple(dims))
            }
            _ => {
                let rest = &self.bytes[self.pos..];
                if rest.starts_with(b"True") {
                    self.pos += 4;
                    Ok(Value::Bool(true))
                } else if rest.starts_with(b"False") {
                    self.pos += 5;
                    Ok(Value::Bool(false))
                } else {
                    Err(self.err("unrecognized header value"))
                }
            }
        }
    }

    fn dict(&mut self) -> Result<Vec<(String, Value, usize)>> {
        self.expect(b'{')?;
        let mut items = Vec::new();
        loop {
            if self.peek() == Some(b'}') {
                self.pos += 1;
                break;
            }
            self.skip_ws();
            let key_at = self.pos;
            let key = self.string()?;
            self.expect(b':')?;
            let value = self.value()?;
            items.push((key, value, key_at));
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {}
                _ => return Err(self.err("expected ',' or '}' in header dict")),
            }
        }
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.err("trailing characters after header dict"));
        }
        Ok(items)
    }
}

fn parse_header(raw: &[u8]) -> Result<Header> {
    if let Some(pos) = raw.iter().position(|b| !b.is_ascii()) {
        return Err(Error::at_byte(
            PREAMBLE_LEN + pos,
            "non-ASCII byte in header",
        ));
    }
    if raw.last() != Some(&b'\n') {
        return Err(Error::at_byte(
            PREAMBLE_LEN + raw.len().saturating_sub(1),
            "header is not terminated by a newline",
        ));
    }
    let mut parser = HeaderParser { bytes: raw, pos: 0 };
    let items = parser.dict()?;

    let mut dtype = None;
    let mut fortran = None;
    let mut shape = None;
    for (key, value, at) in items {
        let at = PREAMBLE_LEN + at;
        match (key.as_str(), value) {
            ("descr", Value::Str(d)) => {
                dtype = Some(match d.as_str() {
                    "<f8" => NpyDtype::F8,
                    "<f4" => NpyDtype::F4,
                    other => {
                        return Err(Error::at_byte(at, format!("unsupported descr {other:?}")))
                    }
                })
            }
            ("fortran_order", Value::Bool(b)) => fortran = Some(b),
            ("shape", Value::Tuple(s)) => shape = Some(s),
            (k, _) => return Err(Error::at_byte(at, format!("unexpected header entry {k:?}"))),
        }
    }
    let end = PREAMBLE_LEN + raw.len();
    let dtype = dtype.ok_or_else(|| Error::at_byte(end, "header lacks 'descr'"))?;
    match fortran {
        Some(false) => {}
        Some(true) => {
            return Err(Error::at_byte(
                PREAMBLE_LEN,
                "fortran_order arrays are not supported",
            ))
        }
        None => return Err(Error::at_byte(end, "header lacks 'fortran_order'")),
    }
    let shape = shape.ok_or_else(|| Error::at_byte(end, "header lacks 'shape'"))?;
    Ok(Header { dtype, shape })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_header(dict: &str, payload: &[u8]) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&[1, 0]);
        let header = format!("{dict}\n");
        out.extend_from_slice(&(header.len() as u16).to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        out.extend_from_slice(payload);
        out
    }

    fn doubles(vals: &[f64]) -> Vec<u8> {
        vals.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn decodes_documented_layout() {
        let bytes = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (3, 2), }",
            &doubles(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
        );
        let m = decode(&bytes).unwrap();
        assert_eq!((m.n_items(), m.dim()), (3, 2));
        assert_eq!(m.values(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn header_is_64_byte_aligned() {
        let m = EmbeddingMatrix::from_rows(&[[1.5f64, -2.0]]).unwrap();
        let bytes = encode(&m, NpyDtype::F8);
        let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
        assert_eq!((PREAMBLE_LEN + header_len) % 64, 0);
        assert_eq!(bytes[PREAMBLE_LEN + header_len - 1], b'\n');
        assert_eq!(decode(&bytes).unwrap(), m);
    }

    #[test]
    fn nan_payload_is_reported_at_its_cell() {
        let nan = f64::from_bits(0x7FF8_0000_0000_0000);
        let bytes = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }",
            &doubles(&[0.0, 1.0, 2.0, 3.0, nan, 5.0]),
        );
        assert!(matches!(
            decode(&bytes),
            Err(Error::NonFinite { row: 1, col: 1 })
        ));
    }

    #[test]
    fn rank_other_than_two_is_a_shape_error() {
        let bytes = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (4,), }",
            &doubles(&[0.0; 4]),
        );
        assert!(matches!(decode(&bytes), Err(Error::Shape(_))));
        let bytes = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2, 2), }",
            &doubles(&[0.0; 4]),
        );
        assert!(matches!(decode(&bytes), Err(Error::Shape(_))));
    }

    fn format_location(err: Error) -> String {
        match err {
            Error::Format { location, .. } => location,
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_headers_name_a_byte_offset() {
        let mut bytes = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1), }",
            &doubles(&[0.0]),
        );
        bytes[3] = b'X';
        assert_eq!(format_location(decode(&bytes).unwrap_err()), "byte 3");

        let mut v2 = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1), }",
            &doubles(&[0.0]),
        );
        v2[6] = 2;
        assert_eq!(format_location(decode(&v2).unwrap_err()), "byte 6");

        let bad_descr = with_header(
            "{'descr': '>f8', 'fortran_order': False, 'shape': (1, 1), }",
            &doubles(&[0.0]),
        );
        assert_eq!(format_location(decode(&bad_descr).unwrap_err()), "byte 11");

        let bad_tuple = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (1; 1), }",
            &doubles(&[0.0]),
        );
        assert!(format_location(decode(&bad_tuple).unwrap_err()).starts_with("byte "));

        let fortran = with_header(
            "{'descr': '<f8', 'fortran_order': True, 'shape': (1, 1), }",
            &doubles(&[0.0]),
        );
        assert!(matches!(decode(&fortran), Err(Error::Format { .. })));

        assert_eq!(format_location(decode(b"\x93NU").unwrap_err()), "byte 3");
    }

    #[test]
    fn payload_length_must_match_shape() {
        let short = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 2), }",
            &doubles(&[0.0; 3]),
        );
        assert!(matches!(decode(&short), Err(Error::Format { .. })));
        let long = with_header(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2), }",
            &doubles(&[0.0; 3]),
        );
        assert!(matches!(decode(&long), Err(Error::Format { .. })));
    }

    #[test]
    fn f4_widens_exactly() {
        let vals = [0.1f32, -3.25, 1e-30];
        let payload: Vec<u8> = vals.iter().flat_map(|v| v.to_le_bytes()).collect();
        let bytes = with_header(
            "{'descr': '<f4', 'fortran_order': False, 'shape': (1, 3), }",
            &payload,
        );
        let m = decode(&bytes).unwrap();
        let expected: Vec<f64> = vals.iter().map(|&v| v as f64).collect();
        assert_eq!(m.values(), expected.as_slice());
    }

    #[test]
    fn empty_matrix_is_header_only() {
        let m = EmbeddingMatrix::<f64>::empty(4).unwrap();
        let bytes = encode(&m, NpyDtype::F8);
        assert_eq!(bytes.len() % 64, 0);
        assert_eq!(decode(&bytes).unwrap(), m);
    }

    #[test]
    fn key_order_and_python2_suffix_are_accepted() {
        let bytes = with_header(
            "{'shape': (1L, 2L), 'fortran_order': False, 'descr': '<f8'}",
            &doubles(&[7.0, 8.0]),
        );
        assert_eq!(decode(&bytes).unwrap().values(), &[7.0, 8.0]);
    }
}
