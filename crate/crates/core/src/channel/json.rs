//! Channel JSON format.
//!
//! ```json
//! {"d_in": 2, "d_out": 2, "kraus": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]}
//! ```
//!
//! Each Kraus operator is an array of rows; each entry is `[re, im]`.
//! Doubles are written in shortest round-trip form, so reading back a written
//! channel reproduces every bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    d_in: usize,
    d_out: usize,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Parses a channel and validates it with trace-preservation tolerance
/// `tp_tol`. Row lengths must agree with `d_in` and row counts with `d_out`.
pub fn channel_from_json(text: &str, tp_tol: f64) -> Result<QuantumChannel> {
    let doc: ChannelDoc = serde_json::from_str(text).map_err(|e| Error::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut kraus = Vec::with_capacity(doc.kraus.len());
    for (index, rows) in doc.kraus.iter().enumerate() {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows != doc.d_out || rows.iter().any(|r| r.len() != doc.d_in) {
            return Err(Error::KrausShape {
                index,
                rows: nrows,
                cols: rows.iter().map(Vec::len).find(|&c| c != doc.d_in).unwrap_or(ncols),
                d_out: doc.d_out,
                d_in: doc.d_in,
            });
        }
        kraus.push(ComplexMatrix::from_fn(nrows, ncols, |i, j| {
            let [re, im] = rows[i][j];
            Complex64::new(re, im)
        }));
    }
    QuantumChannel::with_tolerance(doc.d_in, doc.d_out, kraus, tp_tol)
}

pub fn channel_to_json(channel: &QuantumChannel) -> String {
    let doc = ChannelDoc {
        d_in: channel.d_in(),
        d_out: channel.d_out(),
        kraus: channel
            .kraus()
            .iter()
            .map(|k| {
                (0..k.nrows())
                    .map(|i| (0..k.ncols()).map(|j| [k[(i, j)].re, k[(i, j)].im]).collect())
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("channel documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_document() {
        let text = r#"{"d_in": 2, "d_out": 2, "kraus": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]}"#;
        let t = channel_from_json(text, 1e-8).unwrap();
        assert_eq!(t, QuantumChannel::identity(2).unwrap());
    }

    #[test]
    fn reports_position_of_syntax_errors() {
        let err = channel_from_json("{\n  \"d_in\": 2,\n  \"d_out\": }", 1e-8).unwrap_err();
        match err {
            Error::Json { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn reports_kraus_shape() {
        let text = r#"{"d_in": 2, "d_out": 2, "kraus": [[[[1.0, 0.0], [0.0, 0.0]]]]}"#;
        let err = channel_from_json(text, 1e-8).unwrap_err();
        assert!(err.to_string().contains("expected 2x2"), "{err}");
    }

    proptest! {
        #[test]
        fn write_then_read_is_bit_exact(seed in any::<u64>(), d_in in 1usize..4, d_out in 1usize..4) {
            let t = QuantumChannel::random(d_in, d_out, d_in * d_out, seed).unwrap();
            let back = channel_from_json(&channel_to_json(&t), 1e-8).unwrap();
            for (a, b) in t.kraus().iter().zip(back.kraus()) {
                for (x, y) in a.iter().zip(b.iter()) {
                    prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                    prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
                }
            }
        }
    }
}
