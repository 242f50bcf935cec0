//! Report rendering helpers: exact rationals as strings, JSON envelopes and
//! CSV tables.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::dist::Q;
use crate::error::{Error, Result};

/// Exact rendering "num/den" (integers render without the slash).
pub fn q_string(q: &Q) -> String {
    if q.denom() == &num_bigint::BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// JSON envelope shared by every harness report.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub kind: &'static str,
    pub seed: Option<u64>,
    /// Printed header note, e.g. the family-max limitation.
    pub note: Option<String>,
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(kind: &'static str, seed: Option<u64>, note: Option<String>, body: T) -> Self {
        Envelope { kind, seed, note, body }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidParam(format!("report serialization: {e}")))
    }
}

/// Minimal CSV rendering for tabular report sections.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let escape = |s: &str| {
        if s.contains(',') || s.contains('"') || s.contains('\n') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    out.push_str(&header.iter().map(|h| escape(h)).collect::<Vec<_>>().join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|c| escape(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::q;

    #[test]
    fn rational_rendering() {
        assert_eq!(q_string(&q(1, 2)), "1/2");
        assert_eq!(q_string(&q(4, 2)), "2");
        assert_eq!(q_string(&q(0, 7)), "0");
    }

    #[test]
    fn csv_escapes_commas() {
        let csv = to_csv(&["a", "b"], &[vec!["1,5".into(), "x".into()]]);
        assert_eq!(csv, "a,b\n\"1,5\",x\n");
    }
}
