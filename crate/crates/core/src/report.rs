//! Typed row values shared by the CSV and JSON exporters.

/// A single field of an output row.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    U64(u64),
    I64(i64),
    Real(f64),
    Str(String),
    Bool(bool),
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl Value {
    pub fn csv(&self) -> String {
        match self {
            Value::U64(v) => v.to_string(),
            Value::I64(v) => v.to_string(),
            Value::Real(v) => fmt_real(*v),
            Value::Str(v) => v.clone(),
            Value::Bool(v) => v.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 6.02e23, -4.9e-324, 0.0] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "lost bits in {s}");
        }
    }

    #[test]
    fn csv_rendering() {
        assert_eq!(Value::U64(7).csv(), "7");
        assert_eq!(Value::I64(-3).csv(), "-3");
        assert_eq!(Value::Bool(true).csv(), "true");
        assert_eq!(Value::Real(0.25).csv(), "2.5000000000000000e-1");
    }
}
