//! Minimal CSV writer with locale-free, round-trip float formatting.

/// Shortest string that parses back to exactly `x`. Plain notation for
/// moderate magnitudes, scientific otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || (x.is_finite() && (1e-5..1e16).contains(&x.abs())) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.1e-12, 13.618191569786429, 1e300, -2.5e-7, 0.0, 12345.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.25), "0.25");
        assert_eq!(fmt_f64(6.1e-12), "6.1e-12");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn quoting() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["x,y".into(), "1".into()]);
        assert_eq!(t.render(), "a,b\n\"x,y\",1\n");
    }
}
