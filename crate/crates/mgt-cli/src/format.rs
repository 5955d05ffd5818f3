//! Output formatting: CSV with round-trip-safe floats.
//!
//! Floats are printed with 17 significant digits ('.' decimal separator,
//! no thousands separators), which reproduces the exact f64 on re-parse;
//! rows end with `\n`.

/// 17-significant-digit scientific form.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV document under construction.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn with_header(columns: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&columns.join(","));
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
