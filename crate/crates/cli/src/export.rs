//! Byte-stable CSV and JSON encoders.

use serde::Serialize;

/// Decimal with 17 significant digits; non-finite values spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub struct Csv {
    w: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(header: I) -> Csv {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(header.into_iter().map(|s| s.as_ref().to_string())).expect("in-memory write");
        Csv { w }
    }

    pub fn row<I: IntoIterator<Item = S>, S: AsRef<str>>(&mut self, fields: I) {
        self.w.write_record(fields.into_iter().map(|s| s.as_ref().to_string())).expect("in-memory write");
    }

    pub fn finish(self) -> Vec<u8> {
        self.w.into_inner().expect("in-memory flush")
    }
}

pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report types serialize");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-std::f64::consts::LN_2), "-6.9314718055994529e-1");
        assert_eq!(num(0.0), "0.0000000000000000e0");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_uses_lf() {
        let mut c = Csv::new(["a", "b"]);
        c.row(["1", "2"]);
        assert_eq!(c.finish(), b"a,b\n1,2\n");
    }
}
