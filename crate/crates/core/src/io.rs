//! Number formatting and small CSV helpers shared by every exporter.

use std::io::Write;

use crate::error::Result;

/// Significant digits written to CSV files.
pub const CSV_DIGITS: usize = 12;

/// Formats `v` with [`CSV_DIGITS`] significant digits, '.' as decimal mark,
/// no exponent and no trailing zeros. Negative zero prints as `0`.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", CSV_DIGITS - 1, v).parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Writes a header and rows of numbers.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_num(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV written by [`write_table`].
pub fn read_table<R: std::io::Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| crate::Error::Config(format!("cannot parse number {s:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(fmt_num(123456.7890123456), "123456.789012");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1e-5), "0.00001");
        assert_eq!(fmt_num(2.0), "2");
    }

    #[test]
    fn table_round_trip() {
        let rows = vec![vec![0.05, 1.0 / 7.0], vec![-1.5, 2.0]];
        let mut buf = Vec::new();
        write_table(&mut buf, &["x0", "upper"], &rows).unwrap();
        let (h, back) = read_table(buf.as_slice()).unwrap();
        assert_eq!(h, vec!["x0", "upper"]);
        assert_eq!(back[1], rows[1]);
        assert!((back[0][1] - rows[0][1]).abs() < 1e-12);
    }
}
