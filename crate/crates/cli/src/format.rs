//! The CSV field-table format shared by every file the tool reads or writes.
//!
//! A table holds labeled rows of node values over one grid:
//!
//! - the header row is `t` followed by the node coordinates;
//! - every following row is a label (the snapshot time for simulation
//!   output) followed by one value per node;
//! - fields are separated by `,`, records by a single LF (including after
//!   the last row), and the decimal separator is `.`;
//! - real values are written in scientific notation with 17 significant
//!   digits, which round-trips every finite `f64` exactly;
//! - complex values are written as `<re><im:+>i`, e.g. `1.0e0+0.0e0i` with
//!   both parts in the same 17-digit notation and the imaginary sign
//!   always present.
//!
//! Reading is strict: ragged rows, malformed numbers, or a header that
//! does not start with `t` are diagnostics, not repairs.

use num_complex::Complex64;

use crate::diag::{CliResult, Diagnostic};

/// Scientific notation with 17 significant digits; round-trips `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `<re><im:+>i` with both parts in [`fmt_float`] notation.
pub fn fmt_complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

/// Strict float parse with a field-level diagnostic.
pub fn parse_float(cell: &str) -> CliResult<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| Diagnostic::new(format!("malformed number '{cell}'")))
}

/// Parse the `<re><im:+>i` complex cell form. The split point is the last
/// sign that is not part of an exponent, so negative parts and negative
/// exponents in either component are unambiguous.
pub fn parse_complex(cell: &str) -> CliResult<Complex64> {
    let trimmed = cell.trim();
    let body = trimmed
        .strip_suffix('i')
        .ok_or_else(|| Diagnostic::new(format!("complex value '{cell}' must end in 'i'")))?;
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let at = split
        .ok_or_else(|| Diagnostic::new(format!("complex value '{cell}' has no imaginary part")))?;
    Ok(Complex64::new(
        parse_float(&body[..at])?,
        parse_float(&body[at..])?,
    ))
}

/// A parsed table of real rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTable {
    pub nodes: Vec<f64>,
    pub rows: Vec<(f64, Vec<f64>)>,
}

/// A parsed table of complex rows over a real node header.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTable {
    pub nodes: Vec<f64>,
    pub rows: Vec<(f64, Vec<Complex64>)>,
}

/// Render a real table to its exact byte form.
pub fn render_real_table(nodes: &[f64], rows: &[(f64, Vec<f64>)]) -> String {
    render_table(nodes, rows, |v| fmt_float(*v))
}

/// Render a complex table to its exact byte form.
pub fn render_complex_table(nodes: &[f64], rows: &[(f64, Vec<Complex64>)]) -> String {
    render_table(nodes, rows, |v| fmt_complex(*v))
}

fn render_table<T>(nodes: &[f64], rows: &[(f64, Vec<T>)], cell: impl Fn(&T) -> String) -> String {
    let mut out = String::from("t");
    for x in nodes {
        out.push(',');
        out.push_str(&fmt_float(*x));
    }
    out.push('\n');
    for (label, values) in rows {
        out.push_str(&fmt_float(*label));
        for v in values {
            out.push(',');
            out.push_str(&cell(v));
        }
        out.push('\n');
    }
    out
}

/// Parse a real table; see the module docs for the accepted form.
pub fn read_real_table(text: &str) -> CliResult<RealTable> {
    let (nodes, raw) = split_table(text)?;
    let mut rows = Vec::with_capacity(raw.len());
    for (line, label, cells) in raw {
        let mut values = Vec::with_capacity(cells.len());
        for (i, cell) in cells.iter().enumerate() {
            values.push(parse_float(cell).map_err(|d| d.at_field(line, i + 2))?);
        }
        rows.push((label, values));
    }
    Ok(RealTable { nodes, rows })
}

/// Parse a complex table; the label column stays real.
pub fn read_complex_table(text: &str) -> CliResult<ComplexTable> {
    let (nodes, raw) = split_table(text)?;
    let mut rows = Vec::with_capacity(raw.len());
    for (line, label, cells) in raw {
        let mut values = Vec::with_capacity(cells.len());
        for (i, cell) in cells.iter().enumerate() {
            values.push(parse_complex(cell).map_err(|d| d.at_field(line, i + 2))?);
        }
        rows.push((label, values));
    }
    Ok(ComplexTable { nodes, rows })
}

type RawRows<'a> = Vec<(usize, f64, Vec<&'a str>)>;

/// Split into (nodes, rows of raw cells); validates header shape, row
/// arity, and at least one data row. Line numbers are 1-based.
fn split_table(text: &str) -> CliResult<(Vec<f64>, RawRows<'_>)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Diagnostic::new("empty table: missing header row"))?;
    let mut head = header.split(',');
    let first = head.next().unwrap_or("");
    if first.trim() != "t" {
        return Err(Diagnostic::new(format!(
            "line 1: header must start with 't', found '{first}'"
        )));
    }
    let mut nodes = Vec::new();
    for (i, cell) in head.enumerate() {
        nodes.push(parse_float(cell).map_err(|d| d.at_field(1, i + 2))?);
    }
    if nodes.is_empty() {
        return Err(Diagnostic::new(
            "line 1: header carries no node coordinates",
        ));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue; // tolerate a trailing blank line
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != nodes.len() + 1 {
            return Err(Diagnostic::new(format!(
                "line {}: expected {} fields, found {}",
                idx + 1,
                nodes.len() + 1,
                cells.len()
            )));
        }
        let label = parse_float(cells[0]).map_err(|d| d.at_field(idx + 1, 1))?;
        rows.push((idx + 1, label, cells[1..].to_vec()));
    }
    if rows.is_empty() {
        return Err(Diagnostic::new("table carries a header but no data rows"));
    }
    Ok((nodes, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips_exactly() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            -1.0,
            core::f64::consts::PI,
            1.0e-300,
            -2.2250738585072014e-308,
            6.02214076e23,
            0.1 + 0.2,
        ] {
            let text = fmt_float(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn complex_format_round_trips_exactly() {
        let cases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.5e-7, 2.0),
            Complex64::new(3.25, -4.5e-120),
            Complex64::new(-0.0, -0.0),
        ];
        for z in cases {
            let text = fmt_complex(z);
            let back = parse_complex(&text).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits(), "{text}");
            assert_eq!(back.im.to_bits(), z.im.to_bits(), "{text}");
        }
        assert_eq!(
            fmt_complex(Complex64::new(1.0, 0.0)).matches('i').count(),
            1
        );
    }

    #[test]
    fn complex_parse_handles_signs_in_exponents() {
        let z = parse_complex("-1.0e-5-2.0e-3i").unwrap();
        assert_eq!(z, Complex64::new(-1.0e-5, -2.0e-3));
        assert!(parse_complex("1.0").is_err());
        assert!(parse_complex("1.0i").is_err());
        assert!(parse_complex("1+2+3i").is_err());
    }

    #[test]
    fn table_round_trips_bytes_and_bits() {
        let nodes = vec![0.0, core::f64::consts::FRAC_PI_2, core::f64::consts::PI];
        let rows = vec![
            (0.0, vec![1.0, 2.0, 3.0]),
            (0.125, vec![-1.0e-9, 0.5, 2.0 / 3.0]),
        ];
        let text = render_real_table(&nodes, &rows);
        let table = read_real_table(&text).unwrap();
        assert_eq!(table.nodes, nodes);
        assert_eq!(table.rows, rows);
        // writing the parsed table reproduces the bytes
        assert_eq!(render_real_table(&table.nodes, &table.rows), text);
        assert!(text.ends_with('\n'));
        assert_eq!(text.matches('\n').count(), 3);
    }

    #[test]
    fn malformed_tables_are_diagnostics() {
        assert!(read_real_table("").is_err());
        assert!(read_real_table("x,1.0\n0.0,1.0\n").is_err());
        assert!(read_real_table("t,1.0\n").is_err());
        let ragged = read_real_table("t,1.0,2.0\n0.0,1.0\n");
        assert!(ragged.unwrap_err().message().contains("line 2"));
        let bad = read_real_table("t,1.0\n0.0,abc\n");
        assert!(bad.unwrap_err().message().contains("'abc'"));
    }
}
