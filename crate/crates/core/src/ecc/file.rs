use super::code::LinearCode;
use super::gf2::{BitMatrix, BitVector};
use super::EccError;
use std::path::Path;

/// Parses the text code format.
///
/// ```text
/// n k d
/// <k rows of n 0/1 characters>
/// H                       (optional)
/// <n-k rows of n 0/1 characters>
/// ```
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_code_file(text: &str, name: &str) -> Result<LinearCode, EccError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| EccError::Parse("empty code file".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| EccError::Parse(format!("header must be 'n k d', got '{header}'")))?;
    let [n, k, d] = nums[..] else {
        return Err(EccError::Parse(format!("header must be 'n k d', got '{header}'")));
    };
    let read_rows = |lines: &mut dyn Iterator<Item = &str>, count: usize, what: &str| {
        (0..count)
            .map(|i| {
                let l = lines.next().ok_or_else(|| {
                    EccError::Parse(format!("expected {count} {what} rows, found {i}"))
                })?;
                parse_row(l, n)
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let g = BitMatrix::new(n, read_rows(&mut lines, k, "generator")?);
    match lines.next() {
        None => LinearCode::from_generator(name, g, Some(d), None),
        Some("H") | Some("h") => {
            let h = BitMatrix::new(n, read_rows(&mut lines, n.saturating_sub(k), "parity-check")?);
            if let Some(extra) = lines.next() {
                return Err(EccError::Parse(format!("unexpected trailing line '{extra}'")));
            }
            LinearCode::with_parity_check(name, g, h, Some(d))
        }
        Some(other) => Err(EccError::Parse(format!(
            "expected 'H' or end of file after generator rows, got '{other}'"
        ))),
    }
}

fn parse_row(line: &str, n: usize) -> Result<BitVector, EccError> {
    let bits: Vec<bool> = line
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(EccError::Parse(format!("invalid character '{other}' in row"))),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() != n {
        return Err(EccError::Parse(format!(
            "row has {} bits, expected {n}",
            bits.len()
        )));
    }
    Ok(BitVector::from_bools(&bits))
}

pub fn load_code_file(path: &Path) -> Result<LinearCode, EccError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EccError::Io(format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    parse_code_file(&text, &name)
}

/// Serialises a code in the format read by [`parse_code_file`], including `H`.
pub fn write_code_file(code: &LinearCode) -> String {
    let mut out = format!("{} {} {}\n", code.n(), code.k(), code.d());
    for r in code.generator().rows() {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out.push_str("H\n");
    for r in code.parity_check().rows() {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}
