//! Named code families, construction operators and the code expression parser.

use super::code::{DecoderStrategy, LinearCode, EXACT_DISTANCE_MAX_K};
use super::gf2::{BitMatrix, BitVector};
use super::EccError;

pub fn repetition(n: usize) -> Result<LinearCode, EccError> {
    if n == 0 {
        return Err(EccError::InvalidCode("repetition length must be >= 1".into()));
    }
    let mut row = BitVector::zeros(n);
    for i in 0..n {
        row.set(i, true);
    }
    LinearCode::from_generator(
        format!("repetition({n})"),
        BitMatrix::new(n, vec![row]),
        Some(n),
        Some(DecoderStrategy::Majority),
    )
}

/// Single parity check `[n, n-1, 2]`, the dual of repetition(n).
pub fn parity(n: usize) -> Result<LinearCode, EccError> {
    if n < 2 {
        return Err(EccError::InvalidCode("parity length must be >= 2".into()));
    }
    let rows = (0..n - 1)
        .map(|i| {
            let mut r = BitVector::zeros(n);
            r.set(i, true);
            r.set(n - 1, true);
            r
        })
        .collect();
    LinearCode::from_generator(
        format!("parity({n})"),
        BitMatrix::new(n, rows),
        Some(2),
        Some(DecoderStrategy::SyndromeTable),
    )
}

/// Parity patterns assigned to data bits: all `m`-bit vectors of weight >= 2,
/// lighter first, ties broken by descending bit string.
fn hamming_columns(m: usize) -> Vec<Vec<bool>> {
    let mut cols: Vec<Vec<bool>> = (0u32..1 << m)
        .map(|v| (0..m).map(|j| (v >> (m - 1 - j)) & 1 == 1).collect::<Vec<bool>>())
        .filter(|c| c.iter().filter(|&&b| b).count() >= 2)
        .collect();
    cols.sort_by(|a, b| {
        let wa = a.iter().filter(|&&x| x).count();
        let wb = b.iter().filter(|&&x| x).count();
        wa.cmp(&wb).then_with(|| b.cmp(a))
    });
    cols
}

/// Systematic Hamming `[2^m - 1, 2^m - 1 - m, 3]`: message bits first, then `m` parity bits.
pub fn hamming(m: usize) -> Result<LinearCode, EccError> {
    if !(2..=10).contains(&m) {
        return Err(EccError::InvalidCode("hamming(m) needs 2 <= m <= 10".into()));
    }
    let n = (1 << m) - 1;
    let k = n - m;
    let rows = hamming_columns(m)
        .into_iter()
        .enumerate()
        .map(|(i, parity)| {
            let mut r = BitVector::zeros(n);
            r.set(i, true);
            for (j, p) in parity.into_iter().enumerate() {
                r.set(k + j, p);
            }
            r
        })
        .collect();
    LinearCode::from_generator(
        format!("hamming({m})"),
        BitMatrix::new(n, rows),
        Some(3),
        Some(DecoderStrategy::SyndromeTable),
    )
}

pub fn extended_hamming(m: usize) -> Result<LinearCode, EccError> {
    Ok(extend(&hamming(m)?)?.renamed(format!("extended_hamming({m})")))
}

/// First-order Reed-Muller `[2^m, m + 1, 2^(m-1)]`.
///
/// Row 0 is all ones; row `i` holds bit `i - 1` of each position index.
pub fn reed_muller_1(m: usize) -> Result<LinearCode, EccError> {
    if !(1..=16).contains(&m) {
        return Err(EccError::InvalidCode("reed_muller_1(m) needs 1 <= m <= 16".into()));
    }
    let n = 1usize << m;
    let mut rows = Vec::with_capacity(m + 1);
    let mut ones = BitVector::zeros(n);
    for j in 0..n {
        ones.set(j, true);
    }
    rows.push(ones);
    for i in 0..m {
        let mut r = BitVector::zeros(n);
        for j in 0..n {
            r.set(j, (j >> i) & 1 == 1);
        }
        rows.push(r);
    }
    LinearCode::from_generator(
        format!("reed_muller_1({m})"),
        BitMatrix::new(n, rows),
        Some(n / 2),
        Some(DecoderStrategy::Hadamard),
    )
}

/// Cyclic code of length `n` generated by `poly` (coefficient of `x^i` at index `i`).
pub fn cyclic(n: usize, poly: &[bool], declared_d: Option<usize>) -> Result<LinearCode, EccError> {
    let deg = poly
        .iter()
        .rposition(|&b| b)
        .ok_or_else(|| EccError::InvalidPolynomial("zero polynomial".into()))?;
    if deg >= n {
        return Err(EccError::InvalidPolynomial(format!(
            "degree {deg} must be below the length {n}"
        )));
    }
    if !poly[0] {
        return Err(EccError::InvalidPolynomial(
            "constant term is zero so it cannot divide x^n - 1".into(),
        ));
    }
    if !divides_xn_minus_1(&poly[..=deg], n) {
        return Err(EccError::InvalidPolynomial(format!(
            "polynomial does not divide x^{n} - 1 over GF(2)"
        )));
    }
    let k = n - deg;
    let rows = (0..k)
        .map(|shift| {
            let mut r = BitVector::zeros(n);
            for (i, &c) in poly[..=deg].iter().enumerate() {
                r.set(i + shift, c);
            }
            r
        })
        .collect();
    LinearCode::from_generator(
        format!("cyclic({n},{})", format_poly(&poly[..=deg])),
        BitMatrix::new(n, rows),
        declared_d,
        None,
    )
}

fn divides_xn_minus_1(g: &[bool], n: usize) -> bool {
    let deg = g.len() - 1;
    let mut rem = vec![false; n + 1];
    rem[0] = true;
    rem[n] = true;
    for top in (deg..=n).rev() {
        if rem[top] {
            for (i, &c) in g.iter().enumerate() {
                if c {
                    rem[top - deg + i] ^= true;
                }
            }
        }
    }
    rem.iter().all(|&b| !b)
}

fn format_poly(p: &[bool]) -> String {
    let terms: Vec<String> = (0..p.len())
        .rev()
        .filter(|&i| p[i])
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect();
    terms.join("+")
}

/// Distance to declare for a derived code when enumeration is out of reach.
fn derived_distance(k: usize, lower_bound: usize) -> Option<usize> {
    (k > EXACT_DISTANCE_MAX_K).then_some(lower_bound.max(1))
}

/// Appends an overall parity bit.
pub fn extend(code: &LinearCode) -> Result<LinearCode, EccError> {
    let g = code.generator();
    let rows = g
        .rows()
        .iter()
        .map(|r| {
            let mut r = r.clone();
            let p = r.weight() % 2 == 1;
            r.push(p);
            r
        })
        .collect();
    let d = code.d();
    let bound = if d % 2 == 1 { d + 1 } else { d };
    LinearCode::from_generator(
        format!("extend({})", code.name()),
        BitMatrix::new(code.n() + 1, rows),
        derived_distance(code.k(), bound),
        matched_strategy(code),
    )
}

fn matched_strategy(code: &LinearCode) -> Option<DecoderStrategy> {
    match code.strategy() {
        DecoderStrategy::SyndromeTable => Some(DecoderStrategy::SyndromeTable),
        _ => None,
    }
}

fn check_positions(code: &LinearCode, positions: &[usize]) -> Result<Vec<usize>, EccError> {
    let mut p = positions.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() != positions.len() {
        return Err(EccError::InvalidCode("duplicate positions".into()));
    }
    if let Some(&bad) = p.iter().find(|&&i| i >= code.n()) {
        return Err(EccError::InvalidCode(format!(
            "position {bad} out of range for length {}",
            code.n()
        )));
    }
    if p.is_empty() {
        return Err(EccError::InvalidCode("no positions given".into()));
    }
    Ok(p)
}

/// Keeps codewords that vanish on `positions`, then deletes those positions.
pub fn shorten(code: &LinearCode, positions: &[usize]) -> Result<LinearCode, EccError> {
    let p = check_positions(code, positions)?;
    if p.len() >= code.k() {
        return Err(EccError::InvalidCode(format!(
            "cannot shorten a k={} code at {} positions",
            code.k(),
            p.len()
        )));
    }
    let g = code.generator();
    // messages m with m * G restricted to p equal to zero
    let kernel = g.select_columns(&p).transpose().null_space();
    let want = code.k() - p.len();
    if kernel.n_rows() != want {
        return Err(EccError::InvalidCode(format!(
            "rank collapse: subcode vanishing on the positions has dimension {} instead of {want}",
            kernel.n_rows()
        )));
    }
    let rows = kernel
        .rows()
        .iter()
        .map(|m| g.left_mul(m).delete(&p))
        .collect();
    LinearCode::from_generator(
        format!("shorten({},{})", code.name(), format_positions(&p)),
        BitMatrix::new(code.n() - p.len(), rows),
        derived_distance(want, code.d()),
        matched_strategy(code),
    )
}

/// Deletes `positions` from every codeword.
pub fn puncture(code: &LinearCode, positions: &[usize]) -> Result<LinearCode, EccError> {
    let p = check_positions(code, positions)?;
    if code.d() <= p.len() && !code.d_verified() {
        return Err(EccError::InvalidCode(format!(
            "puncturing {} positions of a d={} code may leave d < 1",
            p.len(),
            code.d()
        )));
    }
    let g = code.generator().delete_columns(&p);
    if g.rank() < code.k() {
        return Err(EccError::InvalidCode(
            "puncturing makes the generator rank deficient (distance drops below 1)".into(),
        ));
    }
    LinearCode::from_generator(
        format!("puncture({},{})", code.name(), format_positions(&p)),
        g,
        derived_distance(code.k(), code.d().saturating_sub(p.len())),
        matched_strategy(code),
    )
}

/// Code generated by the parity-check matrix.
pub fn dual(code: &LinearCode) -> Result<LinearCode, EccError> {
    if code.k() == code.n() {
        return Err(EccError::InvalidCode("dual of the full space is empty".into()));
    }
    let k = code.n() - code.k();
    LinearCode::from_generator(
        format!("dual({})", code.name()),
        code.parity_check().clone(),
        derived_distance(k, 1),
        None,
    )
}

fn format_positions(p: &[usize]) -> String {
    let s: Vec<String> = p.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", s.join(","))
}

/// Parses and builds a code expression such as
/// `shorten(extended_hamming(3), {7})` or `cyclic(7, x^3+x+1)`.
///
/// Positions are 0-based; `{a..b}` is an inclusive range.
pub fn build_code(expr: &str) -> Result<LinearCode, EccError> {
    let expr = expr.trim();
    let open = expr
        .find('(')
        .ok_or_else(|| EccError::Parse(format!("expected name(args) in '{expr}'")))?;
    if !expr.ends_with(')') {
        return Err(EccError::Parse(format!("missing ')' in '{expr}'")));
    }
    let name = expr[..open].trim();
    let args = split_args(&expr[open + 1..expr.len() - 1])?;
    let arity = |want: &[usize]| -> Result<(), EccError> {
        if want.contains(&args.len()) {
            Ok(())
        } else {
            Err(EccError::Parse(format!(
                "{name} takes {want:?} arguments, got {}",
                args.len()
            )))
        }
    };
    match name {
        "repetition" => {
            arity(&[1])?;
            repetition(parse_usize(&args[0])?)
        }
        "parity" => {
            arity(&[1])?;
            parity(parse_usize(&args[0])?)
        }
        "hamming" => {
            arity(&[1])?;
            hamming(parse_usize(&args[0])?)
        }
        "extended_hamming" => {
            arity(&[1])?;
            extended_hamming(parse_usize(&args[0])?)
        }
        "reed_muller_1" => {
            arity(&[1])?;
            reed_muller_1(parse_usize(&args[0])?)
        }
        "cyclic" => {
            arity(&[2, 3])?;
            let n = parse_usize(&args[0])?;
            let poly = parse_poly(&args[1])?;
            let d = args.get(2).map(|a| parse_usize(a)).transpose()?;
            cyclic(n, &poly, d)
        }
        "extend" => {
            arity(&[1])?;
            extend(&build_code(&args[0])?)
        }
        "dual" => {
            arity(&[1])?;
            dual(&build_code(&args[0])?)
        }
        "shorten" => {
            arity(&[2])?;
            shorten(&build_code(&args[0])?, &parse_positions(&args[1])?)
        }
        "puncture" => {
            arity(&[2])?;
            puncture(&build_code(&args[0])?, &parse_positions(&args[1])?)
        }
        other => Err(EccError::UnknownCode(other.to_string())),
    }
}

/// Splits on top-level commas.
fn split_args(s: &str) -> Result<Vec<String>, EccError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(EccError::Parse(format!("unbalanced brackets in '{s}'")));
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(EccError::Parse(format!("unbalanced brackets in '{s}'")));
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    Ok(out)
}

fn parse_usize(s: &str) -> Result<usize, EccError> {
    s.trim()
        .parse()
        .map_err(|_| EccError::Parse(format!("expected a non-negative integer, got '{s}'")))
}

/// `{1, 4..6}` or `[1, 4..6]`.
pub fn parse_positions(s: &str) -> Result<Vec<usize>, EccError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .or_else(|| s.strip_prefix('[').and_then(|t| t.strip_suffix(']')))
        .ok_or_else(|| EccError::Parse(format!("expected {{positions}}, got '{s}'")))?;
    let mut out = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse_usize(a)?, parse_usize(b)?);
                if a > b {
                    return Err(EccError::Parse(format!("empty range '{part}'")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_usize(part)?),
        }
    }
    Ok(out)
}

/// `x^3 + x + 1`, or a 0/1 string with the highest power first.
pub fn parse_poly(s: &str) -> Result<Vec<bool>, EccError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if !s.is_empty() && s.chars().all(|c| c == '0' || c == '1') && s.len() > 1 {
        return Ok(s.chars().rev().map(|c| c == '1').collect());
    }
    let mut coeffs: Vec<bool> = Vec::new();
    for term in s.split('+') {
        let power = match term {
            "1" => 0,
            "x" => 1,
            t => t
                .strip_prefix("x^")
                .and_then(|p| p.parse::<usize>().ok())
                .ok_or_else(|| EccError::Parse(format!("bad polynomial term '{t}'")))?,
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, false);
        }
        coeffs[power] ^= true;
    }
    Ok(coeffs)
}
