//! Plain-text symbol files.
//!
//! ```text
//! liecover-symbol 1
//! group torus1
//! family heat t=1
//! truncation 12
//! labels 25
//! k=0 1 1 0
//! k=-1 1 0.36787944117144233 0
//! ...
//! ```
//!
//! Each record is a label (`k=<i>` on T¹, `k=<i>,<j>` on T², `m=<2ℓ>` on
//! SU(2)), its dimension `d`, then `d²` real/imaginary pairs in row-major
//! order. Records follow the dual order. Numbers use shortest round-trip
//! formatting, so a file reproduces its symbol bit for bit.

use std::fmt::Write as _;

use liecover_core::group::enumerate_dual;
use liecover_core::linalg::CMatrix;
use liecover_core::symbol::{custom_symbol_unchecked, make_symbol};
use liecover_core::{Complex64, GroupId, IrrepIndex, SymbolFamily, SymbolField};

pub const MAGIC: &str = "liecover-symbol 1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("symbol file line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

pub fn label_text(index: IrrepIndex) -> String {
    match index {
        IrrepIndex::Circle(k) => format!("k={k}"),
        IrrepIndex::Torus(a, b) => format!("k={a},{b}"),
        IrrepIndex::Spin(m) => format!("m={m}"),
    }
}

fn parse_label(group: GroupId, s: &str) -> Option<IrrepIndex> {
    match group {
        GroupId::Torus1 => s.strip_prefix("k=")?.parse().ok().map(IrrepIndex::Circle),
        GroupId::Torus2 => {
            let (a, b) = s.strip_prefix("k=")?.split_once(',')?;
            Some(IrrepIndex::Torus(a.parse().ok()?, b.parse().ok()?))
        }
        GroupId::Su2 => s.strip_prefix("m=")?.parse().ok().map(IrrepIndex::Spin),
    }
}

pub fn family_text(family: &SymbolFamily) -> String {
    match *family {
        SymbolFamily::Heat { t } => format!("heat t={t}"),
        SymbolFamily::Polynomial { beta } => format!("polynomial beta={beta}"),
        SymbolFamily::Subgaussian { omega, gamma } => format!("subgaussian omega={omega} gamma={gamma}"),
        SymbolFamily::Custom => "custom".into(),
    }
}

fn parse_family(s: &str) -> Option<SymbolFamily> {
    let mut parts = s.split_whitespace();
    let name = parts.next()?;
    let mut get = |key: &str| -> Option<f64> { parts.next()?.strip_prefix(key)?.strip_prefix('=')?.parse().ok() };
    let f = match name {
        "heat" => SymbolFamily::Heat { t: get("t")? },
        "polynomial" => SymbolFamily::Polynomial { beta: get("beta")? },
        "subgaussian" => SymbolFamily::Subgaussian { omega: get("omega")?, gamma: get("gamma")? },
        "custom" => SymbolFamily::Custom,
        _ => return None,
    };
    parts.next().is_none().then_some(f)
}

pub fn write_symbol(symbol: &SymbolField) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "group {}", symbol.group().name());
    let _ = writeln!(s, "family {}", family_text(&symbol.family()));
    let _ = writeln!(s, "truncation {}", symbol.truncation());
    let _ = writeln!(s, "labels {}", symbol.len());
    for (l, m) in symbol.iter() {
        let _ = write!(s, "{} {}", label_text(l.index), l.dim);
        for i in 0..l.dim {
            for j in 0..l.dim {
                let z = m[(i, j)];
                let _ = write!(s, " {} {}", z.re, z.im);
            }
        }
        s.push('\n');
    }
    s
}

/// Parse a symbol file. Parametric families are rebuilt from their
/// parameters and must match the stored matrices exactly; custom matrices
/// are taken as stored, without certification.
pub fn read_symbol(text: &str) -> Result<SymbolField, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next = |what: &str| -> Result<(usize, &str), FormatError> {
        lines.next().ok_or_else(|| FormatError { line: 0, message: format!("unexpected end of file, expected {what}") })
    };
    let err = |line: usize, message: String| FormatError { line, message };

    let (ln, magic) = next("header")?;
    if magic != MAGIC {
        return Err(err(ln, format!("expected `{MAGIC}`")));
    }
    let (ln, g) = next("group")?;
    let group = g
        .strip_prefix("group ")
        .and_then(GroupId::from_name)
        .ok_or_else(|| err(ln, format!("bad group line `{g}`")))?;
    let (ln, f) = next("family")?;
    let family = f.strip_prefix("family ").and_then(parse_family).ok_or_else(|| err(ln, format!("bad family line `{f}`")))?;
    let (ln, t) = next("truncation")?;
    let truncation: f64 = t
        .strip_prefix("truncation ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| err(ln, format!("bad truncation line `{t}`")))?;
    let (ln, c) = next("label count")?;
    let count: usize = c.strip_prefix("labels ").and_then(|v| v.parse().ok()).ok_or_else(|| err(ln, format!("bad labels line `{c}`")))?;
    let expected = enumerate_dual(group, truncation).map_err(|e| err(ln, e.to_string()))?;
    if expected.len() != count {
        return Err(err(ln, format!("{count} labels declared, the truncation has {}", expected.len())));
    }
    let mut matrices = Vec::with_capacity(count);
    for label in &expected {
        let (ln, rec) = next("a label record")?;
        let mut parts = rec.split_whitespace();
        let idx = parts.next().and_then(|p| parse_label(group, p)).ok_or_else(|| err(ln, format!("bad label in `{rec}`")))?;
        if idx != label.index {
            return Err(err(ln, format!("expected label {}, found {}", label_text(label.index), label_text(idx))));
        }
        let dim: usize = parts.next().and_then(|p| p.parse().ok()).ok_or_else(|| err(ln, "missing dimension".into()))?;
        if dim != label.dim {
            return Err(err(ln, format!("dimension {dim} does not match {}", label.dim)));
        }
        let nums: Vec<f64> = parts.map(|p| p.parse::<f64>()).collect::<Result<_, _>>().map_err(|e| err(ln, e.to_string()))?;
        if nums.len() != 2 * dim * dim {
            return Err(err(ln, format!("expected {} numbers, found {}", 2 * dim * dim, nums.len())));
        }
        matrices.push(CMatrix::from_fn(dim, dim, |i, j| {
            let k = 2 * (i * dim + j);
            Complex64::new(nums[k], nums[k + 1])
        }));
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(err(ln, format!("trailing content `{extra}`")));
    }
    match family {
        SymbolFamily::Custom => custom_symbol_unchecked(group, truncation, matrices).map_err(|e| err(0, e.to_string())),
        f => {
            let s = make_symbol(group, f, truncation).map_err(|e| err(3, e.to_string()))?;
            if let Some(pos) = s.matrices().iter().zip(&matrices).position(|(a, b)| a != b) {
                return Err(err(6 + pos, format!("matrix differs from the {} family", family_text(&f))));
            }
            Ok(s)
        }
    }
}
