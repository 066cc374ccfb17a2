//! Plain-text formats: setup files, matrices, atoms and words, certificates.

use thiserror::Error;

use crate::elementary::{Atom, EWord};
use crate::factor::{ConjugateWord, Factor};
use crate::field::{validate_scalars, FieldCtx, FieldError, InvolutionKind, ScalarError};
use crate::form_ring::{Descriptor, FormError, FormSetup, HPair, HermitianField};
use crate::unitary::UMatrix;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: {source}")]
    Field { line: usize, source: FieldError },
    #[error("line {line}: {source}")]
    Scalar { line: usize, source: ScalarError },
    #[error("line {line}: {source}")]
    Form { line: usize, source: FormError },
}

fn syntax(line: usize, msg: impl Into<String>) -> TextError {
    TextError::Syntax { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((k + 1, l))
    })
}

const SETUP_KEYS: [&str; 8] = [
    "field.p",
    "field.deg",
    "field.modulus",
    "involution",
    "lambda",
    "mu",
    "delta",
    "n",
];

/// Parses a `key = value` setup file into a validated [`FormSetup`].
pub fn parse_setup(text: &str) -> Result<FormSetup, TextError> {
    let mut vals: Vec<Option<(usize, String)>> = vec![None; SETUP_KEYS.len()];
    for (line, l) in lines(text) {
        let (k, v) = l.split_once('=').ok_or_else(|| syntax(line, "expected key = value"))?;
        let k = k.trim();
        let slot = SETUP_KEYS
            .iter()
            .position(|&s| s == k)
            .ok_or_else(|| TextError::UnknownKey {
                line,
                key: k.to_string(),
            })?;
        if vals[slot].is_some() {
            return Err(TextError::DuplicateKey {
                line,
                key: k.to_string(),
            });
        }
        vals[slot] = Some((line, v.trim().to_string()));
    }
    let get = |k: usize| vals[k].clone().ok_or(TextError::MissingKey(SETUP_KEYS[k]));
    let int = |k: usize| -> Result<(usize, u32), TextError> {
        let (line, v) = get(k)?;
        v.parse::<u32>()
            .map(|x| (line, x))
            .map_err(|_| syntax(line, format!("`{v}` is not a non-negative integer")))
    };
    let (_, p) = int(0)?;
    let (deg_line, k) = int(1)?;
    let (mod_line, modulus) = match &vals[2] {
        Some((line, v)) => {
            let digits: Result<Vec<u32>, _> = v.split(',').map(|d| d.trim().parse::<u32>()).collect();
            (*line, digits.map_err(|_| syntax(*line, format!("bad modulus `{v}`")))?)
        }
        None if k == 1 => (deg_line, vec![0, 1]),
        None => return Err(TextError::MissingKey("field.modulus")),
    };
    let (inv_line, inv) = match &vals[3] {
        Some((line, v)) => (
            *line,
            match v.as_str() {
                "identity" => InvolutionKind::Identity,
                "frobenius" => InvolutionKind::FrobeniusHalf,
                other => return Err(syntax(*line, format!("unknown involution `{other}`"))),
            },
        ),
        None => (0, InvolutionKind::Identity),
    };
    let f = FieldCtx::new(p, k, &modulus, inv).map_err(|source| TextError::Field {
        line: mod_line.max(inv_line),
        source,
    })?;
    let elem = |slot: usize| -> Result<(usize, crate::field::Elem), TextError> {
        let (line, v) = get(slot)?;
        f.parse_elem(&v)
            .map(|e| (line, e))
            .map_err(|source| TextError::Field { line, source })
    };
    let (_, lambda) = elem(4)?;
    let (mu_line, mu) = elem(5)?;
    let scalars = validate_scalars(&f, lambda, mu).map_err(|source| TextError::Scalar { line: mu_line, source })?;
    let (delta_line, dv) = get(6)?;
    let descriptor = parse_descriptor(&f, &dv).map_err(|m| syntax(delta_line, m))?;
    let (n_line, n) = int(7)?;
    FormSetup::new(HermitianField::new(f, scalars), descriptor, n as usize).map_err(|source| TextError::Form {
        line: delta_line.max(n_line),
        source,
    })
}

fn parse_descriptor(f: &FieldCtx, v: &str) -> Result<Descriptor, String> {
    match v {
        "min" => Ok(Descriptor::Min),
        "max" => Ok(Descriptor::Max),
        "kx0" => Ok(Descriptor::KTimesZero),
        _ => {
            let body = v.strip_prefix("gen:").ok_or_else(|| format!("unknown delta `{v}`"))?;
            let mut pairs = vec![];
            for part in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let inner = part
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| format!("bad generator `{part}`"))?;
                let xy = f.parse_elems(inner, 2).map_err(|e| e.to_string())?;
                pairs.push(HPair::new(xy[0], xy[1]));
            }
            Ok(Descriptor::Generated(pairs))
        }
    }
}

/// Renders a setup in the format read by [`parse_setup`].
pub fn format_setup(setup: &FormSetup) -> String {
    let f = setup.field();
    let modulus: Vec<String> = f.modulus().iter().map(u32::to_string).collect();
    let inv = match f.involution() {
        InvolutionKind::Identity => "identity",
        InvolutionKind::FrobeniusHalf => "frobenius",
    };
    let delta = match setup.delta.descriptor() {
        Descriptor::Min => "min".to_string(),
        Descriptor::Max => "max".to_string(),
        Descriptor::KTimesZero => "kx0".to_string(),
        Descriptor::Generated(g) => {
            let parts: Vec<String> = g.iter().map(|h| setup.format_pair(*h)).collect();
            format!("gen:{}", parts.join(";"))
        }
    };
    format!(
        "field.p = {}\nfield.deg = {}\nfield.modulus = {}\ninvolution = {}\nlambda = {}\nmu = {}\ndelta = {}\nn = {}\n",
        f.characteristic(),
        f.degree(),
        modulus.join(","),
        inv,
        f.format_elem(setup.lambda()),
        f.format_elem(setup.mu()),
        delta,
        setup.n
    )
}

/// Parses `n=<n>` followed by `2n+1` rows of element literals in storage order.
pub fn parse_matrix(f: &FieldCtx, text: &str) -> Result<UMatrix, TextError> {
    let mut it = lines(text);
    let (line, head) = it.next().ok_or_else(|| syntax(1, "empty matrix file"))?;
    let n: usize = head
        .strip_prefix("n=")
        .or_else(|| head.strip_prefix("n ="))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| syntax(line, "expected `n=<n>`"))?;
    let dim = 2 * n + 1;
    let mut data = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    for (line, l) in it {
        let row: Vec<&str> = l.split_whitespace().collect();
        if row.len() != dim {
            return Err(syntax(line, format!("expected {dim} entries, found {}", row.len())));
        }
        for tok in row {
            data.push(f.parse_elem(tok).map_err(|source| TextError::Field { line, source })?);
        }
        rows += 1;
    }
    if rows != dim {
        return Err(syntax(line, format!("expected {dim} rows, found {rows}")));
    }
    Ok(UMatrix::from_storage(n, data))
}

pub fn format_matrix(f: &FieldCtx, m: &UMatrix) -> String {
    let dim = m.dim();
    let mut out = format!("n={}\n", m.rank());
    for r in 0..dim {
        let row: Vec<String> = (0..dim).map(|c| f.format_elem(m.at(r, c))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses `S(i,j,x)`, `X(i,x,y)`, `D(i,j,x)` or `P(i,j)`.
pub fn parse_atom(f: &FieldCtx, s: &str) -> Result<Atom, String> {
    let s = s.trim();
    let (tag, rest) = s.split_at(s.find('(').ok_or_else(|| format!("bad atom `{s}`"))?);
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("bad atom `{s}`"))?;
    let toks: Vec<&str> = inner.split(',').map(str::trim).collect();
    let (n_idx, n_el) = match tag.trim() {
        "S" | "D" | "P" => (2, if tag.trim() == "P" { 0 } else { 1 }),
        "X" => (1, 2),
        other => return Err(format!("unknown atom `{other}`")),
    };
    if toks.len() < n_idx {
        return Err(format!("bad atom `{s}`"));
    }
    let idx: Vec<i32> = toks[..n_idx]
        .iter()
        .map(|t| t.parse::<i32>().map_err(|_| format!("bad index `{t}` in `{s}`")))
        .collect::<Result<_, _>>()?;
    let els = if n_el == 0 {
        if toks.len() != n_idx {
            return Err(format!("bad atom `{s}`"));
        }
        vec![]
    } else {
        f.parse_elems(&toks[n_idx..].join(","), n_el)
            .map_err(|e| format!("{e} in `{s}`"))?
    };
    Ok(match tag.trim() {
        "S" => Atom::Short {
            i: idx[0],
            j: idx[1],
            x: els[0],
        },
        "D" => Atom::Diag {
            i: idx[0],
            j: idx[1],
            x: els[0],
        },
        "P" => Atom::Perm { i: idx[0], j: idx[1] },
        _ => Atom::Extra {
            i: idx[0],
            x: els[0],
            y: els[1],
        },
    })
}

pub fn format_atom(f: &FieldCtx, a: &Atom) -> String {
    match *a {
        Atom::Short { i, j, x } => format!("S({i},{j},{})", f.format_elem(x)),
        Atom::Extra { i, x, y } => format!("X({i},{},{})", f.format_elem(x), f.format_elem(y)),
        Atom::Diag { i, j, x } => format!("D({i},{j},{})", f.format_elem(x)),
        Atom::Perm { i, j } => format!("P({i},{j})"),
    }
}

/// Parses `;`-separated atoms; `e` is the empty word.
pub fn parse_word(f: &FieldCtx, s: &str) -> Result<EWord, String> {
    let s = s.trim();
    if s == "e" || s.is_empty() {
        return Ok(EWord::empty());
    }
    s.split(';')
        .map(|a| parse_atom(f, a))
        .collect::<Result<Vec<_>, _>>()
        .map(EWord)
}

pub fn format_word(f: &FieldCtx, w: &EWord) -> String {
    if w.is_empty() {
        return "e".into();
    }
    w.atoms()
        .iter()
        .map(|a| format_atom(f, a))
        .collect::<Vec<_>>()
        .join(";")
}

/// The target line of a certificate: an atom or a matrix file reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetRef {
    Atom(Atom),
    File(String),
}

/// A certificate as read from text, before file references are resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateText {
    pub base: String,
    pub target: TargetRef,
    pub factors: Vec<Factor>,
}

fn looks_like_atom(s: &str) -> bool {
    matches!(s.chars().next(), Some('S' | 'X' | 'D' | 'P')) && s.contains('(') && s.ends_with(')')
}

pub fn parse_certificate(f: &FieldCtx, text: &str) -> Result<CertificateText, TextError> {
    let mut base = None;
    let mut target = None;
    let mut factors = vec![];
    for (line, l) in lines(text) {
        if let Some(v) = l.strip_prefix("base:") {
            if base.replace(v.trim().to_string()).is_some() {
                return Err(TextError::DuplicateKey {
                    line,
                    key: "base".into(),
                });
            }
        } else if let Some(v) = l.strip_prefix("target:") {
            let v = v.trim();
            let t = if looks_like_atom(v) {
                TargetRef::Atom(parse_atom(f, v).map_err(|m| syntax(line, m))?)
            } else {
                TargetRef::File(v.to_string())
            };
            if target.replace(t).is_some() {
                return Err(TextError::DuplicateKey {
                    line,
                    key: "target".into(),
                });
            }
        } else if let Some(v) = l.strip_prefix("conj:") {
            let (w, e) = v.rsplit_once("exp:").ok_or_else(|| syntax(line, "missing `exp:`"))?;
            let exp = match e.trim() {
                "+1" | "1" => 1,
                "-1" => -1,
                other => return Err(syntax(line, format!("exponent must be +1 or -1, got `{other}`"))),
            };
            let conj = parse_word(f, w).map_err(|m| syntax(line, m))?;
            factors.push(Factor { conj, exp });
        } else {
            return Err(syntax(line, format!("unexpected line `{l}`")));
        }
    }
    Ok(CertificateText {
        base: base.ok_or(TextError::MissingKey("base"))?,
        target: target.ok_or(TextError::MissingKey("target"))?,
        factors,
    })
}

pub fn format_certificate(f: &FieldCtx, cw: &ConjugateWord, base_ref: &str, target: &TargetRef) -> String {
    let mut out = format!("base: {base_ref}\n");
    match target {
        TargetRef::Atom(a) => out.push_str(&format!("target: {}\n", format_atom(f, a))),
        TargetRef::File(p) => out.push_str(&format!("target: {p}\n")),
    }
    for fa in &cw.factors {
        let e = if fa.exp == 1 { "+1" } else { "-1" };
        out.push_str(&format!("conj: {} exp: {e}\n", format_word(f, &fa.conj)));
    }
    out
}
