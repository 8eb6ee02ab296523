//! Metric fields given by component expressions, and the line-oriented
//! metric file format:
//!
//! ```text
//! # round sphere
//! dim = 2
//! coords = th, ph
//! domain th = [0.2, pi - 0.2]
//! g[1][1] = 1
//! g[2][2] = sin(th)^2
//! ```
//!
//! Statements may also be separated by `;`. Indices are 1-based; omitted
//! components are zero.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::expr::{Expr, Func};
use super::jet::{eval_jet2, eval_value, Jet2};
use super::parser::parse_expr_at;
use crate::error::{MetricError, ParseError};

pub const DEFAULT_DOMAIN: (f64, f64) = (-1.0, 1.0);

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

/// A Riemannian metric `g_ij(x)` on a coordinate chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    coords: Vec<String>,
    /// Lower triangle, row-major: (0,0), (1,0), (1,1), (2,0), ...
    components: Vec<Expr>,
    domain: Vec<(f64, f64)>,
}

/// `g`, `∂g` and `∂²g` at one point, dense and 0-based.
#[derive(Debug, Clone)]
pub struct MetricJets {
    pub n: usize,
    pub point: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
    ddg: Vec<f64>,
}

impl MetricJets {
    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    /// `∂_k g_ij`
    #[inline]
    pub fn dg(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.dg[(k * n + i) * n + j]
    }

    /// `∂_k ∂_l g_ij`
    #[inline]
    pub fn ddg(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.ddg[((k * n + l) * n + i) * n + j]
    }

    pub fn g_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.g)
    }
}

fn valid_coord_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && name != "pi"
        && Func::from_name(name).is_none()
}

impl MetricField {
    /// Build from explicit coordinate names and a full `n x n` table of
    /// components (only the lower triangle is read).
    pub fn new(coords: Vec<String>, table: Vec<Vec<Expr>>) -> Result<Self, MetricError> {
        let n = coords.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(MetricError::Invalid(format!("component table must be {n}x{n}")));
        }
        let mut components = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in table.into_iter().enumerate() {
            components.extend(row.into_iter().take(i + 1));
        }
        MetricField::from_lower(coords, components, vec![DEFAULT_DOMAIN; n])
    }

    pub fn from_lower(
        coords: Vec<String>,
        components: Vec<Expr>,
        domain: Vec<(f64, f64)>,
    ) -> Result<Self, MetricError> {
        let n = coords.len();
        if n < 2 {
            return Err(MetricError::Dimension(n));
        }
        for (k, c) in coords.iter().enumerate() {
            if !valid_coord_name(c) {
                return Err(MetricError::Invalid(format!("invalid coordinate name `{c}`")));
            }
            if coords[..k].contains(c) {
                return Err(MetricError::Invalid(format!("duplicate coordinate `{c}`")));
            }
        }
        if components.len() != n * (n + 1) / 2 {
            return Err(MetricError::Invalid("wrong number of components".into()));
        }
        if let Some(m) = components.iter().filter_map(Expr::max_var).max() {
            if m >= n {
                return Err(MetricError::Invalid(format!("component references coordinate index {m} >= {n}")));
            }
        }
        if domain.len() != n || domain.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(MetricError::Invalid("invalid chart domain".into()));
        }
        Ok(MetricField {
            coords,
            components,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[tri(i, j)]
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Result<Self, MetricError> {
        let coords = std::mem::take(&mut self.coords);
        MetricField::from_lower(coords, self.components, domain)
    }

    pub fn with_coords(self, coords: Vec<String>) -> Result<Self, MetricError> {
        if coords.len() != self.dim() {
            return Err(MetricError::Invalid("renaming must keep the dimension".into()));
        }
        MetricField::from_lower(coords, self.components, self.domain)
    }

    /// `factor * g` (a homothety; use `λ²` for a length scale `λ`).
    pub fn scaled(&self, factor: f64) -> Self {
        let components = self
            .components
            .iter()
            .map(|e| {
                if e.is_zero_literal() {
                    e.clone()
                } else {
                    Expr::mul(Expr::num(factor), e.clone())
                }
            })
            .collect();
        MetricField {
            coords: self.coords.clone(),
            components,
            domain: self.domain.clone(),
        }
    }

    /// Pull back along the linear chart change `x = A y`:
    /// `g'_ab(y) = A_ia A_jb g_ij(A y)`. The new chart domain is the bounding
    /// box of the image of the old one under `A⁻¹` only approximately, so
    /// callers that need exact correspondence should map points explicitly.
    pub fn linear_pullback(&self, a: &DMatrix<f64>, coords: Vec<String>) -> Result<Self, MetricError> {
        let n = self.dim();
        if a.nrows() != n || a.ncols() != n || coords.len() != n {
            return Err(MetricError::Invalid("pullback matrix must be n x n".into()));
        }
        let subs: Vec<Expr> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Expr::mul(Expr::num(a[(i, j)]), Expr::Var(j)))
                    .reduce(Expr::add)
                    .expect("n >= 2")
            })
            .collect();
        let moved: Vec<Expr> = self.components.iter().map(|e| e.substitute(&subs)).collect();
        let mut components = Vec::with_capacity(moved.len());
        for p in 0..n {
            for q in 0..=p {
                let mut terms = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        let c = a[(i, p)] * a[(j, q)];
                        let e = &moved[tri(i, j)];
                        if c != 0.0 && !e.is_zero_literal() {
                            terms.push(Expr::mul(Expr::num(c), e.clone()));
                        }
                    }
                }
                components.push(terms.into_iter().reduce(Expr::add).unwrap_or(Expr::Num(0.0)));
            }
        }
        let inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| MetricError::Invalid("pullback matrix is singular".into()))?;
        let domain = (0..n)
            .map(|r| {
                let mut lo = 0.0;
                let mut hi = 0.0;
                for c in 0..n {
                    let (a0, b0) = self.domain[c];
                    let (x, y) = (inv[(r, c)] * a0, inv[(r, c)] * b0);
                    lo += x.min(y);
                    hi += x.max(y);
                }
                (lo, hi)
            })
            .collect();
        MetricField::from_lower(coords, components, domain)
    }

    /// Block-diagonal product metric on the concatenated chart.
    pub fn product(a: &MetricField, b: &MetricField) -> Result<Self, MetricError> {
        if let Some(c) = a.coords.iter().find(|c| b.coords.contains(c)) {
            return Err(MetricError::Invalid(format!("coordinate name `{c}` appears in both factors")));
        }
        let (na, nb) = (a.dim(), b.dim());
        let n = na + nb;
        let mut components = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                let e = if i < na {
                    a.component(i, j).clone()
                } else if j >= na {
                    b.component(i - na, j - na).shift_vars(na)
                } else {
                    Expr::Num(0.0)
                };
                components.push(e);
            }
        }
        let coords = a.coords.iter().chain(&b.coords).cloned().collect();
        let domain = a.domain.iter().chain(&b.domain).copied().collect();
        MetricField::from_lower(coords, components, domain)
    }

    fn check_point(&self, p: &[f64]) -> Result<(), MetricError> {
        if p.len() != self.dim() {
            return Err(MetricError::PointDimension {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Second-order jets of every component at `p`.
    pub fn jets(&self, p: &[f64]) -> Result<MetricJets, MetricError> {
        self.check_point(p)?;
        let n = self.dim();
        let mut g = vec![0.0; n * n];
        let mut dg = vec![0.0; n * n * n];
        let mut ddg = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..=i {
                let e = self.component(i, j);
                let jet = if e.is_zero_literal() {
                    Jet2::constant(0.0, n)
                } else {
                    eval_jet2(e, p, Some(&self.coords)).map_err(|source| MetricError::Eval {
                        i: i + 1,
                        j: j + 1,
                        source,
                    })?
                };
                for (a, b) in [(i, j), (j, i)] {
                    g[a * n + b] = jet.value;
                    for k in 0..n {
                        dg[(k * n + a) * n + b] = jet.grad[k];
                        for l in 0..n {
                            ddg[((k * n + l) * n + a) * n + b] = jet.h(k, l);
                        }
                    }
                }
            }
        }
        let jets = MetricJets {
            n,
            point: p.to_vec(),
            g,
            dg,
            ddg,
        };
        if jets.g_matrix().cholesky().is_none() {
            return Err(MetricError::NotPositiveDefinite { point: p.to_vec() });
        }
        Ok(jets)
    }

    /// Component values only.
    pub fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>, MetricError> {
        self.check_point(p)?;
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = eval_value(self.component(i, j), p).map_err(|source| MetricError::Eval {
                    i: i + 1,
                    j: j + 1,
                    source,
                })?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Serialize to the metric file format.
    pub fn to_source(&self) -> String {
        let n = self.dim();
        let mut s = String::new();
        let _ = writeln!(s, "dim = {n}");
        let _ = writeln!(s, "coords = {}", self.coords.join(", "));
        for (c, (lo, hi)) in self.coords.iter().zip(&self.domain) {
            if (*lo, *hi) != DEFAULT_DOMAIN {
                let _ = writeln!(s, "domain {c} = [{}, {}]", fmt_bound(*lo), fmt_bound(*hi));
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let e = self.component(i, j);
                if !e.is_zero_literal() {
                    let _ = writeln!(s, "g[{}][{}] = {}", i + 1, j + 1, e.display(&self.coords));
                }
            }
        }
        s
    }
}

fn fmt_bound(v: f64) -> String {
    format!("{v}")
}

struct Stmt<'a> {
    text: &'a str,
    line: usize,
    /// 1-based column of `text[0]`
    col: usize,
}

fn split_statements(src: &str) -> Vec<Stmt<'_>> {
    let mut out = Vec::new();
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start = 0;
        for piece in line.split(';') {
            let lead = piece.len() - piece.trim_start().len();
            let text = piece.trim();
            if !text.is_empty() {
                out.push(Stmt {
                    text,
                    line: ln + 1,
                    col: line[..start + lead].chars().count() + 1,
                });
            }
            start += piece.len() + 1;
        }
    }
    out
}

/// Position of the first byte after `=` plus leading whitespace, as (byte
/// offset, extra columns).
fn rhs_of<'a>(st: &Stmt<'a>) -> Result<(&'a str, &'a str, usize), ParseError> {
    let eq = st
        .text
        .find('=')
        .ok_or_else(|| ParseError::new(st.line, st.col, "expected `key = value`"))?;
    let lhs = st.text[..eq].trim();
    let after = &st.text[eq + 1..];
    let lead = after.len() - after.trim_start().len();
    let rhs = after.trim();
    let col = st.col + st.text[..eq + 1].chars().count() + after[..lead].chars().count();
    Ok((lhs, rhs, col))
}

fn parse_index(s: &str, st: &Stmt<'_>) -> Result<(usize, usize), ParseError> {
    // g[i][j]
    let bad = || ParseError::new(st.line, st.col, format!("malformed component `{s}`; expected g[i][j]"));
    let rest = s.strip_prefix('g').ok_or_else(bad)?.trim();
    let rest = rest.strip_prefix('[').ok_or_else(bad)?;
    let (i, rest) = rest.split_once(']').ok_or_else(bad)?;
    let rest = rest.trim().strip_prefix('[').ok_or_else(bad)?;
    let (j, rest) = rest.split_once(']').ok_or_else(bad)?;
    if !rest.trim().is_empty() {
        return Err(bad());
    }
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    Ok((i, j))
}

/// Parse a metric file.
pub fn parse_metric_source(src: &str) -> Result<MetricField, MetricError> {
    let mut dim: Option<usize> = None;
    let mut coords: Option<Vec<String>> = None;
    let mut domain: Vec<Option<(f64, f64)>> = Vec::new();
    let mut entries: Vec<Option<Expr>> = Vec::new();
    let mut last = (1, 1);

    for st in split_statements(src) {
        last = (st.line, st.col);
        let (key, rhs, rcol) = rhs_of(&st)?;
        let perr = |col: usize, msg: String| ParseError::new(st.line, col, msg);
        if key == "dim" {
            let n: usize = rhs
                .parse()
                .map_err(|_| perr(rcol, format!("dimension must be a positive integer, got `{rhs}`")))?;
            if n < 2 {
                return Err(MetricError::Dimension(n));
            }
            if dim.replace(n).is_some() {
                return Err(perr(st.col, "duplicate `dim`".into()).into());
            }
        } else if key == "coords" {
            let n = dim.ok_or_else(|| perr(st.col, "`dim` must precede `coords`".into()))?;
            let names: Vec<String> = rhs.split(',').map(|c| c.trim().to_string()).collect();
            if names.len() != n {
                return Err(perr(
                    rcol,
                    format!("dimension mismatch: dim = {n} but {} coordinates declared", names.len()),
                )
                .into());
            }
            for (k, c) in names.iter().enumerate() {
                if !valid_coord_name(c) {
                    return Err(perr(rcol, format!("invalid coordinate name `{c}`")).into());
                }
                if names[..k].contains(c) {
                    return Err(perr(rcol, format!("duplicate coordinate `{c}`")).into());
                }
            }
            if coords.replace(names).is_some() {
                return Err(perr(st.col, "duplicate `coords`".into()).into());
            }
            domain = vec![None; n];
            entries = vec![None; n * (n + 1) / 2];
        } else if let Some(name) = key.strip_prefix("domain") {
            let names = coords.as_ref().ok_or_else(|| perr(st.col, "`coords` must precede `domain`".into()))?;
            let name = name.trim();
            let k = names
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| perr(st.col, format!("unknown coordinate `{name}` in domain")))?;
            let inner = rhs
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| perr(rcol, "domain must be `[lo, hi]`".into()))?;
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| perr(rcol, "domain must be `[lo, hi]`".into()))?;
            let bound = |s: &str, off: usize| -> Result<f64, MetricError> {
                let e = parse_expr_at(s.trim(), &[], st.line, rcol + off)?;
                eval_value(&e, &[]).map_err(|e| perr(rcol, e.to_string()).into())
            };
            let lo_v = bound(lo, 1)?;
            let hi_v = bound(hi, 2 + lo.chars().count())?;
            if !(lo_v < hi_v) {
                return Err(perr(rcol, format!("empty domain [{lo_v}, {hi_v}]")).into());
            }
            if domain[k].replace((lo_v, hi_v)).is_some() {
                return Err(perr(st.col, format!("duplicate domain for `{name}`")).into());
            }
        } else if key.starts_with('g') {
            let names = coords.as_ref().ok_or_else(|| perr(st.col, "`coords` must precede components".into()))?;
            let n = names.len();
            let (i, j) = parse_index(key, &st)?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(perr(st.col, format!("dimension mismatch: component g[{i}][{j}] outside 1..={n}")).into());
            }
            let e = parse_expr_at(rhs, names, st.line, rcol)?;
            if entries[tri(i - 1, j - 1)].replace(e).is_some() {
                return Err(perr(st.col, format!("duplicate component g[{i}][{j}]")).into());
            }
        } else {
            return Err(perr(st.col, format!("unknown statement `{key}`")).into());
        }
    }

    let coords = coords.ok_or_else(|| ParseError::new(last.0, last.1, "missing `dim`/`coords` declaration"))?;
    let components = entries.into_iter().map(|e| e.unwrap_or(Expr::Num(0.0))).collect();
    let domain = domain.into_iter().map(|d| d.unwrap_or(DEFAULT_DOMAIN)).collect();
    MetricField::from_lower(coords, components, domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_chart() {
        let m = parse_metric_source("dim=2; coords=u,v; g[1][1]=1; g[2][2]=sin(u)^2").unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.coords(), ["u", "v"]);
        let g = m.matrix_at(&[std::f64::consts::FRAC_PI_2, 0.0]).unwrap();
        assert_eq!(g[(1, 1)], 1.0);
        assert_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn sol_component_evaluates_to_one() {
        let m = parse_metric_source("dim = 3\ncoords = x,y,z\ng[1][1]=exp(2*z)\ng[2][2]=exp(-2*z)\ng[3][3]=1").unwrap();
        let j = m.jets(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(j.g(0, 0), 1.0);
        assert_eq!(j.dg(2, 0, 0), 2.0);
        assert_eq!(j.ddg(2, 2, 0, 0), 4.0);
    }

    #[test]
    fn syntax_error_location() {
        let err = parse_metric_source("dim = 1+1").unwrap_err();
        assert!(matches!(err, MetricError::Parse(_)));
        let err = parse_metric_source("dim = 2\ncoords = u, v\ng[1][1] = 1+*2").unwrap_err();
        match err {
            MetricError::Parse(p) => assert_eq!((p.line, p.col), (3, 13)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(parse_metric_source("dim = 3\ncoords = u, v").is_err());
        assert!(parse_metric_source("dim = 2\ncoords = u, v\ng[3][1] = 1").is_err());
    }

    #[test]
    fn comments_domains_and_upper_entries() {
        let src = "# header\ndim = 2 # trailing\ncoords = th, ph\ndomain th = [0.2, pi - 0.2]\ng[1][1] = 1\ng[1][2] = 0.1\ng[2][2] = 2";
        let m = parse_metric_source(src).unwrap();
        assert!((m.domain()[0].1 - (std::f64::consts::PI - 0.2)).abs() < 1e-15);
        assert_eq!(m.domain()[1], DEFAULT_DOMAIN);
        assert_eq!(m.matrix_at(&[0.0, 0.0]).unwrap()[(1, 0)], 0.1);
        assert!(parse_metric_source("dim = 2\ncoords = a, b\ng[1][2] = 1\ng[2][1] = 1").is_err());
    }

    #[test]
    fn rejects_bad_coordinates_and_unknowns() {
        assert!(parse_metric_source("dim = 2\ncoords = sin, v").is_err());
        assert!(parse_metric_source("dim = 2\ncoords = u, u").is_err());
        assert!(parse_metric_source("dim = 2\ncoords = u, v\ng[1][1] = w").is_err());
        assert!(parse_metric_source("g[1][1] = 1").is_err());
        assert!(parse_metric_source("dim = 2\ncoords = u, v\nfoo = 1").is_err());
    }

    #[test]
    fn not_positive_definite() {
        let m = parse_metric_source("dim = 2\ncoords = u, v\ng[1][1] = 1\ng[2][2] = u").unwrap();
        assert!(matches!(m.jets(&[-0.5, 0.0]), Err(MetricError::NotPositiveDefinite { .. })));
        assert!(m.jets(&[0.5, 0.0]).is_ok());
    }

    #[test]
    fn source_round_trip() {
        let src = "dim = 3\ncoords = x, y, z\ndomain z = [-2, 2.5]\ng[1][1] = 1\ng[2][2] = 1 + x^2\ng[3][2] = -x\ng[3][3] = 1\n";
        let m = parse_metric_source(src).unwrap();
        assert_eq!(m.to_source(), src);
        assert_eq!(parse_metric_source(&m.to_source()).unwrap(), m);
    }

    #[test]
    fn product_and_pullback() {
        let a = parse_metric_source("dim = 2\ncoords = u, v\ng[1][1] = 1\ng[2][2] = sin(u)^2").unwrap();
        let b = parse_metric_source("dim = 2\ncoords = s, t\ng[1][1] = exp(s)\ng[2][2] = 1").unwrap();
        let p = MetricField::product(&a, &b).unwrap();
        let g = p.matrix_at(&[1.0, 0.0, 0.5, 0.0]).unwrap();
        assert!((g[(1, 1)] - 1f64.sin().powi(2)).abs() < 1e-15);
        assert!((g[(2, 2)] - 0.5f64.exp()).abs() < 1e-15);
        assert!(MetricField::product(&a, &a).is_err());

        let mat = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 2.0]);
        let q = a.linear_pullback(&mat, vec!["y1".into(), "y2".into()]).unwrap();
        let y = [0.3, 0.4];
        let x = &mat * nalgebra::DVector::from_column_slice(&y);
        let expect = mat.transpose() * a.matrix_at(x.as_slice()).unwrap() * &mat;
        let got = q.matrix_at(&y).unwrap();
        assert!((expect - got).abs().max() < 1e-14);
    }
}
