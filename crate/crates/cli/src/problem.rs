//! Problem files: JSON descriptors for the ring, automorphism and matrix
//! literals, parsed into library values and serialized back canonically.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use thiserror::Error;

use novikov_k1::matrix::{InvertiblePair, TwistedMatrix};
use novikov_k1::nil::lower_bound;
use novikov_k1::ring::{AutoKind, Automorphism, Elem, FiniteGroup, Ring, RingKind};
use novikov_k1::series::{Ctx, Flavor, Prec, Series, Side};

pub const MIN_PRECISION: i64 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{pointer}: unknown {what} {kind:?}")]
    UnknownKind { pointer: String, what: &'static str, kind: String },
    #[error("{pointer}: {message}")]
    Precision { pointer: String, message: String },
}

impl ProblemError {
    pub fn pointer(&self) -> Option<&str> {
        match self {
            ProblemError::Json(_) => None,
            ProblemError::Schema { pointer, .. }
            | ProblemError::UnknownKind { pointer, .. }
            | ProblemError::Precision { pointer, .. } => Some(pointer),
        }
    }
}

type Result<T> = std::result::Result<T, ProblemError>;

fn schema(pointer: &str, message: impl Into<String>) -> ProblemError {
    ProblemError::Schema {
        pointer: pointer.to_string(),
        message: message.into(),
    }
}

fn child(pointer: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{key}")
}

/// Ring descriptor as written in a problem file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingDesc {
    Rationals,
    Integers,
    IntegersMod(u64),
    GaussianRationals,
    Matrix { size: usize, base: Box<RingDesc> },
    Group { group: GroupDesc, base: Box<RingDesc> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDesc {
    Symmetric3,
    Cyclic(usize),
    Table { names: Vec<String>, table: Vec<Vec<usize>> },
}

impl GroupDesc {
    fn build(&self) -> std::result::Result<FiniteGroup, String> {
        match self {
            GroupDesc::Symmetric3 => Ok(FiniteGroup::symmetric3()),
            GroupDesc::Cyclic(n) => Ok(FiniteGroup::cyclic(*n)),
            GroupDesc::Table { names, table } => FiniteGroup::new(names.clone(), table.clone()).map_err(|e| e.to_string()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            GroupDesc::Symmetric3 => json!({"kind": "symmetric3"}),
            GroupDesc::Cyclic(n) => json!({"kind": "cyclic", "order": n}),
            GroupDesc::Table { names, table } => json!({"kind": "table", "elements": names, "table": table}),
        }
    }
}

impl RingDesc {
    pub fn build(&self) -> std::result::Result<Ring, String> {
        Ok(match self {
            RingDesc::Rationals => Ring::rationals(),
            RingDesc::Integers => Ring::integers(),
            RingDesc::IntegersMod(m) => Ring::integers_mod(*m).map_err(|e| e.to_string())?,
            RingDesc::GaussianRationals => Ring::gaussian_rationals(),
            RingDesc::Matrix { size, base } => Ring::matrix_ring(*size, base.build()?).map_err(|e| e.to_string())?,
            RingDesc::Group { group, base } => Ring::group_ring(group.build()?, base.build()?).map_err(|e| e.to_string())?,
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            RingDesc::Rationals => json!({"kind": "rationals"}),
            RingDesc::Integers => json!({"kind": "integers"}),
            RingDesc::IntegersMod(m) => json!({"kind": "integers-mod", "modulus": m}),
            RingDesc::GaussianRationals => json!({"kind": "gaussian-rationals"}),
            RingDesc::Matrix { size, base } => json!({"kind": "matrix-ring", "size": size, "base": base.to_json()}),
            RingDesc::Group { group, base } => json!({"kind": "group-ring", "group": group.to_json(), "base": base.to_json()}),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProblemOptions {
    pub verify: bool,
}

/// A validated problem file.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub ring: RingDesc,
    pub ctx: Ctx,
    pub precision: i64,
    pub flavor: Flavor,
    pub matrix: Option<TwistedMatrix>,
    pub inverse: Option<TwistedMatrix>,
    pub options: ProblemOptions,
}

impl PartialEq for ProblemFile {
    fn eq(&self, other: &ProblemFile) -> bool {
        self.ring == other.ring
            && self.ctx.rho.kind() == other.ctx.rho.kind()
            && self.precision == other.precision
            && self.flavor == other.flavor
            && self.matrix == other.matrix
            && self.inverse == other.inverse
            && self.options == other.options
    }
}

fn obj<'a>(v: &'a Value, pointer: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let m = v.as_object().ok_or_else(|| schema(pointer, "expected an object"))?;
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(schema(&child(pointer, k), "unexpected key"));
    }
    Ok(m)
}

fn field<'a>(m: &'a Map<String, Value>, pointer: &str, key: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| schema(pointer, format!("missing key {key:?}")))
}

fn as_str<'a>(v: &'a Value, pointer: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(pointer, "expected a string"))
}

fn as_usize(v: &Value, pointer: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| schema(pointer, "expected a nonnegative integer"))
}

fn as_i64(v: &Value, pointer: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(pointer, "expected an integer"))
}

fn as_array<'a>(v: &'a Value, pointer: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(pointer, "expected an array"))
}

fn kind_of<'a>(m: &'a Map<String, Value>, pointer: &str) -> Result<&'a str> {
    as_str(field(m, pointer, "kind")?, &child(pointer, "kind"))
}

fn parse_group(v: &Value, pointer: &str) -> Result<GroupDesc> {
    let m = v.as_object().ok_or_else(|| schema(pointer, "expected an object"))?;
    match kind_of(m, pointer)? {
        "symmetric3" => {
            obj(v, pointer, &["kind"])?;
            Ok(GroupDesc::Symmetric3)
        }
        "cyclic" => {
            obj(v, pointer, &["kind", "order"])?;
            let p = child(pointer, "order");
            let n = as_usize(field(m, pointer, "order")?, &p)?;
            if n == 0 {
                return Err(schema(&p, "group order must be positive"));
            }
            Ok(GroupDesc::Cyclic(n))
        }
        "table" => {
            obj(v, pointer, &["kind", "elements", "table"])?;
            let pe = child(pointer, "elements");
            let names = as_array(field(m, pointer, "elements")?, &pe)?
                .iter()
                .enumerate()
                .map(|(i, x)| as_str(x, &child(&pe, i)).map(str::to_string))
                .collect::<Result<Vec<_>>>()?;
            let pt = child(pointer, "table");
            let table = as_array(field(m, pointer, "table")?, &pt)?
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let pr = child(&pt, i);
                    as_array(row, &pr)?
                        .iter()
                        .enumerate()
                        .map(|(j, x)| as_usize(x, &child(&pr, j)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GroupDesc::Table { names, table })
        }
        other => Err(ProblemError::UnknownKind {
            pointer: child(pointer, "kind"),
            what: "group kind",
            kind: other.to_string(),
        }),
    }
}

pub fn parse_ring(v: &Value, pointer: &str) -> Result<RingDesc> {
    let m = v.as_object().ok_or_else(|| schema(pointer, "expected an object"))?;
    let desc = match kind_of(m, pointer)? {
        "rationals" => {
            obj(v, pointer, &["kind"])?;
            RingDesc::Rationals
        }
        "integers" => {
            obj(v, pointer, &["kind"])?;
            RingDesc::Integers
        }
        "integers-mod" => {
            obj(v, pointer, &["kind", "modulus"])?;
            let p = child(pointer, "modulus");
            let n = field(m, pointer, "modulus")?.as_u64().ok_or_else(|| schema(&p, "expected a positive integer"))?;
            RingDesc::IntegersMod(n)
        }
        "gaussian-rationals" => {
            obj(v, pointer, &["kind"])?;
            RingDesc::GaussianRationals
        }
        "matrix-ring" => {
            obj(v, pointer, &["kind", "size", "base"])?;
            let size = as_usize(field(m, pointer, "size")?, &child(pointer, "size"))?;
            let base = parse_ring(field(m, pointer, "base")?, &child(pointer, "base"))?;
            RingDesc::Matrix { size, base: Box::new(base) }
        }
        "group-ring" => {
            obj(v, pointer, &["kind", "group", "base"])?;
            let group = parse_group(field(m, pointer, "group")?, &child(pointer, "group"))?;
            let base = parse_ring(field(m, pointer, "base")?, &child(pointer, "base"))?;
            RingDesc::Group { group, base: Box::new(base) }
        }
        other => {
            return Err(ProblemError::UnknownKind {
                pointer: child(pointer, "kind"),
                what: "ring kind",
                kind: other.to_string(),
            })
        }
    };
    desc.build().map_err(|e| schema(pointer, e))?;
    Ok(desc)
}

fn parse_rational(v: &Value, pointer: &str) -> Result<BigRational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(BigInt::from(i)))
            .ok_or_else(|| schema(pointer, "expected an integer or a \"p/q\" string")),
        Value::String(s) => BigRational::from_str(s.trim()).map_err(|_| schema(pointer, format!("{s:?} is not a rational \"p/q\""))),
        _ => Err(schema(pointer, "expected an integer or a \"p/q\" string")),
    }
}

/// `"i"`, `"-i"`, `"3/2i"` or a plain rational.
fn parse_gauss_str(s: &str, pointer: &str) -> Result<(BigRational, BigRational)> {
    let s = s.trim();
    let zero = BigRational::from_integer(BigInt::from(0));
    let bad = || schema(pointer, format!("{s:?} is not a Gaussian rational"));
    if let Some(head) = s.strip_suffix('i') {
        let im = match head.trim() {
            "" | "+" => BigRational::from_integer(BigInt::from(1)),
            "-" => BigRational::from_integer(BigInt::from(-1)),
            h => BigRational::from_str(h.trim_end_matches('*')).map_err(|_| bad())?,
        };
        Ok((zero, im))
    } else {
        Ok((BigRational::from_str(s).map_err(|_| bad())?, zero))
    }
}

pub fn parse_elem(ring: &Ring, v: &Value, pointer: &str) -> Result<Elem> {
    let e = match ring.kind() {
        RingKind::Rationals => Elem::Q(parse_rational(v, pointer)?),
        RingKind::Integers => {
            let q = parse_rational(v, pointer)?;
            if !q.is_integer() {
                return Err(schema(pointer, "expected an integer"));
            }
            Elem::Z(q.to_integer())
        }
        RingKind::IntegersMod(_) => {
            let q = parse_rational(v, pointer)?;
            if !q.is_integer() {
                return Err(schema(pointer, "expected an integer residue"));
            }
            ring.from_rational(&q).map_err(|e| schema(pointer, e.to_string()))?
        }
        RingKind::GaussianRationals => match v {
            Value::Array(pair) if pair.len() == 2 => {
                Elem::Gauss(parse_rational(&pair[0], &child(pointer, 0))?, parse_rational(&pair[1], &child(pointer, 1))?)
            }
            Value::String(s) => {
                let (re, im) = parse_gauss_str(s, pointer)?;
                Elem::Gauss(re, im)
            }
            Value::Number(_) => Elem::Gauss(parse_rational(v, pointer)?, BigRational::from_integer(BigInt::from(0))),
            _ => return Err(schema(pointer, "expected [\"re\", \"im\"] or a string like \"3/2i\"")),
        },
        RingKind::MatrixRing { size, base } => {
            let rows = as_array(v, pointer)?;
            if rows.len() != *size {
                return Err(schema(pointer, format!("expected {size} rows")));
            }
            let mut grid = Vec::with_capacity(size * size);
            for (i, row) in rows.iter().enumerate() {
                let pr = child(pointer, i);
                let row = as_array(row, &pr)?;
                if row.len() != *size {
                    return Err(schema(&pr, format!("expected {size} entries")));
                }
                for (j, x) in row.iter().enumerate() {
                    grid.push(parse_elem(base, x, &child(&pr, j))?);
                }
            }
            Elem::Mat(grid)
        }
        RingKind::GroupRing { group, base } => {
            let m = v.as_object().ok_or_else(|| schema(pointer, "expected an object mapping group elements to coefficients"))?;
            let mut out = BTreeMap::new();
            for (name, c) in m {
                let p = child(pointer, name);
                let g = group.index_of(name).ok_or_else(|| ProblemError::UnknownKind {
                    pointer: p.clone(),
                    what: "group element",
                    kind: name.clone(),
                })?;
                let c = parse_elem(base, c, &p)?;
                if !base.is_zero(&c) {
                    out.insert(g, c);
                }
            }
            Elem::Grp(out)
        }
    };
    if !ring.contains(&e) {
        return Err(schema(pointer, format!("not an element of {ring}")));
    }
    Ok(e)
}

pub fn elem_to_json(ring: &Ring, e: &Elem) -> Value {
    match (ring.kind(), e) {
        (_, Elem::Q(q)) => Value::String(q.to_string()),
        (_, Elem::Z(n)) => Value::String(n.to_string()),
        (_, Elem::Mod(r)) => json!(r),
        (_, Elem::Gauss(a, b)) => json!([a.to_string(), b.to_string()]),
        (RingKind::MatrixRing { size, base }, Elem::Mat(grid)) => Value::Array(
            grid.chunks(*size)
                .map(|row| Value::Array(row.iter().map(|x| elem_to_json(base, x)).collect()))
                .collect(),
        ),
        (RingKind::GroupRing { group, base }, Elem::Grp(m)) => {
            Value::Object(m.iter().map(|(g, c)| (group.name(*g).to_string(), elem_to_json(base, c))).collect())
        }
        _ => Value::Null,
    }
}

pub fn parse_automorphism(ring: &Ring, v: &Value, pointer: &str) -> Result<Automorphism> {
    let m = v.as_object().ok_or_else(|| schema(pointer, "expected an object"))?;
    let kind = match kind_of(m, pointer)? {
        "identity" => {
            obj(v, pointer, &["kind"])?;
            AutoKind::Identity
        }
        "complex-conjugation" => {
            obj(v, pointer, &["kind"])?;
            AutoKind::ComplexConjugation
        }
        "conjugation" => {
            obj(v, pointer, &["kind", "unit"])?;
            AutoKind::ConjugationByUnit(parse_elem(ring, field(m, pointer, "unit")?, &child(pointer, "unit"))?)
        }
        "group-automorphism" => {
            obj(v, pointer, &["kind", "map"])?;
            let RingKind::GroupRing { group, .. } = ring.kind() else {
                return Err(schema(pointer, "group automorphisms need a group ring"));
            };
            let pm = child(pointer, "map");
            let map = field(m, pointer, "map")?.as_object().ok_or_else(|| schema(&pm, "expected an object"))?;
            let mut perm: Vec<usize> = (0..group.order()).collect();
            for (from, to) in map {
                let p = child(&pm, from);
                let unknown = |name: &str| ProblemError::UnknownKind {
                    pointer: p.clone(),
                    what: "group element",
                    kind: name.to_string(),
                };
                let a = group.index_of(from).ok_or_else(|| unknown(from))?;
                let to = as_str(to, &p)?;
                perm[a] = group.index_of(to).ok_or_else(|| unknown(to))?;
            }
            AutoKind::GroupAutomorphism(perm)
        }
        other => {
            return Err(ProblemError::UnknownKind {
                pointer: child(pointer, "kind"),
                what: "automorphism kind",
                kind: other.to_string(),
            })
        }
    };
    Automorphism::new(ring, kind).map_err(|e| schema(pointer, e.to_string()))
}

pub fn automorphism_to_json(ring: &Ring, rho: &Automorphism) -> Value {
    match rho.kind() {
        AutoKind::Identity => json!({"kind": "identity"}),
        AutoKind::ComplexConjugation => json!({"kind": "complex-conjugation"}),
        AutoKind::ConjugationByUnit(u) => json!({"kind": "conjugation", "unit": elem_to_json(ring, u)}),
        AutoKind::GroupAutomorphism(perm) => {
            let map: Map<String, Value> = match ring.kind() {
                RingKind::GroupRing { group, .. } => perm
                    .iter()
                    .enumerate()
                    .map(|(a, b)| (group.name(a).to_string(), Value::String(group.name(*b).to_string())))
                    .collect(),
                _ => Map::new(),
            };
            json!({"kind": "group-automorphism", "map": map})
        }
    }
}

fn parse_prec(v: Option<&Value>, pointer: &str) -> Result<Prec> {
    match v {
        None | Some(Value::Null) => Ok(Prec::Infinite),
        Some(x) => {
            let n = as_i64(x, pointer)?;
            Ok(Prec::Finite(n))
        }
    }
}

/// `{"terms": [[degree, coeff], …], "precision"?, "side"?, "flavor"?}`.
pub fn parse_series(ctx: &Ctx, flavor: Flavor, v: &Value, pointer: &str) -> Result<Series> {
    let m = obj(v, pointer, &["terms", "precision", "side", "flavor"])?;
    let flavor = match m.get("flavor") {
        None => flavor,
        Some(f) => {
            let p = child(pointer, "flavor");
            let name = as_str(f, &p)?;
            let own = Flavor::from_name(name).ok_or_else(|| ProblemError::UnknownKind {
                pointer: p.clone(),
                what: "flavor",
                kind: name.to_string(),
            })?;
            if own.join(flavor) != flavor {
                return Err(schema(&p, format!("a {name} entry does not fit a {} matrix", flavor.name())));
            }
            flavor
        }
    };
    let side = match m.get("side").map(|s| as_str(s, &child(pointer, "side"))).transpose()? {
        None | Some("right") => Side::Right,
        Some("left") => Side::Left,
        Some(other) => {
            return Err(ProblemError::UnknownKind {
                pointer: child(pointer, "side"),
                what: "side",
                kind: other.to_string(),
            })
        }
    };
    let prec = parse_prec(m.get("precision"), &child(pointer, "precision"))?;
    if prec != Prec::Infinite && flavor.is_exact() {
        return Err(schema(&child(pointer, "precision"), format!("{} entries are exact", flavor.name())));
    }
    let pt = child(pointer, "terms");
    let mut terms = Vec::new();
    for (i, t) in as_array(field(m, pointer, "terms")?, &pt)?.iter().enumerate() {
        let p = child(&pt, i);
        let pair = as_array(t, &p)?;
        if pair.len() != 2 {
            return Err(schema(&p, "expected [degree, coefficient]"));
        }
        let d = as_i64(&pair[0], &child(&p, 0))?;
        if d < 0 && !flavor.allows_negative() {
            return Err(schema(&child(&p, 0), format!("negative degree in a {} entry", flavor.name())));
        }
        if let Prec::Finite(n) = prec {
            if d >= n {
                return Err(schema(&child(&p, 0), format!("degree {d} lies beyond the stated precision {n}")));
            }
        }
        terms.push((side, d, parse_elem(&ctx.ring, &pair[1], &child(&p, 1))?));
    }
    Series::from_terms(ctx, flavor, prec, &terms).map_err(|e| schema(pointer, e.to_string()))
}

pub fn series_to_json(s: &Series) -> Value {
    let ring = s.ring();
    let terms: Vec<Value> = s.terms().map(|(d, c)| json!([d, elem_to_json(ring, c)])).collect();
    let mut m = Map::new();
    m.insert("terms".into(), Value::Array(terms));
    if let Prec::Finite(n) = s.prec() {
        m.insert("precision".into(), json!(n));
    }
    Value::Object(m)
}

/// Array of rows of series literals.
pub fn parse_matrix(ctx: &Ctx, flavor: Flavor, v: &Value, pointer: &str) -> Result<TwistedMatrix> {
    let rows = as_array(v, pointer)?;
    if rows.is_empty() {
        return Err(schema(pointer, "matrix needs at least one row"));
    }
    let mut grid = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let pr = child(pointer, i);
        let row = as_array(row, &pr)?;
        grid.push(
            row.iter()
                .enumerate()
                .map(|(j, x)| parse_series(ctx, flavor, x, &child(&pr, j)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let cols = grid[0].len();
    if let Some(i) = grid.iter().position(|r| r.len() != cols) {
        return Err(schema(&child(pointer, i), format!("expected {cols} entries")));
    }
    let m = TwistedMatrix::from_entries(ctx, flavor, grid.len(), cols, &grid).map_err(|e| schema(pointer, e.to_string()))?;
    if m.flavor() != flavor {
        return Err(schema(pointer, format!("finite-precision entries need an inexact flavor, not {}", flavor.name())));
    }
    Ok(m)
}

pub fn matrix_to_json(m: &TwistedMatrix) -> Value {
    Value::Array(
        m.entries()
            .iter()
            .map(|row| Value::Array(row.iter().map(series_to_json).collect()))
            .collect(),
    )
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| ProblemError::Json(e.to_string()))?;
    problem_from_value(&v)
}

pub fn problem_from_value(v: &Value) -> Result<ProblemFile> {
    let m = obj(v, "", &["ring", "automorphism", "precision", "flavor", "matrix", "inverse", "options"])?;
    let ring = parse_ring(field(m, "", "ring")?, "/ring")?;
    let r = ring.build().map_err(|e| schema("/ring", e))?;
    let rho = match m.get("automorphism") {
        Some(a) => parse_automorphism(&r, a, "/automorphism")?,
        None => Automorphism::identity(&r),
    };
    let ctx = Ctx::new(r, rho).map_err(|e| schema("/automorphism", e.to_string()))?;
    let precision = as_i64(field(m, "", "precision")?, "/precision")?;
    if precision < MIN_PRECISION {
        return Err(ProblemError::Precision {
            pointer: "/precision".into(),
            message: format!("precision {precision} is below the minimum {MIN_PRECISION}"),
        });
    }
    let fname = as_str(field(m, "", "flavor")?, "/flavor")?;
    let flavor = Flavor::from_name(fname).ok_or_else(|| ProblemError::UnknownKind {
        pointer: "/flavor".into(),
        what: "flavor",
        kind: fname.to_string(),
    })?;
    let matrix = m.get("matrix").map(|x| parse_matrix(&ctx, flavor, x, "/matrix")).transpose()?;
    let inverse = m.get("inverse").map(|x| parse_matrix(&ctx, flavor, x, "/inverse")).transpose()?;
    if let (Some(a), Some(b)) = (&matrix, &inverse) {
        if !a.is_square() || a.rows() != b.rows() || b.rows() != b.cols() {
            return Err(schema("/inverse", "matrix and inverse must be square of the same size"));
        }
    } else if matrix.is_none() && inverse.is_some() {
        return Err(schema("", "inverse given without a matrix"));
    }
    let options = match m.get("options") {
        None => ProblemOptions::default(),
        Some(o) => {
            let om = obj(o, "/options", &["verify"])?;
            let verify = match om.get("verify") {
                None => false,
                Some(b) => b.as_bool().ok_or_else(|| schema("/options/verify", "expected a boolean"))?,
            };
            ProblemOptions { verify }
        }
    };
    Ok(ProblemFile {
        ring,
        ctx,
        precision,
        flavor,
        matrix,
        inverse,
        options,
    })
}

impl ProblemFile {
    /// Canonical JSON form: right-coefficient terms, identity automorphism
    /// written out, options always present.
    pub fn to_json(&self) -> Value {
        let r = &self.ctx.ring;
        let mut m = Map::new();
        m.insert("ring".into(), self.ring.to_json());
        m.insert("automorphism".into(), automorphism_to_json(r, &self.ctx.rho));
        m.insert("precision".into(), json!(self.precision));
        m.insert("flavor".into(), json!(self.flavor.name()));
        if let Some(a) = &self.matrix {
            m.insert("matrix".into(), matrix_to_json(a));
        }
        if let Some(b) = &self.inverse {
            m.insert("inverse".into(), matrix_to_json(b));
        }
        m.insert("options".into(), json!({"verify": self.options.verify}));
        Value::Object(m)
    }

    pub fn to_canonical_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize")
    }

    pub fn matrix(&self) -> Result<&TwistedMatrix> {
        self.matrix.as_ref().ok_or_else(|| schema("", "missing key \"matrix\""))
    }

    /// `(k, ℓ)` from the lowest degrees of the matrix and inverse literals.
    pub fn window(&self) -> Option<(i64, i64)> {
        let a = self.matrix.as_ref()?;
        let b = self.inverse.as_ref()?;
        Some((lower_bound(a), lower_bound(b)))
    }

    /// Precision must cover the cokernel window plus two.
    pub fn check_novikov_precision(&self, pair: &InvertiblePair) -> Result<()> {
        let (k, l) = (lower_bound(&pair.alpha), lower_bound(&pair.beta));
        if self.precision < k + l + 2 {
            return Err(ProblemError::Precision {
                pointer: "/precision".into(),
                message: format!("precision {} is below k+ℓ+2 = {}", self.precision, k + l + 2),
            });
        }
        Ok(())
    }
}
