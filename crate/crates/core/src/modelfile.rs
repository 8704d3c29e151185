//! TOML model files: `[lie]`, `[algebra]`, `[connection]`, `[model]` and
//! `[task]` sections.
//!
//! Printing goes through the same serde types, so `print(parse(text))`
//! reproduces a canonical file byte for byte.

use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::chern::{product_instance, rotation_instance};
use crate::diffcoh::{self, CupTable, GeometricModel, Homotopy, ModelData};
use crate::exactlin::{IntMatrix, RationalMatrix, Q};
use crate::gca::{parse_element, Derivation, Element, GcaError, Generator, GradedAlgebra};
use crate::gstar::{build_weil, chevalley_eilenberg, weil_tensor, ConnectionElement, GStarAlgebra};
use crate::liealg::{validate_lie, LieAlgebra};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelFileError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, column: usize, name: String },
    #[error("{line}:{column}: degree mismatch: {message}")]
    DegreeMismatch { line: usize, column: usize, message: String },
    #[error("{line}:{column}: {message}")]
    Invalid { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie: Option<LieSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieSection {
    pub name: String,
    /// `u1`, `r2`, `su2`, `u2` or `heisenberg3`; supplies the defining
    /// representation. Listed brackets must agree with it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<String>,
    /// `[e_i, e_j]` has coefficient `coeff` on `e_k`; indices from 1.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<Bracket>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bracket {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Spanned<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    /// `weil`, `chevalley-eilenberg`, `custom`, `weil-tensor`, `rotation`
    /// or `product`.
    pub kind: Spanned<String>,
    /// Second summand of `product`, by builtin name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
    /// Truncation of degree-zero generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub degree: u32,
    pub d: Spanned<String>,
    /// One image per Lie algebra basis vector.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iota: Vec<Spanned<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSection {
    /// First basis vector of the connection's Lie algebra block.
    #[serde(default)]
    pub offset: usize,
    pub components: Vec<Spanned<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// `cp`, `rp`, `lens`, `point` or `raw`.
    pub kind: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// `circle`, `point` or `point-finite`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forms: Option<String>,
    /// `zero` or `abstract`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homotopy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<Vec<String>>,
    /// `delta[k]` as a list of rows.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<Vec<Vec<i64>>>,
    /// `j[n]` as a list of rows of rationals.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub j: Vec<Vec<Vec<Spanned<String>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cup: Vec<CupEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CupEntry {
    pub left: [usize; 2],
    pub right: [usize; 2],
    pub value: Vec<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    /// One-based basis indices for the injectivity witness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
}

/// The validated object graph of a model file.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub file: ModelFile,
    pub lie: Option<Arc<LieAlgebra>>,
    pub gstar: Option<GStarAlgebra>,
    pub connection: Option<ConnectionElement>,
    pub geometric: Option<GeometricModel>,
}

pub fn parse_model(text: &str) -> Result<ModelFile, ModelFileError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ModelFileError::Syntax { line, column, message: e.message().to_string() }
    })
}

/// Canonical text of a model file.
pub fn print_model(file: &ModelFile) -> String {
    toml::to_string(file).expect("model files always serialize")
}

/// Parse and build every section present.
pub fn load(text: &str) -> Result<Loaded, ModelFileError> {
    let file = parse_model(text)?;
    build(file, text)
}

pub fn builtin_lie(name: &str) -> Option<LieAlgebra> {
    Some(match name {
        "u1" => LieAlgebra::u1(),
        "r2" => LieAlgebra::r2(),
        "su2" => LieAlgebra::su2(),
        "u2" => LieAlgebra::u2(),
        "heisenberg3" => LieAlgebra::heisenberg3(),
        _ => return None,
    })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn at(&self, span: Range<usize>, message: impl Into<String>) -> ModelFileError {
        let (line, column) = line_column(self.text, span.start);
        ModelFileError::Invalid { line, column, message: message.into() }
    }

    /// Parse a spanned expression, mapping positions into the file.
    fn element(&self, alg: &Arc<GradedAlgebra>, s: &Spanned<String>) -> Result<Element, ModelFileError> {
        // The span covers the quotes of a basic string.
        let base = s.span().start + 1;
        parse_element(alg, s.get_ref()).map_err(|e| match e {
            GcaError::UnknownGenerator { name, pos } => {
                let (line, column) = line_column(self.text, base + pos);
                ModelFileError::UnknownGenerator { line, column, name }
            }
            GcaError::Parse { pos, message } => {
                let (line, column) = line_column(self.text, base + pos);
                ModelFileError::Syntax { line, column, message }
            }
            other => self.at(s.span(), other.to_string()),
        })
    }

    fn rational(&self, s: &Spanned<String>) -> Result<Q, ModelFileError> {
        let t = s.get_ref().trim();
        let parsed = match t.split_once('/') {
            Some((n, d)) => n.trim().parse::<BigInt>().ok().zip(d.trim().parse::<BigInt>().ok()).filter(|(_, d)| *d != BigInt::from(0)).map(|(n, d)| Q::new(n, d)),
            None => t.parse::<BigInt>().ok().map(Q::from_integer),
        };
        parsed.ok_or_else(|| {
            let (line, column) = line_column(self.text, s.span().start);
            ModelFileError::Syntax { line, column, message: format!("expected a rational number, found `{t}`") }
        })
    }
}

fn semantic(e: impl std::fmt::Display) -> ModelFileError {
    ModelFileError::Semantic(e.to_string())
}

pub fn build(file: ModelFile, text: &str) -> Result<Loaded, ModelFileError> {
    let ctx = Ctx { text };
    let lie = file.lie.as_ref().map(|l| build_lie(&ctx, l)).transpose()?.map(Arc::new);
    let (gstar, default_conn) = match &file.algebra {
        Some(a) => {
            let (g, c) = build_algebra(&ctx, a, lie.as_deref())?;
            (Some(g), c)
        }
        None => (None, None),
    };
    let connection = match (&file.connection, &gstar) {
        (Some(c), Some(g)) => Some(build_connection(&ctx, c, g)?),
        (Some(_), None) => return Err(semantic("[connection] needs an [algebra] section")),
        (None, _) => default_conn,
    };
    let geometric = file.model.as_ref().map(|m| build_geometric(&ctx, m)).transpose()?;
    Ok(Loaded { file, lie, gstar, connection, geometric })
}

fn build_lie(ctx: &Ctx<'_>, l: &LieSection) -> Result<LieAlgebra, ModelFileError> {
    let listed = if l.basis.is_empty() {
        None
    } else {
        let n = l.basis.len();
        let mut entries = Vec::new();
        for b in &l.brackets {
            if [b.i, b.j, b.k].iter().any(|&x| x == 0 || x > n) {
                return Err(ctx.at(b.coeff.span(), format!("bracket index out of range 1..={n}")));
            }
            entries.push((b.k - 1, b.i - 1, b.j - 1, ctx.rational(&b.coeff)?));
        }
        Some(LieAlgebra::from_brackets(&l.name, l.basis.clone(), &entries))
    };
    let g = match (&l.builtin, listed) {
        (Some(name), listed) => {
            let mut g = builtin_lie(name).ok_or_else(|| semantic(format!("unknown builtin Lie algebra `{name}`")))?;
            if let Some(listed) = listed {
                if listed.structure() != g.structure() {
                    return Err(semantic(format!("listed brackets disagree with builtin `{name}`")));
                }
                g.basis_names = listed.basis_names;
            }
            g.name = l.name.clone();
            g
        }
        (None, Some(listed)) => listed,
        (None, None) => return Err(semantic("[lie] needs `builtin` or `basis`")),
    };
    let report = validate_lie(&g);
    if !report.is_ok() {
        return Err(semantic(format!("[lie] is not a Lie algebra: {report}")));
    }
    Ok(g)
}

fn build_algebra(
    ctx: &Ctx<'_>,
    a: &AlgebraSection,
    lie: Option<&LieAlgebra>,
) -> Result<(GStarAlgebra, Option<ConnectionElement>), ModelFileError> {
    let need_lie = || lie.ok_or_else(|| semantic(format!("algebra kind `{}` needs a [lie] section", a.kind.get_ref())));
    match a.kind.get_ref().as_str() {
        "weil" => {
            let (w, c) = build_weil(need_lie()?).map_err(semantic)?;
            Ok((w, Some(c)))
        }
        "chevalley-eilenberg" => {
            let (w, c) = chevalley_eilenberg(need_lie()?).map_err(semantic)?;
            Ok((w, Some(c)))
        }
        "custom" => Ok((build_custom(ctx, a, need_lie()?)?, None)),
        "weil-tensor" => {
            let inner = build_custom(ctx, a, need_lie()?)?;
            let w = weil_tensor(&inner).map_err(semantic)?;
            let g = Arc::new(need_lie()?.clone());
            let comps = (0..g.dim()).map(|i| Element::generator(&w.carrier, i)).collect();
            Ok((w, Some(ConnectionElement::new(g, 0, comps))))
        }
        "rotation" => {
            let (a, c) = rotation_instance().map_err(semantic)?;
            Ok((a, Some(c)))
        }
        "product" => {
            let partner = a.partner.as_deref().ok_or_else(|| semantic("algebra kind `product` needs `partner`"))?;
            let k = builtin_lie(partner).ok_or_else(|| semantic(format!("unknown builtin Lie algebra `{partner}`")))?;
            let (a, c) = product_instance(need_lie()?, &k).map_err(semantic)?;
            Ok((a, Some(c)))
        }
        other => Err(ctx.at(a.kind.span(), format!("unknown algebra kind `{other}`"))),
    }
}

fn build_custom(ctx: &Ctx<'_>, a: &AlgebraSection, lie: &LieAlgebra) -> Result<GStarAlgebra, ModelFileError> {
    let gens = a.generators.iter().map(|g| Generator::new(&g.name, g.degree)).collect();
    let alg = GradedAlgebra::with_cap("A", gens, a.cap).map_err(semantic)?;
    let mut d_images = Vec::new();
    let mut iota_images = vec![Vec::new(); lie.dim()];
    for g in &a.generators {
        let dx = ctx.element(&alg, &g.d)?;
        if !dx.is_zero() && dx.homogeneous_degree() != Some(g.degree + 1) {
            let (line, column) = line_column(ctx.text, g.d.span().start);
            return Err(ModelFileError::DegreeMismatch { line, column, message: format!("d({}) must have degree {}", g.name, g.degree + 1) });
        }
        d_images.push(dx);
        if !g.iota.is_empty() && g.iota.len() != lie.dim() {
            return Err(semantic(format!("generator `{}` lists {} contractions, expected {}", g.name, g.iota.len(), lie.dim())));
        }
        for (x, slot) in iota_images.iter_mut().enumerate() {
            let img = match g.iota.get(x) {
                Some(s) => {
                    let y = ctx.element(&alg, s)?;
                    if !y.is_zero() && (g.degree == 0 || y.homogeneous_degree() != Some(g.degree - 1)) {
                        let (line, column) = line_column(ctx.text, s.span().start);
                        return Err(ModelFileError::DegreeMismatch {
                            line,
                            column,
                            message: format!("ι_{}({}) must have degree {}", x + 1, g.name, g.degree as i64 - 1),
                        });
                    }
                    y
                }
                None => Element::zero(&alg),
            };
            slot.push(img);
        }
    }
    let d = Derivation::new(&alg, 1, d_images).map_err(semantic)?;
    let iota = iota_images.into_iter().map(|im| Derivation::new(&alg, -1, im)).collect::<Result<Vec<_>, _>>().map_err(semantic)?;
    GStarAlgebra::new("A", Arc::new(lie.clone()), d, iota, None, Vec::new()).map_err(semantic)
}

fn build_connection(ctx: &Ctx<'_>, c: &ConnectionSection, a: &GStarAlgebra) -> Result<ConnectionElement, ModelFileError> {
    if c.offset + c.components.len() > a.dim() {
        return Err(semantic("connection block does not fit in the Lie algebra"));
    }
    let comps = c.components.iter().map(|s| ctx.element(&a.carrier, s)).collect::<Result<Vec<_>, _>>()?;
    let k = if c.offset == 0 && c.components.len() == a.dim() {
        a.lie.as_ref().clone()
    } else {
        a.lie.block(&format!("{}|k", a.lie.name), c.offset, c.components.len())
    };
    Ok(ConnectionElement::new(Arc::new(k), c.offset, comps))
}

fn build_geometric(ctx: &Ctx<'_>, m: &ModelSection) -> Result<GeometricModel, ModelFileError> {
    let need_n = || m.n.ok_or_else(|| semantic(format!("model kind `{}` needs `n`", m.kind.get_ref())));
    let out = match m.kind.get_ref().as_str() {
        "cp" => diffcoh::cp(need_n()?),
        "rp" => diffcoh::rp(need_n()?),
        "lens" => diffcoh::lens(m.order.ok_or_else(|| semantic("model kind `lens` needs `order`"))?, need_n()?),
        "point" => diffcoh::point(),
        "raw" => return build_raw(ctx, m),
        other => return Err(ctx.at(m.kind.span(), format!("unknown model kind `{other}`"))),
    };
    out.map_err(semantic)
}

fn build_raw(ctx: &Ctx<'_>, m: &ModelSection) -> Result<GeometricModel, ModelFileError> {
    let rank = |k: usize| m.cells.get(k).map_or(0, Vec::len);
    let top = m.cells.len().saturating_sub(1);
    let mut delta = Vec::new();
    for (k, rows) in m.delta.iter().enumerate() {
        let data: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        if data.len() != rank(k + 1) || data.iter().any(|r| r.len() != rank(k)) {
            return Err(semantic(format!("delta[{k}] must be {}×{}", rank(k + 1), rank(k))));
        }
        delta.push(IntMatrix::from_rows(rank(k + 1), rank(k), data));
    }
    let forms = match m.forms.as_deref().unwrap_or("point") {
        "circle" => diffcoh::circle_forms(top),
        "point" => diffcoh::point_forms(false),
        "point-finite" => diffcoh::point_forms(true),
        other => return Err(semantic(format!("unknown forms complex `{other}`"))),
    }
    .map_err(semantic)?;
    let mut j = Vec::new();
    for (n, rows) in m.j.iter().enumerate() {
        let mut mat = RationalMatrix::zeros(rank(n), forms.dim(n));
        if rows.len() != rank(n) || rows.iter().any(|r| r.len() != forms.dim(n)) {
            return Err(semantic(format!("j[{n}] must be {}×{}", rank(n), forms.dim(n))));
        }
        for (i, r) in rows.iter().enumerate() {
            for (c, s) in r.iter().enumerate() {
                mat.set(i, c, ctx.rational(s)?);
            }
        }
        j.push(mat);
    }
    let cup = if m.cup.is_empty() {
        None
    } else {
        let mut t = CupTable::new();
        for e in &m.cup {
            t.insert((e.left[0], e.left[1], e.right[0], e.right[1]), e.value.iter().map(|&x| BigInt::from(x)).collect());
        }
        Some(t)
    };
    let homotopy = match m.homotopy.as_deref().unwrap_or("abstract") {
        "zero" => Homotopy::Zero,
        "abstract" => Homotopy::Abstract,
        other => return Err(semantic(format!("unknown homotopy `{other}`"))),
    };
    GeometricModel::new(ModelData {
        name: m.name.clone().unwrap_or_else(|| "raw".into()),
        group: m.group.clone().unwrap_or_else(|| "unspecified".into()),
        cells: m.cells.clone(),
        delta,
        cup,
        forms,
        j,
        homotopy,
        complete: m.complete.unwrap_or(false),
        normalization: "as given".into(),
    })
    .map_err(semantic)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SU2: &str = r#"[lie]
name = "su2"
builtin = "su2"
basis = ["e1", "e2", "e3"]

[[lie.brackets]]
i = 1
j = 2
k = 3
coeff = "1"

[[lie.brackets]]
i = 2
j = 3
k = 1
coeff = "1"

[[lie.brackets]]
i = 3
j = 1
k = 2
coeff = "1"

[algebra]
kind = "weil"
"#;

    #[test]
    fn builtin_su2_stub_loads() {
        let l = load(SU2).unwrap();
        assert_eq!(l.lie.unwrap().dim(), 3);
        assert_eq!(l.connection.unwrap().components.len(), 3);
    }

    #[test]
    fn canonical_round_trip() {
        let f = parse_model(SU2).unwrap();
        assert_eq!(print_model(&f), SU2);
        assert_eq!(parse_model(&print_model(&f)).unwrap(), f);
    }

    #[test]
    fn unknown_generator_is_located() {
        let text = "[lie]\nname = \"u1\"\nbuiltin = \"u1\"\n\n[algebra]\nkind = \"custom\"\n\n[[algebra.generators]]\nname = \"x\"\ndegree = 1\nd = \"2*y\"\n";
        match load(text) {
            Err(ModelFileError::UnknownGenerator { line, column, name }) => {
                assert_eq!((line, column, name.as_str()), (11, 8, "y"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_are_located() {
        match parse_model("[lie]\nname = \n") {
            Err(ModelFileError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_model("[lie]\nname = \"x\"\nbogus = 1\n"), Err(ModelFileError::Syntax { .. })));
    }

    #[test]
    fn degree_mismatch() {
        let text = "[lie]\nname = \"u1\"\nbuiltin = \"u1\"\n\n[algebra]\nkind = \"custom\"\n\n[[algebra.generators]]\nname = \"x\"\ndegree = 1\nd = \"x\"\n";
        assert!(matches!(load(text), Err(ModelFileError::DegreeMismatch { line: 11, .. })));
    }

    #[test]
    fn brackets_must_match_builtin() {
        let text = SU2.replacen("k = 3\ncoeff = \"1\"", "k = 3\ncoeff = \"2\"", 1);
        assert!(matches!(load(&text), Err(ModelFileError::Semantic(_))));
    }

    #[test]
    fn raw_model_matches_builtin() {
        let text = "[model]\nkind = \"raw\"\nname = \"rp3\"\nforms = \"point-finite\"\ncells = [[\"e0\"], [\"e1\"], [\"e2\"], [\"e3\"]]\ndelta = [[[0]], [[2]], [[0]]]\nj = [[[\"1\"]], [[]], [[]], [[]]]\n";
        let raw = load(text).unwrap().geometric.unwrap();
        let b = diffcoh::rp(3).unwrap();
        for n in 0..=2 {
            assert_eq!(raw.diff_cohomology(n).unwrap().total, b.diff_cohomology(n).unwrap().total);
        }
    }
}
