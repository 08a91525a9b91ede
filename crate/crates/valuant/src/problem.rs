//! Problem files: `[base]`, `[tower]`, `[declare]` and `[query]` sections of `key = value` lines.

use std::collections::BTreeMap;

use valuant_core::tower::{BaseField, DeclaredInvariants, Tower, TowerError};
use valuant_core::{Elem, Field, Poly};

use crate::error::CliError;
use crate::expr::{parse_const, parse_poly, Origin, Scope};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseSpec {
    /// `F_p(residue…)(uniformizer)` with the uniformizer-adic valuation.
    TAdic { char: u32, residue: Option<String>, uniformizer: String },
    PAdic { prime: u32 },
}

/// Facts taken from the input rather than computed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    pub unibranched: Option<bool>,
    pub depth: Option<usize>,
    pub pure: Option<bool>,
    pub distinguished_at_zero: Option<bool>,
    pub tame_degree: Option<u64>,
    pub residue_degree: Option<u64>,
    pub residue_sep_degree: Option<u64>,
}

impl Declarations {
    pub fn invariants(&self) -> DeclaredInvariants {
        DeclaredInvariants {
            depth: self.depth.or(if self.pure == Some(true) { Some(1) } else { None }),
            residue_degree: self.residue_degree,
            residue_sep_degree: self.residue_sep_degree,
            tame_degree: self.tame_degree,
        }
    }

    /// `(name, value)` for every declared fact, in a fixed order.
    pub fn listed(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        push("unibranched", self.unibranched.map(|b| b.to_string()));
        push("depth", self.depth.map(|b| b.to_string()));
        push("pure", self.pure.map(|b| b.to_string()));
        push("distinguished_at_zero", self.distinguished_at_zero.map(|b| b.to_string()));
        push("tame_degree", self.tame_degree.map(|b| b.to_string()));
        push("residue_degree", self.residue_degree.map(|b| b.to_string()));
        push("residue_sep_degree", self.residue_sep_degree.map(|b| b.to_string()));
        out
    }
}

/// One query line: `key=value` tokens; a token without `=` continues the previous value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub line: usize,
    pub args: BTreeMap<String, (String, usize)>,
}

impl Query {
    pub fn cmd(&self) -> &str {
        self.args.get("cmd").map_or("", |a| a.0.as_str())
    }

    pub fn get(&self, key: &str) -> Option<(&str, Origin)> {
        self.args.get(key).map(|(v, c)| (v.as_str(), Origin { line: self.line, column: *c }))
    }
}

/// `name: polynomial` in the `[tower]` section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub name: String,
    pub poly: String,
    pub origin: Origin,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub base: BaseSpec,
    pub levels: Vec<LevelSpec>,
    pub declare: Declarations,
    pub queries: Vec<Query>,
    pub tower: Tower,
    /// Symbols of the base field (uniformizer, residue variable) as base elements.
    pub base_symbols: BTreeMap<String, Elem>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Base,
    Tower,
    Declare,
    Query,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, column, message: message.into() }
}

/// Splits `key = value` (or `key: value`), returning trimmed parts and the value's column.
fn key_value(raw: &str, line: usize, seps: &[char]) -> Result<(String, String, usize), CliError> {
    let Some(at) = raw.find(seps) else {
        return Err(perr(line, 1, "expected `key = value`"));
    };
    let key = raw[..at].trim();
    if key.is_empty() {
        return Err(perr(line, 1, "missing key"));
    }
    let rest = &raw[at + 1..];
    let lead = rest.len() - rest.trim_start().len();
    let column = raw[..at + 1 + lead].chars().count() + 1;
    Ok((key.to_string(), rest.trim().to_string(), column))
}

fn parse_query(raw: &str, line: usize) -> Result<Query, CliError> {
    let mut args: BTreeMap<String, (String, usize)> = BTreeMap::new();
    let mut last: Option<String> = None;
    let mut col = 0usize;
    for piece in raw.split(' ') {
        let start = col + 1;
        col += piece.chars().count() + 1;
        if piece.is_empty() {
            continue;
        }
        match piece.split_once('=') {
            Some((k, v)) if !k.is_empty() => {
                if args.contains_key(k) {
                    return Err(perr(line, start, format!("duplicate key `{k}`")));
                }
                args.insert(k.to_string(), (v.to_string(), start + k.chars().count() + 1));
                last = Some(k.to_string());
            }
            _ => {
                let Some(k) = &last else { return Err(perr(line, start, "expected `key=value`")) };
                let entry = args.get_mut(k).expect("present");
                if !entry.0.is_empty() {
                    entry.0.push(' ');
                }
                entry.0.push_str(piece);
            }
        }
    }
    if !args.contains_key("cmd") {
        return Err(perr(line, 1, "query needs `cmd=`"));
    }
    Ok(Query { line, args })
}

fn parse_flag(v: &str, line: usize, col: usize) -> Result<bool, CliError> {
    match v {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(perr(line, col, format!("expected true or false, found `{v}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(v: &str, line: usize, col: usize) -> Result<T, CliError> {
    v.parse().map_err(|_| perr(line, col, format!("expected a positive integer, found `{v}`")))
}

/// Parses the text and builds the tower (uncertified).
pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    let mut section = Section::None;
    let mut base_kv: BTreeMap<String, (String, usize, usize)> = BTreeMap::new();
    let mut levels = Vec::new();
    let mut declare = Declarations::default();
    let mut queries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') {
            section = match trimmed {
                "[base]" => Section::Base,
                "[tower]" => Section::Tower,
                "[declare]" => Section::Declare,
                "[query]" => Section::Query,
                _ => return Err(perr(line, 1, format!("unknown section `{trimmed}`"))),
            };
            continue;
        }
        match section {
            Section::None => return Err(perr(line, 1, "content before the first section")),
            Section::Base => {
                let (k, v, c) = key_value(content, line, &['='])?;
                base_kv.insert(k, (v, line, c));
            }
            Section::Tower => {
                let (k, v, c) = key_value(content, line, &[':', '='])?;
                levels.push(LevelSpec { name: k, poly: v, origin: Origin { line, column: c } });
            }
            Section::Declare => {
                let (k, v, c) = key_value(content, line, &['='])?;
                match k.as_str() {
                    "unibranched" => declare.unibranched = Some(parse_flag(&v, line, c)?),
                    "pure" => declare.pure = Some(parse_flag(&v, line, c)?),
                    "distinguished_at_zero" => declare.distinguished_at_zero = Some(parse_flag(&v, line, c)?),
                    "depth" => declare.depth = Some(parse_num(&v, line, c)?),
                    "tame_degree" => declare.tame_degree = Some(parse_num(&v, line, c)?),
                    "residue_degree" => declare.residue_degree = Some(parse_num(&v, line, c)?),
                    "residue_sep_degree" => declare.residue_sep_degree = Some(parse_num(&v, line, c)?),
                    _ => return Err(perr(line, 1, format!("unknown declaration `{k}`"))),
                }
            }
            Section::Query => queries.push(parse_query(content.trim_end(), line)?),
        }
    }
    let get = |k: &str| base_kv.get(k).map(|(v, l, c)| (v.as_str(), *l, *c));
    let base = match get("kind") {
        Some(("t-adic", _, _)) => {
            let (p, l, c) = get("char").ok_or_else(|| perr(0, 0, "[base] needs `char`"))?;
            BaseSpec::TAdic {
                char: parse_num(p, l, c)?,
                residue: get("residue").map(|r| r.0.to_string()),
                uniformizer: get("uniformizer").map_or("t".to_string(), |r| r.0.to_string()),
            }
        }
        Some(("p-adic", _, _)) => {
            let (p, l, c) = get("prime").ok_or_else(|| perr(0, 0, "[base] needs `prime`"))?;
            BaseSpec::PAdic { prime: parse_num(p, l, c)? }
        }
        Some((other, l, c)) => return Err(perr(l, c, format!("unknown base kind `{other}`"))),
        None => return Err(perr(0, 0, "[base] needs `kind`")),
    };
    let (base_field, base_symbols) = build_base(&base)?;
    let tower = build_tower(&base_field, &base_symbols, &levels)?;
    Ok(ProblemFile { base, levels, declare, queries, tower, base_symbols })
}

fn build_base(spec: &BaseSpec) -> Result<(BaseField, BTreeMap<String, Elem>), CliError> {
    let mut symbols = BTreeMap::new();
    let base = match spec {
        BaseSpec::TAdic { char, residue, uniformizer } => {
            let fp = Field::prime(*char)?;
            let consts = match residue {
                Some(u) => Field::functions(&fp, u),
                None => fp,
            };
            let base = BaseField::t_adic(&consts, uniformizer)?;
            let k = base.field().clone();
            symbols.insert(uniformizer.clone(), k.generator().expect("function field"));
            if let Some(u) = residue {
                symbols.insert(u.clone(), k.embed(&consts.generator().expect("function field")));
            }
            base
        }
        BaseSpec::PAdic { prime } => BaseField::p_adic(*prime)?,
    };
    Ok((base, symbols))
}

fn build_tower(
    base: &BaseField,
    base_symbols: &BTreeMap<String, Elem>,
    levels: &[LevelSpec],
) -> Result<Tower, CliError> {
    let mut defs: Vec<(String, Poly)> = Vec::new();
    let mut fields = vec![base.field().clone()];
    for LevelSpec { name, poly: src, origin } in levels {
        let origin = *origin;
        if base_symbols.contains_key(name) || defs.iter().any(|d| &d.0 == name) || name == "X" {
            return Err(perr(origin.line, 1, format!("`{name}` is already defined")));
        }
        let below = fields.last().expect("nonempty").clone();
        let scope = level_scope(base.field(), base_symbols, &fields, &defs, &below);
        let poly = parse_poly(src, origin, &scope.with_var("X"))?;
        if !poly.is_monic(&below) {
            return Err(CliError::NonMonicMinPoly(name.clone()));
        }
        let field = Field::extension(&below, poly.clone(), name)?;
        fields.push(field);
        defs.push((name.clone(), poly));
    }
    Tower::new(base.clone(), defs).map_err(|e| match e {
        TowerError::NonMonic(n) => CliError::NonMonicMinPoly(n),
        e => e.into(),
    })
}

fn level_scope(
    k: &Field,
    base_symbols: &BTreeMap<String, Elem>,
    fields: &[Field],
    defs: &[(String, Poly)],
    target: &Field,
) -> Scope {
    let mut scope = Scope::new(target);
    for (s, c) in base_symbols {
        scope.symbols.insert(s.clone(), target.embed_from(k, c).expect("base embeds"));
    }
    for (i, (name, _)) in defs.iter().enumerate() {
        let g = fields[i + 1].generator().expect("extension");
        scope.symbols.insert(name.clone(), target.embed_from(&fields[i + 1], &g).expect("tower embeds"));
    }
    scope
}

impl ProblemFile {
    /// Scope for expressions in the top field (tower elements).
    pub fn element_scope(&self) -> Scope {
        let t = &self.tower;
        let fields: Vec<Field> =
            std::iter::once(t.base().field().clone()).chain(t.levels().iter().map(|l| l.field.clone())).collect();
        let defs: Vec<(String, Poly)> = t.levels().iter().map(|l| (l.name.clone(), l.minpoly.clone())).collect();
        level_scope(t.base().field(), &self.base_symbols, &fields, &defs, t.top())
    }

    /// Scope for polynomials in `X` over the base.
    pub fn base_poly_scope(&self) -> Scope {
        let k = self.tower.base().field();
        let mut scope = Scope::new(k);
        scope.symbols = self.base_symbols.clone();
        scope.with_var("X")
    }

    pub fn element(&self, src: &str, origin: Origin) -> Result<Elem, CliError> {
        parse_const(src, origin, &self.element_scope())
    }

    pub fn base_poly(&self, src: &str, origin: Origin) -> Result<Poly, CliError> {
        parse_poly(src, origin, &self.base_poly_scope())
    }

    pub fn base_const(&self, src: &str, origin: Origin) -> Result<Elem, CliError> {
        parse_const(src, origin, &self.base_poly_scope())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_problem() {
        let p = parse_problem("[base]\nkind=t-adic\nchar=3\n[tower]\ng1: X^3 - X - 1/t\n[query]\ncmd=distances element=g1")
            .unwrap();
        assert_eq!(p.tower.degree(), 3);
        assert_eq!(p.queries.len(), 1);
        assert_eq!(p.queries[0].cmd(), "distances");
        assert_eq!(p.queries[0].get("element").unwrap().0, "g1");
    }

    #[test]
    fn later_levels_see_earlier_generators() {
        let text = "[base]\nkind = t-adic\nchar = 3\nresidue = u\n[tower]\ntheta: X^3 - t^2*X - u\ng2: X^3 - X - (1+theta)/t\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.tower.degree(), 9);
        let top = p.tower.top();
        let theta = p.element("theta", Origin::default()).unwrap();
        assert_eq!(theta, p.tower.generator(1));
        let g2 = p.element("g2^3 - g2", Origin::default()).unwrap();
        let rhs = p.element("(1 + theta)/t", Origin::default()).unwrap();
        assert_eq!(g2, rhs);
        assert!(!top.is_one(&g2));
    }

    #[test]
    fn errors() {
        let undefined = parse_problem("[base]\nkind=t-adic\nchar=3\n[tower]\ng: X^2 - y\n");
        assert!(matches!(undefined, Err(CliError::UndefinedSymbol { ref name, line: 5, column: 10 }) if name == "y"), "{undefined:?}");
        let non_monic = parse_problem("[base]\nkind=t-adic\nchar=3\n[tower]\ng: t*X^2 - 1\n");
        assert!(matches!(non_monic, Err(CliError::NonMonicMinPoly(ref n)) if n == "g"));
        assert!(matches!(parse_problem("[base]\nkind=t-adic\nchar=3\n[oops]\n"), Err(CliError::Parse { line: 4, .. })));
        assert!(matches!(parse_problem("[base]\nkind=t-adic\nchar=4\n"), Err(CliError::Algebra(_))));
    }

    #[test]
    fn query_values_may_contain_spaces() {
        let q = parse_query("cmd=verify element=beta - alpha^2 label=gamma", 9).unwrap();
        assert_eq!(q.get("element").unwrap().0, "beta - alpha^2");
        assert_eq!(q.get("element").unwrap().1, Origin { line: 9, column: 20 });
        assert_eq!(q.get("label").unwrap().0, "gamma");
    }
}
