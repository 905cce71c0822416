//! The line-oriented rule-file format.
//!
//! ```text
//! version 1                     # optional
//! field 5                       # or: field Q
//! alphabet affine 1             # F^n; `variety n` takes `equation` lines,
//! equation x0_0^2 + x0_1^2 - 1  #   written in x0_<coordinate>
//!                               # or: alphabet table a b c
//! group Z 1                     # or: group finite <order> identity <i>,
//!                               #   followed by one `row` per element
//! memory 0; 1                   # `;`-separated; Z^d elements as (a,b)
//! rule x0_0 + x1_0              # one line per coordinate, or `entry` lines:
//! entry 0; 1 -> 1               #   arguments in memory order -> output
//! ```
//!
//! `#` starts a comment. `x<m>_<i>` is coordinate `i` of the `m`-th
//! listed memory element.

use std::fmt::Write as _;
use std::sync::Arc;

use algca::algebra::{parse_rule_body, variable_name, Field, MultiPoly};
use algca::alphabet::{decode_tuple, encode_tuple, enumerate_points, tuple_count, Alphabet, RegularMap, RuleBody, ENUMERATION_CAP, TABLE_CAP};
use algca::automaton::CellularAutomaton;
use algca::groups::{FiniteGroup, GroupElement, GroupSpec};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleFileError {
    #[error("line {line}, column {column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: {message}")]
    Semantic { line: usize, column: usize, message: String },
}

type Parsed<T> = std::result::Result<T, RuleFileError>;

fn syntax(line: usize, column: usize, message: impl Into<String>) -> RuleFileError {
    RuleFileError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn semantic(line: usize, message: impl ToString) -> RuleFileError {
    RuleFileError::Semantic {
        line,
        column: 1,
        message: message.to_string(),
    }
}

/// A directive argument with its position in the source.
#[derive(Clone, Debug)]
struct Arg {
    line: usize,
    column: usize,
    text: String,
}

impl Arg {
    /// Maps a core error on this argument to a positioned error.
    fn error(&self, err: algca::Error) -> RuleFileError {
        match err {
            algca::Error::PolySyntax { column, message } => {
                let column = self.column + column - 1;
                if message.starts_with("undeclared variable") {
                    RuleFileError::Semantic {
                        line: self.line,
                        column,
                        message,
                    }
                } else {
                    syntax(self.line, column, message)
                }
            }
            other => RuleFileError::Semantic {
                line: self.line,
                column: self.column,
                message: other.to_string(),
            },
        }
    }
}

enum AlphabetKind {
    Affine(usize),
    Variety(usize),
    Table(Vec<String>),
}

enum GroupKind {
    Free(usize),
    Finite { order: usize, identity: usize },
}

#[derive(Default)]
struct Sections {
    field: Option<(usize, Field)>,
    alphabet: Option<(usize, AlphabetKind)>,
    equations: Vec<Arg>,
    group: Option<(usize, GroupKind)>,
    rows: Vec<(usize, Vec<usize>)>,
    memory: Option<Arg>,
    rules: Vec<Arg>,
    entries: Vec<Arg>,
}

fn set_once<T>(slot: &mut Option<(usize, T)>, line: usize, value: T, name: &str) -> Parsed<()> {
    if let Some((first, _)) = slot {
        return Err(semantic(line, format!("duplicate `{name}` (first on line {first})")));
    }
    *slot = Some((line, value));
    Ok(())
}

fn parse_usize(text: &str, line: usize, column: usize) -> Parsed<usize> {
    text.parse()
        .map_err(|_| syntax(line, column, format!("expected a non-negative integer, found `{text}`")))
}

fn collect(text: &str) -> Parsed<Sections> {
    let mut s = Sections::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap();
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let keyword = trimmed.split_whitespace().next().unwrap();
        let rest_start = indent + keyword.len();
        let rest = &content[rest_start..];
        let rest_trim = rest.trim_start();
        let arg = Arg {
            line,
            column: rest_start + (rest.len() - rest_trim.len()) + 1,
            text: rest_trim.trim_end().to_string(),
        };
        let words: Vec<&str> = arg.text.split_whitespace().collect();
        match keyword {
            "version" => {
                let v = parse_usize(&arg.text, line, arg.column)?;
                if v as u32 != FORMAT_VERSION {
                    return Err(semantic(line, format!("unsupported format version {v}")));
                }
            }
            "field" => {
                let field = match arg.text.as_str() {
                    "Q" => Field::Rationals,
                    p => {
                        let p = parse_usize(p, line, arg.column)?;
                        Field::prime(p as u64).map_err(|e| arg.error(e))?
                    }
                };
                set_once(&mut s.field, line, field, "field")?;
            }
            "alphabet" => {
                let kind = match words.as_slice() {
                    ["affine", n] => AlphabetKind::Affine(parse_usize(n, line, arg.column)?),
                    ["variety", n] => AlphabetKind::Variety(parse_usize(n, line, arg.column)?),
                    ["table", symbols @ ..] if !symbols.is_empty() => {
                        if let Some(bad) = symbols.iter().find(|s| s.contains(';') || s.contains("->")) {
                            return Err(syntax(line, arg.column, format!("symbol `{bad}` contains `;` or `->`")));
                        }
                        AlphabetKind::Table(symbols.iter().map(|s| s.to_string()).collect())
                    }
                    _ => {
                        return Err(syntax(
                            line,
                            arg.column,
                            "expected `affine <n>`, `variety <n>` or `table <symbols>`",
                        ))
                    }
                };
                set_once(&mut s.alphabet, line, kind, "alphabet")?;
            }
            "equation" => s.equations.push(arg),
            "group" => {
                let kind = match words.as_slice() {
                    ["Z", d] => GroupKind::Free(parse_usize(d, line, arg.column)?),
                    ["finite", n, "identity", e] => GroupKind::Finite {
                        order: parse_usize(n, line, arg.column)?,
                        identity: parse_usize(e, line, arg.column)?,
                    },
                    _ => {
                        return Err(syntax(
                            line,
                            arg.column,
                            "expected `Z <rank>` or `finite <order> identity <element>`",
                        ))
                    }
                };
                set_once(&mut s.group, line, kind, "group")?;
            }
            "row" => {
                let row = words
                    .iter()
                    .map(|w| parse_usize(w, line, arg.column))
                    .collect::<Parsed<Vec<_>>>()?;
                s.rows.push((line, row));
            }
            "memory" => {
                if s.memory.is_some() {
                    return Err(semantic(line, "duplicate `memory`"));
                }
                s.memory = Some(arg);
            }
            "rule" => s.rules.push(arg),
            "entry" => s.entries.push(arg),
            other => return Err(syntax(line, indent + 1, format!("unknown directive `{other}`"))),
        }
    }
    Ok(s)
}

fn build_alphabet(s: &Sections) -> Parsed<Arc<Alphabet>> {
    let Some((line, kind)) = &s.alphabet else {
        return Err(semantic(1, "missing `alphabet`"));
    };
    let line = *line;
    if let AlphabetKind::Table(symbols) = kind {
        if let Some(e) = s.equations.first() {
            return Err(semantic(e.line, "table alphabets take no equations"));
        }
        return Alphabet::table(symbols.clone()).map(Arc::new).map_err(|e| semantic(line, e));
    }
    let Some((_, field)) = s.field else {
        return Err(semantic(line, "variety alphabets need a `field`"));
    };
    let dim = match kind {
        AlphabetKind::Affine(n) => {
            if let Some(e) = s.equations.first() {
                return Err(semantic(e.line, "affine alphabets take no equations; use `variety`"));
            }
            *n
        }
        AlphabetKind::Variety(n) => *n,
        AlphabetKind::Table(_) => unreachable!(),
    };
    let equations = s
        .equations
        .iter()
        .map(|e| parse_rule_body(&e.text, field, 1, dim).map_err(|err| e.error(err)))
        .collect::<Parsed<Vec<_>>>()?;
    let alphabet = match field {
        Field::Prime(p) => enumerate_points(p, dim, equations, ENUMERATION_CAP),
        Field::Rationals => Alphabet::rational(dim, equations),
    };
    alphabet.map(Arc::new).map_err(|e| semantic(line, e))
}

fn build_group(s: &Sections) -> Parsed<GroupSpec> {
    let Some((line, kind)) = &s.group else {
        return Err(semantic(1, "missing `group`"));
    };
    match kind {
        GroupKind::Free(d) => {
            if let Some((l, _)) = s.rows.first() {
                return Err(semantic(*l, "`row` lines belong to finite groups"));
            }
            GroupSpec::free_abelian(*d).map_err(|e| semantic(*line, e))
        }
        GroupKind::Finite { order, identity } => {
            if s.rows.len() != *order {
                return Err(semantic(*line, format!("expected {order} `row` lines, found {}", s.rows.len())));
            }
            let table = s.rows.iter().map(|(_, r)| r.clone()).collect();
            FiniteGroup::new(table, *identity)
                .map(GroupSpec::Finite)
                .map_err(|e| semantic(*line, e))
        }
    }
}

/// Parses a group element: an integer, `(a,b,…)` / `a,b` for `Z^d`, or an
/// element index for finite groups.
pub fn parse_element(text: &str, group: &GroupSpec) -> algca::Result<GroupElement> {
    let bad = || algca::Error::Precondition(format!("`{text}` is not an element of {group}"));
    let text = text.trim();
    let element = match group {
        GroupSpec::FreeAbelian { .. } => {
            let inner = text
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .unwrap_or(text);
            let coords = inner
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<algca::Result<Vec<_>>>()?;
            GroupElement::Vector(coords)
        }
        GroupSpec::Finite(_) => GroupElement::Index(text.parse().map_err(|_| bad())?),
    };
    group.check(&element).map_err(|_| bad())?;
    Ok(element)
}

/// `;`-separated group elements.
pub fn parse_elements(text: &str, group: &GroupSpec) -> algca::Result<Vec<GroupElement>> {
    text.split(';').map(|t| parse_element(t, group)).collect()
}

pub fn format_element(g: &GroupElement) -> String {
    match g {
        GroupElement::Vector(v) if v.len() == 1 => v[0].to_string(),
        GroupElement::Vector(v) => {
            let parts: Vec<String> = v.iter().map(i64::to_string).collect();
            format!("({})", parts.join(","))
        }
        GroupElement::Index(i) => i.to_string(),
    }
}

fn build_rule(s: &Sections, alphabet: &Arc<Alphabet>, arity: usize, line: usize) -> Parsed<RegularMap> {
    match (s.rules.is_empty(), s.entries.is_empty()) {
        (false, false) => Err(semantic(s.entries[0].line, "use either `rule` or `entry` lines, not both")),
        (true, true) => Err(semantic(line, "missing `rule` or `entry` lines")),
        (false, true) => {
            let Some(field) = alphabet.field() else {
                return Err(semantic(s.rules[0].line, "table alphabets need `entry` lines"));
            };
            let dim = alphabet.dim();
            if s.rules.len() != dim {
                return Err(semantic(
                    s.rules[0].line,
                    format!("expected {dim} `rule` lines, one per coordinate, found {}", s.rules.len()),
                ));
            }
            let comps = s
                .rules
                .iter()
                .map(|r| parse_rule_body(&r.text, field, arity, dim).map_err(|e| r.error(e)))
                .collect::<Parsed<Vec<_>>>()?;
            RegularMap::polynomial(alphabet.clone(), alphabet.clone(), arity, comps).map_err(|e| s.rules[0].error(e))
        }
        (true, false) => {
            let nd = alphabet.size().ok_or_else(|| semantic(s.entries[0].line, "`entry` lines need a finite alphabet"))?;
            let count = tuple_count(nd, arity, TABLE_CAP).map_err(|e| semantic(s.entries[0].line, e))?;
            let mut table = vec![u32::MAX; count];
            for e in &s.entries {
                let Some((args, out)) = e.text.split_once("->") else {
                    return Err(syntax(e.line, e.column, "expected `<arguments> -> <output>`"));
                };
                let point = |t: &str| -> Parsed<usize> {
                    let p = alphabet.parse_point(t).map_err(|err| e.error(err))?;
                    alphabet
                        .index_of(&p)
                        .ok_or_else(|| semantic(e.line, format!("`{}` is not in the alphabet", t.trim())))
                };
                let args = args.split(';').map(point).collect::<Parsed<Vec<_>>>()?;
                if args.len() != arity {
                    return Err(semantic(e.line, format!("entry has {} arguments, memory has {arity}", args.len())));
                }
                let slot = &mut table[encode_tuple(&args, nd)];
                if *slot != u32::MAX {
                    return Err(semantic(e.line, "duplicate entry"));
                }
                *slot = point(out)? as u32;
            }
            if let Some(missing) = table.iter().position(|&v| v == u32::MAX) {
                let mut t = vec![0; arity];
                decode_tuple(missing, nd, &mut t);
                let shown: Vec<String> = t.iter().map(|&i| alphabet.format_point(&alphabet.point(i))).collect();
                return Err(semantic(s.entries[0].line, format!("no entry for ({})", shown.join("; "))));
            }
            RegularMap::table(alphabet.clone(), alphabet.clone(), arity, table).map_err(|e| semantic(s.entries[0].line, e))
        }
    }
}

pub fn parse_rule_file(text: &str) -> Parsed<CellularAutomaton> {
    let s = collect(text)?;
    let alphabet = build_alphabet(&s)?;
    let group = build_group(&s)?;
    let memory = s.memory.as_ref().ok_or_else(|| semantic(1, "missing `memory`"))?;
    let elements = parse_elements(&memory.text, &group).map_err(|e| memory.error(e))?;
    let rule = build_rule(&s, &alphabet, elements.len(), memory.line)?;
    let line = s.rules.first().or(s.entries.first()).map_or(memory.line, |a| a.line);
    CellularAutomaton::from_ordered(group, elements, rule).map_err(|e| semantic(line, e))
}

fn show(p: &MultiPoly, dim: usize) -> String {
    p.display_with(|v| variable_name(v, dim))
}

/// Canonical rule-file text; memory in sorted order.
pub fn write_rule_file(ca: &CellularAutomaton) -> String {
    let mut out = format!("version {FORMAT_VERSION}\n");
    let alphabet = ca.alphabet();
    match alphabet.field() {
        Some(Field::Prime(p)) => writeln!(out, "field {p}").unwrap(),
        Some(Field::Rationals) => out.push_str("field Q\n"),
        None => {}
    }
    match alphabet.symbols() {
        Some(symbols) => writeln!(out, "alphabet table {}", symbols.join(" ")).unwrap(),
        None if alphabet.equations().is_empty() => writeln!(out, "alphabet affine {}", alphabet.dim()).unwrap(),
        None => {
            writeln!(out, "alphabet variety {}", alphabet.dim()).unwrap();
            for e in alphabet.equations() {
                writeln!(out, "equation {}", show(e, alphabet.dim())).unwrap();
            }
        }
    }
    match ca.group() {
        GroupSpec::FreeAbelian { rank } => writeln!(out, "group Z {rank}").unwrap(),
        GroupSpec::Finite(g) => {
            writeln!(out, "group finite {} identity {}", g.order(), g.identity()).unwrap();
            for row in g.table() {
                let r: Vec<String> = row.iter().map(usize::to_string).collect();
                writeln!(out, "row {}", r.join(" ")).unwrap();
            }
        }
    }
    let memory: Vec<String> = ca.memory().iter().map(format_element).collect();
    writeln!(out, "memory {}", memory.join("; ")).unwrap();
    match ca.rule().body() {
        RuleBody::Polynomial(comps) => {
            for c in comps {
                writeln!(out, "rule {}", show(c, alphabet.dim())).unwrap();
            }
        }
        RuleBody::Table(entries) => {
            let nd = alphabet.size().unwrap();
            let mut t = vec![0; ca.memory().len()];
            for (code, &v) in entries.iter().enumerate() {
                decode_tuple(code, nd, &mut t);
                let args: Vec<String> = t.iter().map(|&i| alphabet.format_point(&alphabet.point(i))).collect();
                writeln!(out, "entry {} -> {}", args.join("; "), alphabet.format_point(&alphabet.point(v as usize))).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = "field 2\nalphabet affine 1\ngroup Z 1\nmemory 0; 1\nrule x0_0 + x1_0\n";

    #[test]
    fn xor_file() {
        let ca = parse_rule_file(XOR).unwrap();
        assert_eq!(ca.memory().len(), 2);
        assert_eq!(ca.alphabet().size(), Some(2));
        assert_eq!(ca.rule().lookup_table().unwrap(), &[0, 1, 1, 0]);
    }

    #[test]
    fn undeclared_variable_is_semantic() {
        let text = "field 2\nalphabet affine 1\ngroup Z 1\nmemory 0; 1\nrule x0_0 + x2_0\n";
        match parse_rule_file(text).unwrap_err() {
            RuleFileError::Semantic { line, column, message } => {
                assert_eq!((line, column), (5, 13));
                assert!(message.contains("x2_0"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_positions() {
        let text = "field 2\nalphabet affine 1\ngroup Z 1\nmemory 0\nrule  x0_0 +* 1\n";
        assert_eq!(
            parse_rule_file(text).unwrap_err(),
            RuleFileError::Syntax {
                line: 5,
                column: 13,
                message: "expected a number, variable or '('".into()
            }
        );
        let err = parse_rule_file("field 2\nsprocket 3\n").unwrap_err();
        assert!(matches!(err, RuleFileError::Syntax { line: 2, column: 1, .. }));
    }

    #[test]
    fn semantic_errors() {
        let not_prime = "field 4\nalphabet affine 1\ngroup Z 1\nmemory 0\nrule x0_0\n";
        assert!(matches!(parse_rule_file(not_prime), Err(RuleFileError::Semantic { line: 1, .. })));
        let wrong_dim = "field 3\nalphabet affine 2\ngroup Z 1\nmemory 0\nrule x0_0\n";
        assert!(matches!(parse_rule_file(wrong_dim), Err(RuleFileError::Semantic { line: 5, .. })));
        let partial = "alphabet table a b\ngroup Z 1\nmemory 0\nentry a -> b\n";
        assert!(matches!(parse_rule_file(partial), Err(RuleFileError::Semantic { .. })));
    }

    #[test]
    fn table_rules_and_finite_groups() {
        let text = "alphabet table a b\n\
                    group finite 2 identity 0\nrow 0 1\nrow 1 0\n\
                    memory 1\nentry a -> b\nentry b -> a\n";
        let ca = parse_rule_file(text).unwrap();
        assert_eq!(ca.memory().elements(), &[GroupElement::Index(1)]);
        let back = parse_rule_file(&write_rule_file(&ca)).unwrap();
        assert_eq!(back, ca);
    }

    #[test]
    fn memory_order_is_respected() {
        let a = parse_rule_file("field 3\nalphabet affine 1\ngroup Z 1\nmemory 1; 0\nrule x0_0 - x1_0\n").unwrap();
        let b = parse_rule_file("field 3\nalphabet affine 1\ngroup Z 1\nmemory 0; 1\nrule x1_0 - x0_0\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn round_trips() {
        let texts = [
            XOR,
            "field 5\nalphabet affine 1\ngroup Z 1\nmemory 0\nrule x0_0^3\n",
            "field Q\nalphabet affine 1\ngroup Z 1\nmemory 0; 1\nrule x1_0 - x0_0^2\n",
            "field Q\nalphabet affine 1\ngroup Z 1\nmemory 1\nrule 1/2*x0_0 + 3\n",
            "field 3\nalphabet variety 2\nequation x0_0^2 + x0_1^2 - 1\ngroup Z 2\nmemory (0,0); (1,0); (0,1)\n\
             rule x0_0*x1_0 - x0_1*x1_1\nrule x0_0*x1_1 + x0_1*x1_0\n",
        ];
        for t in texts {
            let ca = parse_rule_file(t).unwrap();
            let text = write_rule_file(&ca);
            let back = parse_rule_file(&text).unwrap();
            assert_eq!(back, ca, "{text}");
            if ca.alphabet().is_finite() {
                assert!(back.same_semantics(&ca).unwrap());
            }
        }
    }

    #[test]
    fn comments_and_version() {
        let text = "# xor\nversion 1\nfield 2   # binary\nalphabet affine 1\ngroup Z 1\nmemory 0; 1\nrule x0_0 + x1_0\n";
        assert!(parse_rule_file(text).is_ok());
        assert!(parse_rule_file(&text.replace("version 1", "version 2")).is_err());
    }
}
