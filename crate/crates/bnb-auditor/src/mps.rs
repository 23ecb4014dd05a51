//! MPS reader.
//!
//! Accepts fixed- and free-format MPS alike by tokenizing on whitespace:
//! section headers start in column 1, data lines are indented, `*` in
//! column 1 starts a comment. Sections `NAME`, `OBJSENSE`, `ROWS`,
//! `COLUMNS` (with `INTORG`/`INTEND` markers), `RHS`, `RANGES`, `BOUNDS`
//! and `ENDATA` are understood; anything else is an error.
//!
//! Every numeric literal is parsed exactly as a rational — `0.1` becomes
//! 1/10, never a binary64. The model is normalized on the way out:
//!
//! * `L` rows are negated to `≥`,
//! * `E` rows are split into a `≥` pair (original and negated),
//! * `RANGES` entries expand a row into its two-sided form first,
//! * `OBJSENSE MAX` negates the objective and offset and sets the
//!   `maximize` flag so reports can undo the sign,
//! * an RHS entry on the objective row becomes the objective offset with
//!   flipped sign (the usual MPS convention).
//!
//! Default bounds are `0 ≤ x < ∞` for **all** variables, integers
//! included; the classic implied `u = 1` for `INTORG` columns is
//! deliberately not applied (modern convention). `BV`, `LI` and `UI`
//! bounds mark their column integral.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use bnb_core::model::{MipProblem, SparseRow};
use bnb_core::rational::{parse_rational, ExtendedRational, Rational};
use thiserror::Error;

/// Parse failure, with the 1-based input line (0 for end-of-input checks).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct MpsError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for MpsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> MpsError {
    MpsError {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sense {
    Ge,
    Le,
    Eq,
}

/// What a row name refers to. `Free` covers `N` rows after the first:
/// their coefficients are read and dropped.
#[derive(Clone, Copy)]
enum RowKind {
    Objective,
    Free,
    Constraint(usize),
}

struct ColState {
    name: String,
    integer: bool,
    lower: ExtendedRational,
    upper: ExtendedRational,
    cost: Rational,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

/// `'MARKER'`-style quoted keyword, quotes optional.
fn is_keyword(token: &str, word: &str) -> bool {
    token.trim_matches('\'').eq_ignore_ascii_case(word)
}

fn parse_number(line: usize, token: &str) -> Result<Rational, MpsError> {
    parse_rational(token).map_err(|e| err(line, format!("malformed number `{token}`: {e}")))
}

pub fn parse_mps(text: &str) -> Result<MipProblem, MpsError> {
    let mut section = Section::None;
    let mut name: Option<String> = None;
    let mut maximize = false;

    let mut row_kind: HashMap<String, RowKind> = HashMap::new();
    let mut objective_seen = false;
    let mut constraints: Vec<(String, Sense)> = Vec::new();
    let mut coeffs: Vec<BTreeMap<usize, Rational>> = Vec::new();
    let mut rhs: Vec<Option<Rational>> = Vec::new();
    let mut ranges: Vec<Option<Rational>> = Vec::new();
    let mut offset = Rational::zero();

    let mut cols: Vec<ColState> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut integer_mode = false;
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let flush_left = !raw.starts_with(char::is_whitespace);

        if flush_left {
            let head = tokens[0].to_ascii_uppercase();
            section = match head.as_str() {
                "NAME" => {
                    name = tokens.get(1).map(|s| (*s).to_owned());
                    Section::Name
                }
                "OBJSENSE" => {
                    if let Some(word) = tokens.get(1) {
                        maximize = parse_objsense(line, word)?;
                    }
                    Section::ObjSense
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    ended = true;
                    break;
                }
                other => return Err(err(line, format!("unknown section `{other}`"))),
            };
            continue;
        }

        match section {
            Section::None => {
                return Err(err(line, "data line before the first section header"))
            }
            Section::Name => {
                return Err(err(line, "unexpected data line in the NAME section"))
            }
            Section::ObjSense => {
                maximize = parse_objsense(line, tokens[0])?;
            }
            Section::Rows => {
                if tokens.len() != 2 {
                    return Err(err(line, "expected `<type> <row name>`"));
                }
                let rname = tokens[1];
                if row_kind.contains_key(rname) {
                    return Err(err(line, format!("duplicate row name `{rname}`")));
                }
                let kind = match tokens[0].to_ascii_uppercase().as_str() {
                    "N" if !objective_seen => {
                        objective_seen = true;
                        RowKind::Objective
                    }
                    // Additional N rows are free rows; their entries are
                    // read and ignored, as in every mainstream reader.
                    "N" => RowKind::Free,
                    "G" | "L" | "E" => {
                        let sense = match tokens[0].to_ascii_uppercase().as_str() {
                            "G" => Sense::Ge,
                            "L" => Sense::Le,
                            _ => Sense::Eq,
                        };
                        constraints.push((rname.to_owned(), sense));
                        coeffs.push(BTreeMap::new());
                        rhs.push(None);
                        ranges.push(None);
                        RowKind::Constraint(constraints.len() - 1)
                    }
                    other => return Err(err(line, format!("unknown row type `{other}`"))),
                };
                row_kind.insert(rname.to_owned(), kind);
            }
            Section::Columns => {
                if tokens.iter().any(|t| is_keyword(t, "MARKER")) {
                    if tokens.iter().any(|t| is_keyword(t, "INTORG")) {
                        integer_mode = true;
                    } else if tokens.iter().any(|t| is_keyword(t, "INTEND")) {
                        integer_mode = false;
                    } else {
                        return Err(err(line, "marker line without INTORG or INTEND"));
                    }
                    continue;
                }
                let pairs = &tokens[1..];
                if pairs.is_empty() || !pairs.len().is_multiple_of(2) {
                    return Err(err(line, "expected `<column> <row> <value>` pairs"));
                }
                let j = *col_index
                    .entry(tokens[0].to_owned())
                    .or_insert_with(|| {
                        cols.push(ColState {
                            name: tokens[0].to_owned(),
                            integer: integer_mode,
                            lower: ExtendedRational::zero(),
                            upper: ExtendedRational::PosInf,
                            cost: Rational::zero(),
                        });
                        cols.len() - 1
                    });
                for pair in pairs.chunks(2) {
                    let v = parse_number(line, pair[1])?;
                    match row_kind.get(pair[0]) {
                        None => {
                            return Err(err(line, format!("unknown row `{}`", pair[0])))
                        }
                        Some(RowKind::Objective) => cols[j].cost += &v,
                        Some(RowKind::Free) => {}
                        Some(RowKind::Constraint(i)) => {
                            // Repeated (column, row) entries accumulate.
                            let slot = coeffs[*i].entry(j).or_insert_with(Rational::zero);
                            *slot += &v;
                        }
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                // A leading vector name is optional; an odd token count
                // means it is present.
                let items = if tokens.len() % 2 == 1 {
                    &tokens[1..]
                } else {
                    &tokens[..]
                };
                if items.is_empty() {
                    return Err(err(line, "expected `<row> <value>` pairs"));
                }
                for pair in items.chunks(2) {
                    let v = parse_number(line, pair[1])?;
                    match (section, row_kind.get(pair[0])) {
                        (_, None) => {
                            return Err(err(line, format!("unknown row `{}`", pair[0])))
                        }
                        // The RHS of the objective row is the negated
                        // constant term of the objective.
                        (Section::Rhs, Some(RowKind::Objective)) => offset = -&v,
                        (Section::Rhs, Some(RowKind::Free)) => {}
                        (Section::Rhs, Some(RowKind::Constraint(i))) => rhs[*i] = Some(v),
                        (Section::Ranges, Some(RowKind::Constraint(i))) => {
                            ranges[*i] = Some(v)
                        }
                        (Section::Ranges, Some(_)) => {
                            return Err(err(
                                line,
                                format!("RANGES entry on non-constraint row `{}`", pair[0]),
                            ))
                        }
                        _ => unreachable!(),
                    }
                }
            }
            Section::Bounds => {
                apply_bound(line, &tokens, &col_index, &mut cols)?;
            }
        }
    }
    let _ = ended; // a missing ENDATA is tolerated

    if !objective_seen {
        return Err(err(0, "no objective (N) row"));
    }

    let mut objective: Vec<Rational> = cols.iter().map(|c| c.cost.clone()).collect();
    if maximize {
        for c in &mut objective {
            *c = -&*c;
        }
        offset = -&offset;
    }

    let mut rows = Vec::new();
    let mut out_rhs = Vec::new();
    let mut row_names = Vec::new();
    for (i, (rname, sense)) in constraints.iter().enumerate() {
        let b = rhs[i].clone().unwrap_or_else(Rational::zero);
        let (lo, hi): (Option<Rational>, Option<Rational>) = match (sense, &ranges[i]) {
            (Sense::Ge, None) => (Some(b), None),
            (Sense::Ge, Some(r)) => (Some(b.clone()), Some(&b + &r.abs())),
            (Sense::Le, None) => (None, Some(b)),
            (Sense::Le, Some(r)) => (Some(&b - &r.abs()), Some(b)),
            (Sense::Eq, None) => (Some(b.clone()), Some(b)),
            (Sense::Eq, Some(r)) if !r.is_negative() => (Some(b.clone()), Some(&b + r)),
            (Sense::Eq, Some(r)) => (Some(&b + r), Some(b)),
        };
        let entries: Vec<(usize, Rational)> =
            coeffs[i].iter().map(|(j, a)| (*j, a.clone())).collect();
        if let Some(lo) = &lo {
            rows.push(SparseRow::new(entries.clone()));
            out_rhs.push(lo.clone());
            row_names.push(rname.clone());
        }
        if let Some(hi) = hi {
            rows.push(SparseRow::new(
                entries.iter().map(|(j, a)| (*j, -a)).collect(),
            ));
            out_rhs.push(-&hi);
            row_names.push(if lo.is_some() {
                format!("{rname}#ub")
            } else {
                rname.clone()
            });
        }
    }

    let model = MipProblem {
        name: name.unwrap_or_else(|| "model".to_owned()),
        objective,
        objective_offset: offset,
        maximize,
        rows,
        rhs: out_rhs,
        lower: cols.iter().map(|c| c.lower.clone()).collect(),
        upper: cols.iter().map(|c| c.upper.clone()).collect(),
        integer: cols.iter().map(|c| c.integer).collect(),
        var_names: cols.iter().map(|c| c.name.clone()).collect(),
        row_names,
    };
    model
        .validate()
        .map_err(|e| err(0, format!("assembled model is inconsistent: {e}")))?;
    Ok(model)
}

fn parse_objsense(line: usize, word: &str) -> Result<bool, MpsError> {
    match word.to_ascii_uppercase().as_str() {
        "MAX" | "MAXIMIZE" => Ok(true),
        "MIN" | "MINIMIZE" => Ok(false),
        other => Err(err(line, format!("unknown objective sense `{other}`"))),
    }
}

fn apply_bound(
    line: usize,
    tokens: &[&str],
    col_index: &HashMap<String, usize>,
    cols: &mut [ColState],
) -> Result<(), MpsError> {
    let btype = tokens[0].to_ascii_uppercase();
    let needs_value = matches!(btype.as_str(), "LO" | "UP" | "FX" | "LI" | "UI");
    let rest = &tokens[1..];
    // The bound-set name is optional; disambiguate by arity (and, for the
    // valueless types, by whether the trailing token is numeric).
    let (colname, value_tok): (&str, Option<&str>) = if needs_value {
        match rest.len() {
            2 => (rest[0], Some(rest[1])),
            3 => (rest[1], Some(rest[2])),
            _ => return Err(err(line, "expected `<type> [<set>] <column> <value>`")),
        }
    } else {
        match rest.len() {
            1 => (rest[0], None),
            // Either `<set> <column>` or `<column> <ignored number>`.
            2 if parse_rational(rest[1]).is_ok() => (rest[0], None),
            2 => (rest[1], None),
            3 => (rest[1], None),
            _ => return Err(err(line, "expected `<type> [<set>] <column>`")),
        }
    };
    let j = *col_index
        .get(colname)
        .ok_or_else(|| err(line, format!("bound on unknown column `{colname}`")))?;
    let value = match value_tok {
        Some(t) => Some(parse_number(line, t)?),
        None => None,
    };
    let fin = |v: Rational| ExtendedRational::Finite(v);
    match btype.as_str() {
        "LO" => cols[j].lower = fin(value.unwrap()),
        "UP" => cols[j].upper = fin(value.unwrap()),
        "FX" => {
            let v = value.unwrap();
            cols[j].lower = fin(v.clone());
            cols[j].upper = fin(v);
        }
        "FR" => {
            cols[j].lower = ExtendedRational::NegInf;
            cols[j].upper = ExtendedRational::PosInf;
        }
        "MI" => cols[j].lower = ExtendedRational::NegInf,
        "PL" => cols[j].upper = ExtendedRational::PosInf,
        "BV" => {
            cols[j].lower = ExtendedRational::zero();
            cols[j].upper = ExtendedRational::from_int(1);
            cols[j].integer = true;
        }
        "LI" => {
            cols[j].lower = fin(value.unwrap());
            cols[j].integer = true;
        }
        "UI" => {
            cols[j].upper = fin(value.unwrap());
            cols[j].integer = true;
        }
        other => return Err(err(line, format!("unknown bound type `{other}`"))),
    }
    Ok(())
}

/// Render a model back into free-format MPS. Used by tests to close the
/// loop on hand-built fixtures; splits are not re-merged, so the output
/// parses to the same normalized model rather than the same source text.
/// The objective row is named to avoid the model's own row names.
pub fn write_mps(p: &MipProblem) -> String {
    let mut obj_row = "COST".to_owned();
    while p.row_names.contains(&obj_row) {
        obj_row.push('_');
    }

    let mut s = String::new();
    let _ = writeln!(s, "NAME {}", p.name);
    if p.maximize {
        s.push_str("OBJSENSE\n    MAX\n");
    }
    s.push_str("ROWS\n");
    let _ = writeln!(s, " N {obj_row}");
    for name in &p.row_names {
        let _ = writeln!(s, " G {name}");
    }
    s.push_str("COLUMNS\n");
    for j in 0..p.num_vars() {
        if p.integer[j] {
            s.push_str("    MARKER 'MARKER' 'INTORG'\n");
        }
        let mut wrote_any = false;
        // When maximized, the stored objective is already negated; undo it
        // so the round trip through OBJSENSE MAX lands on the same model.
        let cost = if p.maximize {
            -&p.objective[j]
        } else {
            p.objective[j].clone()
        };
        if !cost.is_zero() {
            let _ = writeln!(s, "    {} {} {}", p.var_names[j], obj_row, fraction(&cost));
            wrote_any = true;
        }
        for (i, row) in p.rows.iter().enumerate() {
            for (col, a) in row.iter() {
                if col == j {
                    let _ = writeln!(
                        s,
                        "    {} {} {}",
                        p.var_names[j],
                        p.row_names[i],
                        fraction(a)
                    );
                    wrote_any = true;
                }
            }
        }
        if !wrote_any {
            // A column only exists once it appears in COLUMNS; pin it with
            // an explicit zero objective entry.
            let _ = writeln!(s, "    {} {} 0", p.var_names[j], obj_row);
        }
        if p.integer[j] {
            s.push_str("    MARKER 'MARKER' 'INTEND'\n");
        }
    }
    s.push_str("RHS\n");
    if !p.objective_offset.is_zero() {
        let off = if p.maximize {
            p.objective_offset.clone()
        } else {
            -&p.objective_offset
        };
        let _ = writeln!(s, "    RHS {obj_row} {}", fraction(&off));
    }
    for i in 0..p.num_rows() {
        if !p.rhs[i].is_zero() {
            let _ = writeln!(s, "    RHS {} {}", p.row_names[i], fraction(&p.rhs[i]));
        }
    }
    s.push_str("BOUNDS\n");
    for j in 0..p.num_vars() {
        let name = &p.var_names[j];
        match &p.lower[j] {
            ExtendedRational::NegInf => {
                let _ = writeln!(s, " MI BND {name}");
            }
            ExtendedRational::Finite(v) if !v.is_zero() => {
                let _ = writeln!(s, " LO BND {name} {}", fraction(v));
            }
            _ => {}
        }
        // An upper bound of −∞ cannot be expressed in MPS; models that
        // validate never carry one (ℓ ≤ u).
        if let ExtendedRational::Finite(v) = &p.upper[j] {
            let _ = writeln!(s, " UP BND {name} {}", fraction(v));
        }
    }
    s.push_str("ENDATA\n");
    s
}

/// MPS numbers have no `p/q` form in the wild, but the exact parser
/// accepts it, so fractions survive a write→parse loop losslessly.
fn fraction(v: &Rational) -> String {
    v.to_fraction_string()
}
