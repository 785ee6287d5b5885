//! Text formats: instances, denial constraints, queries, update scripts and
//! candidate value lists.
//!
//! ```text
//! relation P/3 (x,y,z)
//! P(a,b,c) @ 3/2
//! :- P(x,y,z), P(x,u,w), y != u.
//! ? exists z: P(x,y,z), x = a
//! change P(a,b,c) attr 1 -> f
//! ```
//!
//! Inside constraints and queries a bare identifier is a variable when it
//! starts with an uppercase letter or `_`, or is one of `u`..`z` followed
//! only by digits or underscores. Every other identifier, every quoted
//! string and every integer is a constant. Instance files treat all
//! arguments as constants.

use std::fmt;

use thiserror::Error;

use crate::answer::{Literal, Query, QueryError};
use crate::denial::{
    Atom, CmpOp, Comparison, ConstraintError, ConstraintSet, DenialConstraint, Term,
};
use crate::model::{
    is_variable_name, Constant, DbTuple, Instance, ModelError, Schema, UpdateOp, UpdateSequence,
    Weight,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}: {source}")]
    Model { line: usize, source: ModelError },
    #[error("{line}: {source}")]
    Constraint {
        line: usize,
        source: ConstraintError,
    },
    #[error("{line}: {source}")]
    Query { line: usize, source: QueryError },
}

impl ParseError {
    fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::Model { line, .. }
            | ParseError::Constraint { line, .. }
            | ParseError::Query { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    ColonDash,
    Question,
    At,
    Slash,
    Arrow,
    Cmp(CmpOp),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::ColonDash => f.write_str("`:-`"),
            Tok::Question => f.write_str("`?`"),
            Tok::At => f.write_str("`@`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Cmp(op) => write!(f, "`{}`", op.symbol()),
        }
    }
}

fn lex(src: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' | ')' | ',' | '.' | '?' | '@' | '/' => {
                out.push((
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '.' => Tok::Dot,
                        '?' => Tok::Question,
                        '@' => Tok::At,
                        _ => Tok::Slash,
                    },
                    col,
                ));
                i += 1;
            }
            ':' => {
                if chars.get(i + 1) == Some(&'-') {
                    out.push((Tok::ColonDash, col));
                    i += 2;
                } else {
                    out.push((Tok::Colon, col));
                    i += 1;
                }
            }
            '=' => {
                i += if chars.get(i + 1) == Some(&'=') { 2 } else { 1 };
                out.push((Tok::Cmp(CmpOp::Eq), col));
            }
            '!' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err(ParseError::syntax(line, col, "expected `!=`"));
                }
                out.push((Tok::Cmp(CmpOp::Ne), col));
                i += 2;
            }
            '<' => match chars.get(i + 1) {
                Some('=') => {
                    out.push((Tok::Cmp(CmpOp::Le), col));
                    i += 2;
                }
                Some('>') => {
                    out.push((Tok::Cmp(CmpOp::Ne), col));
                    i += 2;
                }
                _ => {
                    out.push((Tok::Cmp(CmpOp::Lt), col));
                    i += 1;
                }
            },
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    out.push((Tok::Cmp(CmpOp::Ge), col));
                    i += 2;
                } else {
                    out.push((Tok::Cmp(CmpOp::Gt), col));
                    i += 1;
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, col));
                i += 2;
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<i64>()
                    .map_err(|_| ParseError::syntax(line, col, format!("bad integer `{text}`")))?;
                out.push((Tok::Int(v), col));
            }
            '"' | '\'' => {
                let quote = c;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(ParseError::syntax(line, col, "unterminated string")),
                        Some('\\') => {
                            if let Some(&n) = chars.get(i + 1) {
                                s.push(n);
                            }
                            i += 2;
                        }
                        Some(&ch) if ch == quote => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push((Tok::Str(s), col));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => {
                return Err(ParseError::syntax(
                    line,
                    col,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: lex(src, line)?,
            pos: 0,
            line,
            end_col: src.chars().count() + 1,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line, self.col(), msg)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{tok}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn constant(&mut self) -> Result<Constant, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) | Some(Tok::Str(s)) => Ok(Constant::sym(&s)),
            Some(Tok::Int(i)) => Ok(Constant::Int(i)),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("constant"))
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) if is_variable_name(&s) => Ok(Term::Var(s)),
            Some(Tok::Ident(s)) | Some(Tok::Str(s)) => Ok(Term::Const(Constant::sym(&s))),
            Some(Tok::Int(i)) => Ok(Term::Const(Constant::Int(i))),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("term"))
            }
        }
    }

    fn ground_tuple(&mut self) -> Result<DbTuple, ParseError> {
        let rel = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.constant()?];
        while self.eat(&Tok::Comma) {
            args.push(self.constant()?);
        }
        self.expect(Tok::RParen)?;
        Ok(DbTuple::new(&rel, args))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let relation = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut terms = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            terms.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(Atom { relation, terms })
    }

    fn weight(&mut self) -> Result<Weight, ParseError> {
        let col = self.col();
        let num = match self.next() {
            Some(Tok::Int(i)) => i,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("weight"));
            }
        };
        let den = if self.eat(&Tok::Slash) {
            match self.next() {
                Some(Tok::Int(d)) if d > 0 => d,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("positive denominator"));
                }
            }
        } else {
            1
        };
        let w = Weight::new(num, den);
        if !w.is_positive() {
            return Err(ParseError::syntax(
                self.line,
                col,
                format!("weight {w} is not positive"),
            ));
        }
        Ok(w)
    }
}

/// A conjunct of a rule or query body.
enum Conjunct {
    Atom(Atom),
    Negated(Atom),
    Comparison(Comparison),
}

fn conjunct(cur: &mut Cursor, allow_negation: bool) -> Result<Conjunct, ParseError> {
    if let Some(Tok::Ident(s)) = cur.peek() {
        let is_not = s == "not";
        let next_is_paren = matches!(cur.toks.get(cur.pos + 1), Some((Tok::LParen, _)));
        if is_not && !next_is_paren {
            if !allow_negation {
                return Err(cur.error("negation is not allowed here"));
            }
            cur.pos += 1;
            return Ok(Conjunct::Negated(cur.atom()?));
        }
        if next_is_paren {
            return Ok(Conjunct::Atom(cur.atom()?));
        }
    }
    let lhs = cur.term()?;
    let op = match cur.next() {
        Some(Tok::Cmp(op)) => op,
        _ => {
            cur.pos -= 1;
            return Err(cur.unexpected("comparison operator"));
        }
    };
    let rhs = cur.term()?;
    Ok(Conjunct::Comparison(Comparison { lhs, op, rhs }))
}

fn constraint_on_line(
    src: &str,
    line: usize,
    default_id: &str,
) -> Result<DenialConstraint, ParseError> {
    let mut cur = Cursor::new(src, line)?;
    let mut id = default_id.to_string();
    if let (Some(Tok::Ident(name)), Some((Tok::Colon, _))) = (cur.peek(), cur.toks.get(cur.pos + 1))
    {
        id = name.clone();
        cur.pos += 2;
    }
    cur.expect(Tok::ColonDash)?;
    let mut atoms = Vec::new();
    let mut comparisons = Vec::new();
    loop {
        match conjunct(&mut cur, false)? {
            Conjunct::Atom(a) => atoms.push(a),
            Conjunct::Comparison(c) => comparisons.push(c),
            Conjunct::Negated(_) => unreachable!(),
        }
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.eat(&Tok::Dot);
    cur.finish()?;
    DenialConstraint::new(&id, atoms, comparisons)
        .map_err(|source| ParseError::Constraint { line, source })
}

/// Parses one denial constraint, e.g. `:- P(x,y,z), P(x,u,w), y != u.`
pub fn parse_constraint(text: &str) -> Result<DenialConstraint, ParseError> {
    let mut found = None;
    for (n, l) in text.lines().enumerate() {
        if is_blank(l) {
            continue;
        }
        if found.is_some() {
            return Err(ParseError::syntax(n + 1, 1, "expected a single constraint"));
        }
        found = Some(constraint_on_line(l, n + 1, "c1")?);
    }
    found.ok_or_else(|| ParseError::syntax(1, 1, "empty constraint"))
}

/// One constraint per line; `#` starts a comment. Unlabelled constraints get
/// ids `c1`, `c2`, ... by position.
pub fn parse_constraints(text: &str) -> Result<ConstraintSet, ParseError> {
    let mut cs = Vec::new();
    let mut last_line = 1;
    for (n, l) in text.lines().enumerate() {
        if is_blank(l) {
            continue;
        }
        last_line = n + 1;
        cs.push(constraint_on_line(l, n + 1, &format!("c{}", cs.len() + 1))?);
    }
    ConstraintSet::new(cs).map_err(|source| ParseError::Constraint {
        line: last_line,
        source,
    })
}

fn is_blank(l: &str) -> bool {
    let t = l.trim();
    t.is_empty() || t.starts_with('#')
}

/// Parses an instance file. Relations used without a `relation` header get
/// default attribute names.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut inst = Instance::default();
    for (n, l) in text.lines().enumerate() {
        let line = n + 1;
        if is_blank(l) {
            continue;
        }
        let mut cur = Cursor::new(l, line)?;
        if cur.peek() == Some(&Tok::Ident("relation".into()))
            && !matches!(cur.toks.get(1), Some((Tok::LParen, _)))
        {
            cur.pos += 1;
            let name = cur.ident()?;
            cur.expect(Tok::Slash)?;
            let arity = match cur.next() {
                Some(Tok::Int(a)) if a >= 1 => a as usize,
                _ => {
                    cur.pos -= 1;
                    return Err(cur.unexpected("positive arity"));
                }
            };
            let attrs = if cur.eat(&Tok::LParen) {
                let mut attrs = vec![cur.ident()?];
                while cur.eat(&Tok::Comma) {
                    attrs.push(cur.ident()?);
                }
                cur.expect(Tok::RParen)?;
                if attrs.len() != arity {
                    return Err(ParseError::syntax(
                        line,
                        1,
                        format!(
                            "relation {name} declares arity {arity} but {} attributes",
                            attrs.len()
                        ),
                    ));
                }
                attrs
            } else {
                (0..arity).map(|i| format!("a{i}")).collect()
            };
            cur.finish()?;
            inst.schema_mut()
                .add_relation(&name, attrs)
                .map_err(|source| ParseError::Model { line, source })?;
            continue;
        }
        let t = cur.ground_tuple()?;
        let w = if cur.eat(&Tok::At) {
            cur.weight()?
        } else {
            Weight::ONE
        };
        cur.finish()?;
        let model = |source| ParseError::Model { line, source };
        inst.schema_mut()
            .ensure_relation(&t.relation, t.args.len())
            .map_err(model)?;
        inst.insert_weighted(t, w).map_err(model)?;
    }
    Ok(inst)
}

/// Parses a query such as `? P(x,y,z)`, `? P(a,c,d), not P(a,b,c)` or
/// `? exists z: P(x,y,z), x = a`. The leading `?` is optional.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut found = None;
    for (n, l) in text.lines().enumerate() {
        if is_blank(l) {
            continue;
        }
        if found.is_some() {
            return Err(ParseError::syntax(n + 1, 1, "expected a single query"));
        }
        found = Some(query_on_line(l, n + 1)?);
    }
    found.ok_or_else(|| ParseError::syntax(1, 1, "empty query"))
}

fn query_on_line(src: &str, line: usize) -> Result<Query, ParseError> {
    let mut cur = Cursor::new(src, line)?;
    cur.eat(&Tok::Question);
    let mut exists = Vec::new();
    let quantified = cur.peek() == Some(&Tok::Ident("exists".into()))
        && !matches!(cur.toks.get(cur.pos + 1), Some((Tok::LParen, _)));
    if quantified {
        cur.pos += 1;
        loop {
            let v = cur.ident()?;
            if !is_variable_name(&v) {
                return Err(cur.error(format!("`{v}` is not a variable name")));
            }
            exists.push(v);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(Tok::Colon)?;
    }
    let mut literals = Vec::new();
    let mut comparisons = Vec::new();
    loop {
        match conjunct(&mut cur, !quantified)? {
            Conjunct::Atom(atom) => literals.push(Literal {
                positive: true,
                atom,
            }),
            Conjunct::Negated(atom) => literals.push(Literal {
                positive: false,
                atom,
            }),
            Conjunct::Comparison(c) => comparisons.push(c),
        }
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.eat(&Tok::Dot);
    cur.eat(&Tok::Question);
    cur.finish()?;
    let q = if quantified {
        Query::conjunctive(
            exists,
            literals.into_iter().map(|l| l.atom).collect(),
            comparisons,
        )
    } else {
        Query::literal_conjunction(literals, comparisons)
    };
    q.map_err(|source| ParseError::Query { line, source })
}

/// Parses an update script. Attribute positions are 0-based indices or
/// attribute names declared in `schema`.
pub fn parse_updates(text: &str, schema: &Schema) -> Result<UpdateSequence, ParseError> {
    let mut ops = Vec::new();
    for (n, l) in text.lines().enumerate() {
        let line = n + 1;
        if is_blank(l) {
            continue;
        }
        let mut cur = Cursor::new(l, line)?;
        let kw = cur.ident()?;
        let op = match kw.as_str() {
            "insert" => {
                let t = cur.ground_tuple()?;
                let w = if cur.eat(&Tok::At) {
                    cur.weight()?
                } else {
                    Weight::ONE
                };
                UpdateOp::Insert(t, w)
            }
            "delete" => UpdateOp::Delete(cur.ground_tuple()?),
            "change" => {
                let target = cur.ground_tuple()?;
                if cur.ident()? != "attr" {
                    cur.pos -= 1;
                    return Err(cur.unexpected("`attr`"));
                }
                let col = cur.col();
                let attribute = match cur.next() {
                    Some(Tok::Int(i)) if i >= 0 => i as usize,
                    Some(Tok::Ident(name)) => schema
                        .relation(&target.relation)
                        .and_then(|r| r.attributes.iter().position(|a| *a == name))
                        .ok_or_else(|| {
                            ParseError::syntax(line, col, format!("unknown attribute `{name}`"))
                        })?,
                    _ => return Err(ParseError::syntax(line, col, "expected attribute")),
                };
                if attribute >= target.args.len() {
                    return Err(ParseError::Model {
                        line,
                        source: ModelError::AttributeOutOfRange {
                            tuple: target,
                            index: attribute,
                        },
                    });
                }
                cur.expect(Tok::Arrow)?;
                let value = cur.constant()?;
                UpdateOp::Change {
                    target,
                    attribute,
                    value,
                }
            }
            other => {
                return Err(ParseError::syntax(
                    line,
                    1,
                    format!("unknown update `{other}`, expected insert, delete or change"),
                ))
            }
        };
        cur.finish()?;
        if let Some(t) = match &op {
            UpdateOp::Insert(t, _) | UpdateOp::Delete(t) => Some(t),
            UpdateOp::Change { target, .. } => Some(target),
        } {
            if schema.relation(&t.relation).is_some() {
                schema
                    .check_tuple(t)
                    .map_err(|source| ParseError::Model { line, source })?;
            }
        }
        ops.push(op);
    }
    Ok(UpdateSequence::new(ops))
}

/// Constants separated by whitespace or commas, `#` comments allowed.
pub fn parse_candidates(text: &str) -> Result<Vec<Constant>, ParseError> {
    let mut out = Vec::new();
    for (n, l) in text.lines().enumerate() {
        let mut cur = Cursor::new(l, n + 1)?;
        while !cur.at_end() {
            if cur.eat(&Tok::Comma) {
                continue;
            }
            out.push(cur.constant()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}
