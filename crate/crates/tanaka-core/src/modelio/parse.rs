use std::fmt;

use thiserror::Error;

use super::{Model, ModelError};
use crate::fieldalg::{parse_rational, Chart, PointQ, Polynomial, VectorField, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownCoordinate(String),
    UndefinedField(String),
    NonRationalLiteral(String),
    Model(ModelError),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(s) => write!(f, "syntax error: {s}"),
            ParseErrorKind::UnknownCoordinate(s) => write!(f, "unknown coordinate `{s}`"),
            ParseErrorKind::UndefinedField(s) => write!(f, "undefined field `{s}`"),
            ParseErrorKind::NonRationalLiteral(s) => write!(f, "non-rational literal `{s}`"),
            ParseErrorKind::Model(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn err<T>(line: usize, column: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, column, kind })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(Q),
    Basis(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eq,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line_no: usize, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_at = |start: usize| -> usize {
        let mut j = start;
        while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
            j += 1;
        }
        j
    };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, col });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || matches!(chars[j], '.' | '/' | '_')) {
                j += 1;
            }
            let lit: String = chars[i..j].iter().collect();
            let ok = lit.split('/').count() <= 2
                && lit.split('/').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit()));
            match ok.then(|| parse_rational(&lit)).flatten() {
                Some(v) => out.push(Token { tok: Tok::Number(v), col }),
                None => return err(line_no, col, ParseErrorKind::NonRationalLiteral(lit)),
            }
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            // basis token d/d<coord>
            if c == 'd' && chars.get(i + 1) == Some(&'/') && chars.get(i + 2) == Some(&'d') {
                let end = ident_at(i + 3);
                if end > i + 3 && (chars[i + 3].is_ascii_alphabetic() || chars[i + 3] == '_') {
                    let name: String = chars[i + 3..end].iter().collect();
                    out.push(Token { tok: Tok::Basis(name), col });
                    i = end;
                    continue;
                }
            }
            let end = ident_at(i);
            out.push(Token { tok: Tok::Ident(chars[i..end].iter().collect()), col });
            i = end;
            continue;
        }
        return err(line_no, col, ParseErrorKind::Syntax(format!("unexpected character `{c}`")));
    }
    Ok(out)
}

#[derive(Clone)]
enum Val {
    Poly(Polynomial),
    Field(VectorField),
}

struct ExprParser<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
    chart: &'a Chart,
    fields: &'a [(String, VectorField)],
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn fail<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        err(self.line, self.col(), kind)
    }

    fn add(&self, a: Val, b: Val, col: usize, negate: bool) -> Result<Val, ParseError> {
        let b = match (negate, b) {
            (false, b) => b,
            (true, Val::Poly(p)) => Val::Poly(-&p),
            (true, Val::Field(f)) => Val::Field(f.neg()),
        };
        match (a, b) {
            (Val::Poly(x), Val::Poly(y)) => Ok(Val::Poly(&x + &y)),
            (Val::Field(x), Val::Field(y)) => Ok(Val::Field(x.add(&y))),
            (Val::Field(x), Val::Poly(p)) | (Val::Poly(p), Val::Field(x)) if p.is_zero() => Ok(Val::Field(x)),
            _ => err(
                self.line,
                col,
                ParseErrorKind::Syntax("cannot add a function and a vector field".into()),
            ),
        }
    }

    fn mul(&self, a: Val, b: Val, col: usize) -> Result<Val, ParseError> {
        match (a, b) {
            (Val::Poly(x), Val::Poly(y)) => Ok(Val::Poly(&x * &y)),
            (Val::Poly(p), Val::Field(f)) | (Val::Field(f), Val::Poly(p)) => Ok(Val::Field(f.scale_poly(&p))),
            (Val::Field(_), Val::Field(_)) => err(
                self.line,
                col,
                ParseErrorKind::Syntax("product of two vector fields".into()),
            ),
        }
    }

    fn expr(&mut self) -> Result<Val, ParseError> {
        let mut negate_first = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate_first = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        let col = self.col();
        let first = self.term()?;
        let mut acc = self.add(Val::Poly(Polynomial::zero(self.chart)), first, col, negate_first)?;
        loop {
            let neg = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let col = self.col();
            let t = self.term()?;
            acc = self.add(acc, t, col, neg)?;
        }
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.factor()?;
        loop {
            let col = self.col();
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.mul(acc, f, col)?;
                }
                Some(Tok::Ident(_) | Tok::Number(_) | Tok::Basis(_) | Tok::LParen) => {
                    let f = self.factor()?;
                    acc = self.mul(acc, f, col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Val, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let col = self.col();
        let e = match self.peek() {
            Some(Tok::Number(q)) if q.is_integer() => {
                let e: u32 = q
                    .to_integer()
                    .try_into()
                    .map_err(|_| ParseError { line: self.line, column: col, kind: ParseErrorKind::Syntax("exponent too large".into()) })?;
                e
            }
            _ => return self.fail(ParseErrorKind::Syntax("expected a non-negative integer exponent".into())),
        };
        self.pos += 1;
        match base {
            Val::Poly(p) => Ok(Val::Poly(p.pow(e))),
            Val::Field(_) => err(self.line, col, ParseErrorKind::Syntax("cannot raise a vector field to a power".into())),
        }
    }

    fn atom(&mut self) -> Result<Val, ParseError> {
        let Some(tok) = self.toks.get(self.pos) else {
            return self.fail(ParseErrorKind::Syntax("unexpected end of expression".into()));
        };
        let col = tok.col;
        let v = match &tok.tok {
            Tok::Number(q) => Val::Poly(Polynomial::constant(self.chart, q.clone())),
            Tok::Ident(name) => {
                if let Some(i) = self.chart.index_of(name) {
                    Val::Poly(Polynomial::var(self.chart, i))
                } else if let Some((_, f)) = self.fields.iter().find(|(n, _)| n == name) {
                    Val::Field(f.clone())
                } else {
                    return err(self.line, col, ParseErrorKind::UnknownCoordinate(name.clone()));
                }
            }
            Tok::Basis(name) => match self.chart.index_of(name) {
                Some(i) => Val::Field(VectorField::basis(self.chart, i)),
                None => return err(self.line, col, ParseErrorKind::UnknownCoordinate(name.clone())),
            },
            Tok::LParen => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail(ParseErrorKind::Syntax("expected `)`".into()));
                }
                v
            }
            other => return err(self.line, col, ParseErrorKind::Syntax(format!("unexpected token {other:?}"))),
        };
        self.pos += 1;
        Ok(v)
    }
}

/// Parses the field expression `text` on `chart`; earlier `fields` may be
/// referenced by name.
pub(crate) fn parse_field_expr(
    text: &str,
    chart: &Chart,
    fields: &[(String, VectorField)],
) -> Result<VectorField, ParseError> {
    let toks = lex(1, text)?;
    parse_field_tokens(&toks, 1, text.chars().count() + 1, chart, fields)
}

fn parse_field_tokens(
    toks: &[Token],
    line: usize,
    end_col: usize,
    chart: &Chart,
    fields: &[(String, VectorField)],
) -> Result<VectorField, ParseError> {
    let mut p = ExprParser { toks, pos: 0, line, end_col, chart, fields };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return p.fail(ParseErrorKind::Syntax("trailing input".into()));
    }
    match v {
        Val::Field(f) => Ok(f),
        Val::Poly(q) if q.is_zero() => Ok(VectorField::zero(chart)),
        Val::Poly(_) => err(line, toks.first().map(|t| t.col).unwrap_or(1), ParseErrorKind::Syntax("expression is a function, not a vector field".into())),
    }
}

fn expect_ident(toks: &[Token], i: usize, line: usize, what: &str) -> Result<String, ParseError> {
    match toks.get(i) {
        Some(Token { tok: Tok::Ident(s), .. }) => Ok(s.clone()),
        Some(t) => err(line, t.col, ParseErrorKind::Syntax(format!("expected {what}"))),
        None => err(line, 1, ParseErrorKind::Syntax(format!("expected {what}"))),
    }
}

fn expect_tok(toks: &[Token], i: usize, line: usize, want: Tok, what: &str) -> Result<(), ParseError> {
    match toks.get(i) {
        Some(t) if t.tok == want => Ok(()),
        Some(t) => err(line, t.col, ParseErrorKind::Syntax(format!("expected {what}"))),
        None => err(line, 1, ParseErrorKind::Syntax(format!("expected {what}"))),
    }
}

/// Parses a model in the `.tk` format.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let mut name: Option<String> = None;
    let mut chart: Option<Chart> = None;
    let mut fields: Vec<(String, VectorField)> = Vec::new();
    let mut distribution: Option<(String, Vec<String>, usize)> = None;
    let mut marked: Vec<(String, String)> = Vec::new();
    let mut point: Option<(Vec<Q>, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = lex(line, raw)?;
        let Some(first) = toks.first() else { continue };
        let Tok::Ident(keyword) = &first.tok else {
            return err(line, first.col, ParseErrorKind::Syntax("expected a keyword".into()));
        };
        let need_chart = |col| match &chart {
            Some(c) => Ok(c.clone()),
            None => err(line, col, ParseErrorKind::Syntax("`coords` must come first".into())),
        };
        match keyword.as_str() {
            "model" => {
                if toks.len() != 2 {
                    return err(line, first.col, ParseErrorKind::Syntax("expected `model <name>`".into()));
                }
                name = Some(expect_ident(&toks, 1, line, "model name")?);
            }
            "coords" => {
                if chart.is_some() {
                    return err(line, first.col, ParseErrorKind::Syntax("duplicate `coords`".into()));
                }
                let names = (1..toks.len())
                    .map(|i| expect_ident(&toks, i, line, "coordinate name"))
                    .collect::<Result<Vec<_>, _>>()?;
                chart = Some(Chart::new(names).map_err(|e| ParseError {
                    line,
                    column: first.col,
                    kind: ParseErrorKind::Syntax(e.to_string()),
                })?);
            }
            "field" => {
                let c = need_chart(first.col)?;
                let fname = expect_ident(&toks, 1, line, "field name")?;
                expect_tok(&toks, 2, line, Tok::Eq, "`=`")?;
                if c.index_of(&fname).is_some() {
                    return err(line, toks[1].col, ParseErrorKind::Model(ModelError::FieldIsCoordinate(fname)));
                }
                if fields.iter().any(|(n, _)| n == &fname) {
                    return err(line, toks[1].col, ParseErrorKind::Model(ModelError::DuplicateField(fname)));
                }
                let f = parse_field_tokens(&toks[3..], line, raw.chars().count() + 1, &c, &fields)?;
                fields.push((fname, f));
            }
            "distribution" => {
                need_chart(first.col)?;
                if distribution.is_some() {
                    return err(line, first.col, ParseErrorKind::Syntax("duplicate `distribution`".into()));
                }
                let dname = expect_ident(&toks, 1, line, "distribution name")?;
                expect_tok(&toks, 2, line, Tok::Eq, "`=`")?;
                expect_tok(&toks, 3, line, Tok::LBracket, "`[`")?;
                let mut names = Vec::new();
                let mut i = 4;
                loop {
                    let n = expect_ident(&toks, i, line, "field name")?;
                    if !fields.iter().any(|(m, _)| m == &n) {
                        return err(line, toks[i].col, ParseErrorKind::UndefinedField(n));
                    }
                    names.push(n);
                    i += 1;
                    match toks.get(i).map(|t| &t.tok) {
                        Some(Tok::Comma) => i += 1,
                        Some(Tok::RBracket) => break,
                        _ => return err(line, toks.get(i).map(|t| t.col).unwrap_or(raw.len() + 1), ParseErrorKind::Syntax("expected `,` or `]`".into())),
                    }
                }
                if i + 1 != toks.len() {
                    return err(line, toks[i + 1].col, ParseErrorKind::Syntax("trailing input".into()));
                }
                distribution = Some((dname, names, line));
            }
            "marked" => {
                need_chart(first.col)?;
                let role = expect_ident(&toks, 1, line, "role name")?;
                expect_tok(&toks, 2, line, Tok::Eq, "`=`")?;
                let fname = expect_ident(&toks, 3, line, "field name")?;
                if !fields.iter().any(|(m, _)| m == &fname) {
                    return err(line, toks[3].col, ParseErrorKind::UndefinedField(fname));
                }
                if toks.len() != 4 {
                    return err(line, toks[4].col, ParseErrorKind::Syntax("trailing input".into()));
                }
                marked.push((role, fname));
            }
            "point" => {
                let c = need_chart(first.col)?;
                let mut values = Vec::new();
                let mut i = 1;
                while i < toks.len() {
                    let neg = toks[i].tok == Tok::Minus;
                    if neg {
                        i += 1;
                    }
                    match toks.get(i).map(|t| &t.tok) {
                        Some(Tok::Number(v)) => values.push(if neg { -v.clone() } else { v.clone() }),
                        _ => return err(line, toks.get(i).map(|t| t.col).unwrap_or(raw.len() + 1), ParseErrorKind::Syntax("expected a rational".into())),
                    }
                    i += 1;
                }
                if values.len() != c.len() {
                    return err(
                        line,
                        first.col,
                        ParseErrorKind::Model(ModelError::PointArity { expected: c.len(), got: values.len() }),
                    );
                }
                point = Some((values, line));
            }
            other => {
                return err(line, first.col, ParseErrorKind::Syntax(format!("unknown keyword `{other}`")));
            }
        }
    }

    let last = text.lines().count().max(1);
    let Some(chart) = chart else {
        return err(last, 1, ParseErrorKind::Syntax("missing `coords`".into()));
    };
    let Some((dname, dist, _)) = distribution else {
        return err(last, 1, ParseErrorKind::Syntax("missing `distribution`".into()));
    };
    let base = point.map(|(v, _)| PointQ::new(&chart, v).expect("arity checked"));
    let model = Model::new(name.unwrap_or_else(|| "model".into()), chart, fields, dist, marked, base)
        .map_err(|e| ParseError { line: last, column: 1, kind: ParseErrorKind::Model(e) })?;
    Ok(model.with_distribution_name(dname))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_model() {
        let m = parse_model("coords x y\nfield U = d/dx\nfield V = x d/dy\ndistribution D = [U, V]").unwrap();
        assert_eq!(m.chart().names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(m.frame().len(), 2);
        assert_eq!(m.name(), "model");
        assert!(m.base_point().is_none());
    }

    #[test]
    fn unknown_coordinate_reports_location() {
        let e = parse_model("coords x y\nfield W = d/dq\ndistribution D = [W]").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 11);
        assert_eq!(e.kind, ParseErrorKind::UnknownCoordinate("q".into()));
    }

    #[test]
    fn undefined_field_in_distribution() {
        let e = parse_model("coords x\nfield U = d/dx\ndistribution D = [U, W]").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndefinedField("W".into()));
        assert_eq!((e.line, e.column), (3, 22));
    }

    #[test]
    fn non_rational_literal() {
        let e = parse_model("coords x\nfield U = 1.5 d/dx\ndistribution D = [U]").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonRationalLiteral("1.5".into()));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_model("coords x\nfield U = d/dx d/dx\ndistribution D = [U]").unwrap_err().kind,
            ParseErrorKind::Syntax(_)
        ));
        assert!(matches!(
            parse_model("coords x\nfield U = x + d/dx\ndistribution D = [U]").unwrap_err().kind,
            ParseErrorKind::Syntax(_)
        ));
        assert!(matches!(
            parse_model("field U = d/dx\ncoords x").unwrap_err().kind,
            ParseErrorKind::Syntax(_)
        ));
    }

    #[test]
    fn expressions_and_references() {
        let c = Chart::new(["x", "t"]).unwrap();
        let u = parse_field_expr("d/dx", &c, &[]).unwrap();
        let fields = vec![("U".to_string(), u.clone())];
        let w = parse_field_expr("-(1/2 x^2 + t)*U + 3/4 t^2 d/dt", &c, &fields).unwrap();
        assert_eq!(w.to_string(), "-1/2 x^2 d/dx - t d/dx + 3/4 t^2 d/dt");
    }

    #[test]
    fn point_and_marked() {
        let m = parse_model(
            "model h\ncoords x y z\nfield X = d/dx\nfield Y = d/dy + x d/dz\ndistribution D = [X, Y]\nmarked V = Y\npoint 1 -2/3 0",
        )
        .unwrap();
        assert_eq!(m.marked_field("V").unwrap().0, "Y");
        assert_eq!(m.base_point().unwrap().to_string(), "(1, -2/3, 0)");
    }
}
