//! Text formats: algebra files, terms, equations, proof s-expressions,
//! HSP certificates and the free-algebra sidecar.
//!
//! Algebra file grammar (line oriented, `#` starts a comment):
//!
//! ```text
//! signature
//! op f 2
//! end
//! algebra z2
//! size 2
//! op f 0 1 1 0
//! end
//! ```
//!
//! Term grammar: `term := ?VAR | NAME | NAME '(' ')' | NAME '(' term (',' term)* ')'`.

use std::fmt;

use thiserror::Error;

use crate::closure::{CertFactor, HspCertificate};
use crate::entail::Proof;
use crate::free::FreeAlgebra;
use crate::sigcore::{is_symbol_name, Elem, FiniteAlgebra, Signature, Violation};
use crate::terms::{Equation, Substitution, Term};

/// A 1-based source position; `col_end` is inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}", self.line, self.col_start)?;
        if self.col_end > self.col_start {
            write!(f, "-{}", self.col_end)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{span}: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("algebra {algebra}: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation {
        algebra: String,
        violations: Vec<Violation>,
    },
}

impl FormatError {
    fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        FormatError::Syntax {
            span,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedAlgebra {
    pub name: String,
    pub algebra: FiniteAlgebra,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraFile {
    pub signature: Signature,
    pub algebras: Vec<NamedAlgebra>,
}

impl AlgebraFile {
    pub fn get(&self, name: &str) -> Option<&FiniteAlgebra> {
        self.algebras.iter().find(|a| a.name == name).map(|a| &a.algebra)
    }
}

/// A whitespace-separated token with its 1-based columns.
struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn line_tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    col: code[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct LineCtx<'a> {
    file: Option<&'a str>,
    line: usize,
}

impl LineCtx<'_> {
    fn span(&self, tok: &Token) -> SourceSpan {
        SourceSpan {
            file: self.file.map(str::to_string),
            line: self.line,
            col_start: tok.col,
            col_end: tok.col + tok.text.chars().count().max(1) - 1,
        }
    }

    fn line_span(&self) -> SourceSpan {
        SourceSpan {
            file: self.file.map(str::to_string),
            line: self.line,
            col_start: 1,
            col_end: 1,
        }
    }

    fn number(&self, tok: &Token) -> Result<usize, FormatError> {
        tok.text
            .parse()
            .map_err(|_| FormatError::syntax(self.span(tok), format!("expected a number, found `{}`", tok.text)))
    }
}

enum State {
    Start,
    Signature(Vec<(String, usize)>),
    BetweenAlgebras,
    Algebra {
        name: String,
        size: Option<usize>,
        tables: Vec<Option<Vec<Elem>>>,
    },
}

/// Parses and validates an algebra file.
pub fn parse_algebra_file(text: &str, file: Option<&str>) -> Result<AlgebraFile, FormatError> {
    let mut state = State::Start;
    let mut sig: Option<Signature> = None;
    let mut algebras: Vec<NamedAlgebra> = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let ctx = LineCtx { file, line: i + 1 };
        last_line = i + 1;
        let toks = line_tokens(raw);
        let Some(head) = toks.first() else { continue };
        let unexpected = |what: &str| FormatError::syntax(ctx.span(head), format!("unexpected `{}` {what}", head.text));
        state = match state {
            State::Start => {
                if head.text != "signature" || toks.len() != 1 {
                    return Err(FormatError::syntax(ctx.span(head), "expected `signature`"));
                }
                State::Signature(Vec::new())
            }
            State::Signature(mut ops) => match head.text {
                "op" => {
                    let [_, name, arity] = &toks[..] else {
                        return Err(FormatError::syntax(ctx.span(head), "expected `op <name> <arity>`"));
                    };
                    if !is_symbol_name(name.text) {
                        return Err(FormatError::syntax(
                            ctx.span(name),
                            format!("invalid symbol name `{}`", name.text),
                        ));
                    }
                    if ops.iter().any(|(n, _)| n == name.text) {
                        return Err(FormatError::syntax(
                            ctx.span(name),
                            format!("duplicate symbol `{}`", name.text),
                        ));
                    }
                    ops.push((name.text.to_string(), ctx.number(arity)?));
                    State::Signature(ops)
                }
                "end" if toks.len() == 1 => {
                    sig = Some(Signature::new(ops).expect("names checked above"));
                    State::BetweenAlgebras
                }
                _ => return Err(unexpected("in signature block")),
            },
            State::BetweenAlgebras => {
                if head.text != "algebra" || toks.len() != 2 {
                    return Err(FormatError::syntax(ctx.span(head), "expected `algebra <name>`"));
                }
                let name = toks[1].text.to_string();
                if algebras.iter().any(|a| a.name == name) {
                    return Err(FormatError::syntax(
                        ctx.span(&toks[1]),
                        format!("duplicate algebra `{name}`"),
                    ));
                }
                let nops = sig.as_ref().expect("signature parsed").len();
                State::Algebra {
                    name,
                    size: None,
                    tables: vec![None; nops],
                }
            }
            State::Algebra {
                name,
                mut size,
                mut tables,
            } => {
                let sig = sig.as_ref().expect("signature parsed");
                match head.text {
                    "size" => {
                        let [_, n] = &toks[..] else {
                            return Err(FormatError::syntax(ctx.span(head), "expected `size <n>`"));
                        };
                        if size.is_some() {
                            return Err(FormatError::syntax(ctx.span(head), "duplicate `size`"));
                        }
                        size = Some(ctx.number(n)?);
                        State::Algebra { name, size, tables }
                    }
                    "op" => {
                        if size.is_none() {
                            return Err(FormatError::syntax(ctx.span(head), "`size` must precede tables"));
                        }
                        let Some(sym) = toks.get(1) else {
                            return Err(FormatError::syntax(ctx.span(head), "expected `op <name> <entries>`"));
                        };
                        let op = sig.index_of(sym.text).ok_or_else(|| {
                            FormatError::syntax(ctx.span(sym), format!("unknown symbol `{}`", sym.text))
                        })?;
                        if tables[op].is_some() {
                            return Err(FormatError::syntax(
                                ctx.span(sym),
                                format!("duplicate table for `{}`", sym.text),
                            ));
                        }
                        let entries = toks[2..].iter().map(|t| ctx.number(t)).collect::<Result<Vec<_>, _>>()?;
                        tables[op] = Some(entries);
                        State::Algebra { name, size, tables }
                    }
                    "end" if toks.len() == 1 => {
                        let size = size.ok_or_else(|| FormatError::syntax(ctx.span(head), "missing `size`"))?;
                        if let Some(op) = tables.iter().position(Option::is_none) {
                            return Err(FormatError::syntax(
                                ctx.span(head),
                                format!("missing table for `{}`", sig.ops()[op].name),
                            ));
                        }
                        let tables = tables.into_iter().map(|t| t.expect("checked")).collect();
                        let algebra = FiniteAlgebra::new(sig.clone(), size, tables).map_err(|violations| {
                            FormatError::Validation {
                                algebra: name.clone(),
                                violations,
                            }
                        })?;
                        algebras.push(NamedAlgebra { name, algebra });
                        State::BetweenAlgebras
                    }
                    _ => return Err(unexpected("in algebra block")),
                }
            }
        };
    }
    let ctx = LineCtx { file, line: last_line };
    match state {
        State::BetweenAlgebras => Ok(AlgebraFile {
            signature: sig.expect("signature parsed"),
            algebras,
        }),
        State::Start => Err(FormatError::syntax(ctx.line_span(), "empty file: expected `signature`")),
        State::Signature(_) | State::Algebra { .. } => Err(FormatError::syntax(
            ctx.line_span(),
            "unexpected end of file: missing `end`",
        )),
    }
}

/// Canonical text of an algebra file.
pub fn emit_algebra_file(file: &AlgebraFile) -> String {
    let mut out = String::from("signature\n");
    for o in file.signature.ops() {
        out.push_str(&format!("op {} {}\n", o.name, o.arity));
    }
    out.push_str("end\n");
    for a in &file.algebras {
        out.push_str(&format!("\nalgebra {}\nsize {}\n", a.name, a.algebra.size()));
        for (o, table) in file.signature.ops().iter().zip(a.algebra.tables()) {
            out.push_str("op ");
            out.push_str(&o.name);
            for v in table {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

/// Character cursor with line/column tracking for the term and proof
/// grammars.
struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    file: Option<&'a str>,
    comment: Option<char>,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, file: Option<&'a str>, comment: Option<char>) -> Self {
        Cursor {
            src,
            pos: 0,
            line: 1,
            col: 1,
            file,
            comment,
        }
    }

    fn at_line(mut self, line: usize) -> Self {
        self.line = line;
        self
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if Some(c) == self.comment {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn span_here(&self, width: usize) -> SourceSpan {
        SourceSpan {
            file: self.file.map(str::to_string),
            line: self.line,
            col_start: self.col,
            col_end: self.col + width.max(1) - 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> FormatError {
        let width = self.peek().map_or(1, |_| 1);
        FormatError::syntax(self.span_here(width), message)
    }

    fn expect(&mut self, c: char) -> Result<(), FormatError> {
        self.skip_ws();
        match self.peek() {
            Some(d) if d == c => {
                self.bump();
                Ok(())
            }
            Some(d) => Err(self.error(format!("expected `{c}`, found `{d}`"))),
            None => Err(self.error(format!("expected `{c}`, found end of input"))),
        }
    }

    /// `[A-Za-z0-9_]+`
    fn ident(&mut self) -> Result<&'a str, FormatError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        if self.pos == start {
            return Err(match self.peek() {
                Some(c) => self.error(format!("expected a name, found `{c}`")),
                None => self.error("expected a name, found end of input"),
            });
        }
        Ok(&self.src[start..self.pos])
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected trailing `{c}`"))),
        }
    }

    fn term(&mut self) -> Result<Term, FormatError> {
        self.skip_ws();
        if self.peek() == Some('?') {
            self.bump();
            if !matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                return Err(self.error("expected a variable name after `?`"));
            }
            return Ok(Term::Var(self.ident()?.to_string()));
        }
        let name = self.ident()?.to_string();
        self.skip_ws();
        if self.peek() != Some('(') {
            return Ok(Term::constant(name));
        }
        self.bump();
        let mut children = Vec::new();
        self.skip_ws();
        if self.peek() == Some(')') {
            self.bump();
            return Ok(Term::App(name, children));
        }
        loop {
            children.push(self.term()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(')') => {
                    self.bump();
                    return Ok(Term::App(name, children));
                }
                Some(c) => return Err(self.error(format!("expected `,` or `)`, found `{c}`"))),
                None => return Err(self.error("unclosed `(`: expected `)`")),
            }
        }
    }

    fn equation(&mut self) -> Result<Equation, FormatError> {
        let lhs = self.term()?;
        self.expect('=')?;
        let rhs = self.term()?;
        Ok(Equation::new(lhs, rhs))
    }

    fn proof(&mut self) -> Result<Proof, FormatError> {
        self.expect('(')?;
        self.skip_ws();
        let span = self.span_here(1);
        let head = self.ident()?;
        let p = match head {
            "hyp" => {
                self.skip_ws();
                let span = self.span_here(1);
                let n = self.ident()?;
                Proof::Hyp(
                    n.parse()
                        .map_err(|_| FormatError::syntax(span, format!("expected an axiom index, found `{n}`")))?,
                )
            }
            "refl" => Proof::Refl(self.term()?),
            "sym" => Proof::sym(self.proof()?),
            "trans" => {
                let p = self.proof()?;
                Proof::trans(p, self.proof()?)
            }
            "app" => {
                let f = self.ident()?.to_string();
                let mut ps = Vec::new();
                loop {
                    self.skip_ws();
                    if self.peek() == Some(')') {
                        break;
                    }
                    ps.push(self.proof()?);
                }
                Proof::App(f, ps)
            }
            "sub" => {
                let p = self.proof()?;
                let mut sigma = Substitution::new();
                loop {
                    self.skip_ws();
                    if self.peek() != Some('(') {
                        break;
                    }
                    self.bump();
                    self.skip_ws();
                    if self.peek() == Some('(') {
                        loop {
                            self.skip_ws();
                            if self.peek() != Some('(') {
                                break;
                            }
                            self.bump();
                            self.binding(&mut sigma)?;
                        }
                        self.expect(')')?;
                    } else {
                        self.binding(&mut sigma)?;
                    }
                }
                Proof::sub(p, sigma)
            }
            other => return Err(FormatError::syntax(span, format!("unknown proof rule `{other}`"))),
        };
        self.expect(')')?;
        Ok(p)
    }

    /// `<var> <term> )`, the opening parenthesis already consumed.
    fn binding(&mut self, sigma: &mut Substitution) -> Result<(), FormatError> {
        self.skip_ws();
        if self.peek() == Some('?') {
            self.bump();
        }
        let x = self.ident()?.to_string();
        let t = self.term()?;
        self.expect(')')?;
        sigma.bind(x, t);
        Ok(())
    }
}

pub fn parse_term(text: &str) -> Result<Term, FormatError> {
    let mut c = Cursor::new(text, None, None);
    let t = c.term()?;
    c.finish()?;
    Ok(t)
}

/// `term = term`
pub fn parse_equation(text: &str) -> Result<Equation, FormatError> {
    let mut c = Cursor::new(text, None, None);
    let e = c.equation()?;
    c.finish()?;
    Ok(e)
}

/// A proof s-expression; `;` starts a comment.
pub fn parse_proof(text: &str, file: Option<&str>) -> Result<Proof, FormatError> {
    let mut c = Cursor::new(text, file, Some(';'));
    let p = c.proof()?;
    c.finish()?;
    Ok(p)
}

/// Which grammar [`parse`] should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseKind {
    Term,
    Equation,
    Proof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Term(Term),
    Equation(Equation),
    Proof(Proof),
}

pub fn parse(text: &str, kind: ParseKind) -> Result<Parsed, FormatError> {
    Ok(match kind {
        ParseKind::Term => Parsed::Term(parse_term(text)?),
        ParseKind::Equation => Parsed::Equation(parse_equation(text)?),
        ParseKind::Proof => Parsed::Proof(parse_proof(text, None)?),
    })
}

/// One `term = term` per line; `#` comments and blank lines are ignored.
pub fn parse_equation_file(text: &str, file: Option<&str>) -> Result<Vec<Equation>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("");
        if code.trim().is_empty() {
            continue;
        }
        let mut c = Cursor::new(code, file, None).at_line(i + 1);
        let e = c.equation()?;
        c.finish()?;
        out.push(e);
    }
    Ok(out)
}

pub fn emit_equation_file(eqs: &[Equation]) -> String {
    eqs.iter().map(|e| format!("{e}\n")).collect()
}

/// `(cert (factors (<alg> <power>)*) (gens (<e> ..)*) (image <e>*))`
pub fn emit_certificate(cert: &HspCertificate) -> String {
    let join = |xs: &[Elem]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let factors: Vec<String> = cert
        .factors
        .iter()
        .map(|f| format!("({} {})", f.algebra, f.power))
        .collect();
    let gens: Vec<String> = cert.gens.iter().map(|g| format!("({})", join(g))).collect();
    format!(
        "(cert (factors {}) (gens {}) (image {}))",
        factors.join(" "),
        gens.join(" "),
        join(&cert.image)
    )
}

#[derive(Debug)]
enum Sexp {
    Atom(String, SourceSpan),
    List(Vec<Sexp>, SourceSpan),
}

impl Sexp {
    fn span(&self) -> &SourceSpan {
        match self {
            Sexp::Atom(_, s) | Sexp::List(_, s) => s,
        }
    }
}

fn read_sexp(c: &mut Cursor) -> Result<Sexp, FormatError> {
    c.skip_ws();
    let span = c.span_here(1);
    match c.peek() {
        Some('(') => {
            c.bump();
            let mut items = Vec::new();
            loop {
                c.skip_ws();
                match c.peek() {
                    Some(')') => {
                        c.bump();
                        return Ok(Sexp::List(items, span));
                    }
                    None => return Err(c.error("unclosed `(`")),
                    _ => items.push(read_sexp(c)?),
                }
            }
        }
        Some(')') => Err(c.error("unexpected `)`")),
        None => Err(c.error("unexpected end of input")),
        _ => Ok(Sexp::Atom(c.ident()?.to_string(), span)),
    }
}

fn sexp_section<'a>(s: &'a Sexp, name: &str) -> Option<Vec<&'a Sexp>> {
    match s {
        Sexp::List(items, _) if matches!(items.first(), Some(Sexp::Atom(a, _)) if a == name) => {
            Some(items[1..].iter().collect())
        }
        _ => None,
    }
}

pub fn parse_certificate(text: &str, file: Option<&str>) -> Result<HspCertificate, FormatError> {
    let mut c = Cursor::new(text, file, Some(';'));
    let top = read_sexp(&mut c)?;
    c.finish()?;
    let bad = |s: &Sexp, what: &str| FormatError::syntax(s.span().clone(), format!("certificate: expected {what}"));
    let num = |s: &Sexp| match s {
        Sexp::Atom(a, _) => a.parse::<usize>().map_err(|_| bad(s, "a number")),
        _ => Err(bad(s, "a number")),
    };
    let section = |s, name| sexp_section(s, name).ok_or_else(|| bad(s, &format!("`({name} ..)`")));
    let Sexp::List(items, _) = &top else {
        return Err(bad(&top, "`(cert ..)`"));
    };
    if items.len() != 4 || !matches!(&items[0], Sexp::Atom(a, _) if a == "cert") {
        return Err(bad(&top, "`(cert (factors ..) (gens ..) (image ..))`"));
    }
    let mut factors = Vec::new();
    for f in section(&items[1], "factors")? {
        match f {
            Sexp::List(pair, _) if pair.len() == 2 => factors.push(CertFactor {
                algebra: num(&pair[0])?,
                power: num(&pair[1])?,
            }),
            _ => return Err(bad(f, "`(<algebra> <power>)`")),
        }
    }
    let mut gens = Vec::new();
    for g in section(&items[2], "gens")? {
        match g {
            Sexp::List(xs, _) => gens.push(xs.iter().map(num).collect::<Result<Vec<_>, _>>()?),
            _ => return Err(bad(g, "a generator tuple")),
        }
    }
    let image = section(&items[3], "image")?
        .into_iter()
        .map(num)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HspCertificate { factors, gens, image })
}

/// `elem <i> repr <term>` per element, with ` gen <var>` appended for
/// generators.
pub fn emit_free_sidecar(free: &FreeAlgebra) -> String {
    let mut out = String::new();
    for (i, e) in free.elems.iter().enumerate() {
        out.push_str(&format!("elem {i} repr {}", e.repr));
        for (x, &g) in free.vars.iter().zip(&free.gens) {
            if g == i {
                out.push_str(&format!(" gen {x}"));
            }
        }
        out.push('\n');
    }
    out
}

/// The free algebra as a one-algebra file named `name`.
pub fn free_algebra_file(free: &FreeAlgebra, name: &str) -> AlgebraFile {
    AlgebraFile {
        signature: free.algebra.signature().clone(),
        algebras: vec![NamedAlgebra {
            name: name.to_string(),
            algebra: free.algebra.clone(),
        }],
    }
}
