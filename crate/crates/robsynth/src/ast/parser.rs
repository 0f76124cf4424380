use std::collections::HashSet;

use super::expand::Resolver;
use super::lexer::{lex, Tok, Token};
use super::{Arg, Bound, CmpOp, Definition, Formula, Prop, Requirement, SpecFile};
use crate::error::{Error, Result};

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    /// Whether the token after the current one starts right where the
    /// current one ends (used for `[[`, `]]`, `{{`, `}}`, `[]`, `<>`).
    fn glued(&self) -> bool {
        let i = self.pos;
        i + 1 < self.toks.len() && self.toks[i + 1].offset == self.toks[i].offset + 1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::parse(t.line, t.col, msg))
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected {what}, found {}", describe(&other))),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.chop()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.chop()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn chop(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let rhs = self.chop()?;
            return Ok(Formula::chop(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lt if self.glued() && *self.peek_at(1) == Tok::Gt => {
                self.bump();
                self.bump();
                Ok(Formula::diamond(self.unary()?))
            }
            Tok::LBrack if self.glued() && *self.peek_at(1) == Tok::RBrack => {
                self.bump();
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::Ident(s)
                if (s == "ex" || s == "all")
                    && matches!(self.peek_at(1), Tok::Ident(_))
                    && *self.peek_at(2) == Tok::Dot =>
            {
                let exists = s == "ex";
                self.bump();
                let v = self.ident("quantified variable")?;
                check_var_name(self, &v)?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.formula()?;
                Ok(if exists {
                    Formula::Ex(v, Box::new(body))
                } else {
                    Formula::AllQ(v, Box::new(body))
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Lt => {
                self.bump();
                let p = self.prop()?;
                self.expect(Tok::Gt, "`>` closing a point formula")?;
                Ok(Formula::Point(p))
            }
            Tok::LBrack => {
                if self.glued() && *self.peek_at(1) == Tok::LBrack {
                    self.bump();
                    self.bump();
                    let p = self.prop()?;
                    self.close_double(Tok::RBrack, "`]]`")?;
                    Ok(Formula::All(p))
                } else {
                    self.bump();
                    let p = self.prop()?;
                    self.expect(Tok::RBrack, "`]`")?;
                    Ok(Formula::AllButLast(p))
                }
            }
            Tok::LBrace if self.glued() && *self.peek_at(1) == Tok::LBrace => {
                self.bump();
                self.bump();
                let p = self.prop()?;
                self.close_double(Tok::RBrace, "`}}`")?;
                Ok(Formula::Unit(p))
            }
            Tok::Ident(s) => self.ident_atom(s),
            other => self.err(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn close_double(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t && *self.peek_at(1) == t {
            self.bump();
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn ident_atom(&mut self, s: String) -> Result<Formula> {
        match s.as_str() {
            "true" => {
                self.bump();
                Ok(Formula::True)
            }
            "false" => {
                self.bump();
                Ok(Formula::False)
            }
            "pt" => {
                self.bump();
                Ok(Formula::Pt)
            }
            "ext" => {
                self.bump();
                Ok(Formula::Ext)
            }
            "slen" => {
                self.bump();
                let op = self.cmp()?;
                Ok(Formula::SLen(op, self.bound()?))
            }
            "scount" | "sdur" => {
                self.bump();
                let p = self.prop_unary()?;
                let op = self.cmp()?;
                let c = self.bound()?;
                Ok(if s == "scount" {
                    Formula::SCount(p, op, c)
                } else {
                    Formula::SDur(p, op, c)
                })
            }
            "pref" if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::pref(f))
            }
            "EP" if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let p = self.prop()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::Ep(p))
            }
            "KBOUNDED" if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::Comma, "`,`")?;
                let n = self.bound()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::KBounded(Box::new(f), n))
            }
            _ => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.arg()?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                }
                Ok(Formula::Call(s, args))
            }
        }
    }

    fn arg(&mut self) -> Result<Arg> {
        let ends_arg = |t: &Tok| matches!(t, Tok::Comma | Tok::RParen);
        match self.peek().clone() {
            Tok::Ident(s) if ends_arg(self.peek_at(1)) && !is_keyword(&s) => {
                self.bump();
                Ok(Arg::Ident(s))
            }
            Tok::Ident(s) if *self.peek_at(1) == Tok::Minus && !is_keyword(&s) => {
                Ok(Arg::Const(self.bound()?))
            }
            Tok::Int(_) | Tok::Minus => Ok(Arg::Const(self.bound()?)),
            _ => Ok(Arg::Formula(self.formula()?)),
        }
    }

    fn cmp(&mut self) -> Result<CmpOp> {
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Eq => CmpOp::Eq,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            other => {
                return self.err(format!(
                    "expected a comparison operator, found {}",
                    describe(other)
                ))
            }
        };
        self.bump();
        Ok(op)
    }

    fn bound(&mut self) -> Result<Bound> {
        let mut lhs = self.bound_primary()?;
        while *self.peek() == Tok::Minus {
            self.bump();
            let rhs = self.bound_primary()?;
            lhs = Bound::Sub(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn bound_primary(&mut self) -> Result<Bound> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Bound::Lit(v))
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(Bound::Name(s))
            }
            Tok::LParen => {
                self.bump();
                let b = self.bound()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(b)
            }
            Tok::Minus => {
                let t = &self.toks[self.pos];
                Err(Error::NegativeConstant(format!(
                    "line {}, column {}",
                    t.line, t.col
                )))
            }
            other => self.err(format!("expected a constant, found {}", describe(&other))),
        }
    }

    // ---- propositions ----

    fn prop(&mut self) -> Result<Prop> {
        let mut lhs = self.prop_implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.prop_implies()?;
            lhs = Prop::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prop_implies(&mut self) -> Result<Prop> {
        let lhs = self.prop_or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.prop_implies()?;
            return Ok(Prop::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn prop_or(&mut self) -> Result<Prop> {
        let mut lhs = self.prop_and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.prop_and()?;
            lhs = Prop::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_and(&mut self) -> Result<Prop> {
        let mut lhs = self.prop_unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.prop_unary()?;
            lhs = Prop::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_unary(&mut self) -> Result<Prop> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Prop::not(self.prop_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let p = self.prop()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Prop::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Prop::False)
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(Prop::Var(s))
            }
            other => self.err(format!("expected a proposition, found {}", describe(&other))),
        }
    }

    // ---- specification files ----

    fn spec(&mut self) -> Result<SpecFile> {
        let mut spec = SpecFile::default();
        if *self.peek() == Tok::Hash {
            self.bump();
            if !self.is_kw("qsf") {
                return self.err("expected `qsf` after `#`");
            }
            self.bump();
            match self.bump() {
                Tok::Str(s) => spec.name = s,
                _ => return self.err("expected a quoted specification name"),
            }
        }
        let mut seen = HashSet::new();
        while *self.peek() != Tok::Eof {
            let kw = self.ident("a block keyword")?;
            if !seen.insert(kw.clone()) {
                return Err(Error::Duplicate(format!("block `{kw}`")));
            }
            self.expect(Tok::LBrace, "`{`")?;
            match kw.as_str() {
                "interface" => self.interface(&mut spec)?,
                "definitions" => self.definitions(&mut spec)?,
                "indefinitions" => self.indefinitions(&mut spec)?,
                "hardreq" => spec.hard = self.requirement()?,
                "softreq" => spec.soft = self.requirement()?,
                other => {
                    self.pos -= 2;
                    return self.err(format!("unknown block `{other}`"));
                }
            }
            self.expect(Tok::RBrace, "`}`")?;
        }
        Ok(spec)
    }

    fn id_list(&mut self, what: &str) -> Result<Vec<String>> {
        let mut out = vec![self.ident(what)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn interface(&mut self, spec: &mut SpecFile) -> Result<()> {
        let mut names: HashSet<String> = HashSet::new();
        while *self.peek() != Tok::RBrace {
            let kw = self.ident("`input`, `output` or `constant`")?;
            match kw.as_str() {
                "input" | "output" => {
                    for v in self.id_list("a variable name")? {
                        check_var_name(self, &v)?;
                        if !names.insert(v.clone()) {
                            return Err(Error::Duplicate(v));
                        }
                        if kw == "input" {
                            spec.inputs.push(v);
                        } else {
                            spec.outputs.push(v);
                        }
                    }
                }
                "constant" => loop {
                    let n = self.ident("a constant name")?;
                    self.expect(Tok::Eq, "`=`")?;
                    let v = match self.bump() {
                        Tok::Int(v) => v,
                        Tok::Minus => return Err(Error::NegativeConstant(n)),
                        _ => return self.err("expected an integer constant value"),
                    };
                    if !names.insert(n.clone()) {
                        return Err(Error::Duplicate(n));
                    }
                    spec.constants.push((n, v));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                },
                other => {
                    self.pos -= 1;
                    return self.err(format!("unknown declaration `{other}`"));
                }
            }
            self.expect(Tok::Semi, "`;`")?;
        }
        Ok(())
    }

    fn definitions(&mut self, spec: &mut SpecFile) -> Result<()> {
        while *self.peek() != Tok::RBrace {
            if !self.is_kw("dc") {
                return self.err("expected `dc`");
            }
            self.bump();
            let name = self.ident("a definition name")?;
            if spec.definitions.iter().any(|d| d.name == name) {
                return Err(Error::Duplicate(name));
            }
            self.expect(Tok::LParen, "`(`")?;
            let params = if *self.peek() == Tok::RParen {
                Vec::new()
            } else {
                self.id_list("a parameter name")?
            };
            self.expect(Tok::RParen, "`)`")?;
            self.expect(Tok::LBrace, "`{`")?;
            let mut body = Vec::new();
            while *self.peek() != Tok::RBrace {
                body.push(self.formula()?);
                self.expect(Tok::Semi, "`;`")?;
            }
            self.expect(Tok::RBrace, "`}`")?;
            if body.is_empty() {
                return self.err(format!("definition `{name}` has an empty body"));
            }
            spec.definitions.push(Definition {
                name,
                params,
                body: Formula::all(body),
            });
        }
        Ok(())
    }

    fn indefinitions(&mut self, spec: &mut SpecFile) -> Result<()> {
        while *self.peek() != Tok::RBrace {
            let w = self.ident("an indicator variable")?;
            self.expect(Tok::Colon, "`:`")?;
            let f = self.formula()?;
            self.expect(Tok::Semi, "`;`")?;
            if spec.indicators.iter().any(|(x, _)| *x == w) {
                return Err(Error::Duplicate(w));
            }
            spec.indicators.push((w, f));
        }
        Ok(())
    }

    fn requirement(&mut self) -> Result<Requirement> {
        let mut req = Requirement::default();
        while *self.peek() != Tok::RBrace {
            if self.is_kw("useind") && matches!(self.peek_at(1), Tok::Ident(_)) {
                self.bump();
                req.useind.extend(self.id_list("an indicator variable")?);
            } else {
                req.formulas.push(self.formula()?);
            }
            self.expect(Tok::Semi, "`;`")?;
        }
        Ok(req)
    }
}

const KEYWORDS: &[&str] = &[
    "true", "false", "pt", "ext", "slen", "scount", "sdur", "ex", "all",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn check_var_name(p: &Parser, v: &str) -> Result<()> {
    if is_keyword(v) || !v.starts_with(|c: char| c.is_ascii_alphabetic()) {
        return p.err(format!("`{v}` is not a valid variable name"));
    }
    Ok(())
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Eof => "end of input".into(),
        other => format!("`{}`", symbol(other)),
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::Hash => "#",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrack => "[",
        Tok::RBrack => "]",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Lt => "<",
        Tok::Gt => ">",
        Tok::Le => "<=",
        Tok::Ge => ">=",
        Tok::Eq => "=",
        Tok::Implies => "=>",
        Tok::Iff => "<=>",
        Tok::Not => "!",
        Tok::AndAnd => "&&",
        Tok::OrOr => "||",
        Tok::Caret => "^",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::Colon => ":",
        Tok::Dot => ".",
        Tok::Minus => "-",
        Tok::Pipe => "|",
        _ => "?",
    }
}

/// Parses a formula without resolving names: bare identifiers and calls are
/// kept as `Formula::Call`, symbolic constants as `Bound::Name`.
pub fn parse_formula_unchecked(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after formula", describe(p.peek())));
    }
    Ok(f)
}

/// Parses a standalone formula over the variables of `env`. Built-in
/// robustness combinators are expanded; a bare variable name in formula
/// position means the variable holds at the last point (`EP(v)`).
pub fn parse_formula(text: &str, env: &[String]) -> Result<Formula> {
    let raw = parse_formula_unchecked(text)?;
    let spec = SpecFile {
        inputs: env.to_vec(),
        ..SpecFile::default()
    };
    let f = Resolver::new(&spec)?.resolve_formula(&raw)?;
    for v in f.free_vars() {
        if !env.contains(&v) {
            return Err(Error::UnknownVariable(v));
        }
    }
    Ok(f)
}

/// Parses a specification file.
pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let mut p = Parser::new(text)?;
    let spec = p.spec()?;
    for (w, _) in &spec.indicators {
        if !spec.outputs.contains(w) {
            return Err(Error::UnknownVariable(format!(
                "{w} (indicator variables must be declared outputs)"
            )));
        }
    }
    for req in [&spec.hard, &spec.soft] {
        for w in &req.useind {
            if !spec.indicators.iter().any(|(x, _)| x == w) {
                return Err(Error::UnknownVariable(format!("{w} (no indicator definition)")));
            }
        }
    }
    Ok(spec)
}
