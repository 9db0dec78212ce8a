//! Surface syntax parser for process libraries and networks.
//!
//! ```text
//! document  ::= decl*
//! decl      ::= "sort" ident ("," ident)* ";"
//!             | "var" ident ("," ident)* ":" ident ";"
//!             | "const" ident ("," ident)* ":" ident ";"
//!             | "ctor" ident "(" [ident ("," ident)*] ")" ":" ident ";"
//!             | "def" ident "(" [param (("," | ";") param)*] ")" "=" proc [";"]
//!             | "network" network [";"]
//! param     ::= ident [":" ident]
//! proc      ::= prefix ("+" prefix)*
//! prefix    ::= "[" "[" ident ":=" expr "]" "]" prefix
//!             | "[" formula "]" prefix
//!             | "broadcast" "(" expr ")" "." prefix
//!             | "groupcast" "(" expr "," expr ")" "." prefix
//!             | "unicast" "(" expr "," expr ")" "." prefix ">" prefix
//!             | "send" "(" expr ")" "." prefix
//!             | "deliver" "(" expr ")" "." prefix
//!             | "receive" "(" ident ")" "." prefix
//!             | ident ["(" [expr (("," | ";") expr)*] ")"]
//!             | "(" proc ")"
//! formula   ::= disj ["->" formula]
//! disj      ::= conj ("||" conj)*
//! conj      ::= unary ("&&" unary)*
//! unary     ::= "!" unary | "(" formula ")" | "true" | "false"
//!             | expr [relop expr]
//! relop     ::= "=" | "!=" | "<" | "<=" | ">" | ">=" | "in" | "notin"
//! expr      ::= term (("+" | "-") term)*
//! term      ::= number | "true" | "false" | ident ["(" [expr ("," expr)*] ")"]
//!             | "(" expr ("," expr)* ")" | "{" [expr ("," expr)*] "}"
//!             | "{" "|->" "}" | "{" expr "|->" expr ("," expr "|->" expr)* "}"
//!             | "[" [expr ("," expr)*] "]"
//! network   ::= "[" nodes "]" | nodes
//! nodes     ::= nodeterm ("||" nodeterm)*
//! nodeterm  ::= "(" nodes ")" | expr ":" par ":" expr
//! par       ::= parterm ("<<|" parterm)*
//! parterm   ::= "(" par ")" | ["{" [ident ":=" expr ("," ident ":=" expr)*] "}" ","] proc
//! ```
//!
//! `nodes` nests to the right and `par` to the left. Comments run from `#`
//! to the end of the line.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::eval::eval;
use crate::lexer::{lex, Tok, Token};
use crate::signature::{Signature, SignatureError};
use crate::syntax::{
    Expr, Formula, NetworkExpression, NodeExpression, ParallelProcess, Param, PartialNetwork,
    Proc, ProcId, ProcessDefinition, Program, RelOp,
};
use crate::valuation::Valuation;
use crate::value::{sym, Sort, Sym, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown operator or constructor `{0}`")]
    UnknownOperator(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("`{name}` expects {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("duplicate node address `{0}`")]
    DuplicateNode(String),
    #[error("a network needs at least one node")]
    EmptyNetwork,
    #[error("process `{0}` is defined twice")]
    DuplicateProcess(String),
    #[error("{0}")]
    Signature(#[from] SignatureError),
    #[error("cannot evaluate: {0}")]
    Eval(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

/// A parsed source file: definitions plus an optional network.
#[derive(Clone, Debug)]
pub struct Document {
    pub program: Program,
    pub network: Option<NetworkExpression>,
}

/// Parses a whole document against the built-in signature.
pub fn parse_document(src: &str) -> Result<Document, ParseError> {
    parse_document_with(Program::new(Signature::new()), src)
}

/// Parses declarations and definitions into an existing program, e.g. one
/// whose signature already carries natively implemented operators.
pub fn parse_document_with(program: Program, src: &str) -> Result<Document, ParseError> {
    let mut p = Parser::new(program, src)?;
    let network = p.document()?;
    Ok(Document {
        program: p.program,
        network,
    })
}

/// Parses a single network term; process names must already be defined in `program`.
pub fn parse_network(program: &mut Program, src: &str) -> Result<NetworkExpression, ParseError> {
    let mut p = Parser::new(std::mem::take(program), src)?;
    let result = p.network().and_then(|n| {
        p.expect(&Tok::Eof)?;
        p.check_calls()?;
        Ok(n)
    });
    *program = p.program;
    result
}

/// Parses a single formula over the program's signature; any identifier not
/// declared as a constant is read as a variable.
pub fn parse_formula(program: &Program, src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(program.clone(), src)?;
    p.open_scope = true;
    let f = p.formula()?;
    p.expect(&Tok::Eof)?;
    Ok(f)
}

/// Parses a closed expression and evaluates it.
pub fn parse_value(program: &Program, src: &str) -> Result<Value, ParseError> {
    let mut p = Parser::new(program.clone(), src)?;
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    let (line, col) = (p.toks[0].line, p.toks[0].col);
    eval(&p.program.sig, &Valuation::new(), &e).map_err(|err| ParseError {
        line,
        col,
        kind: ParseErrorKind::Eval(err.to_string()),
    })
}

const KEYWORDS: &[&str] = &[
    "sort", "var", "const", "ctor", "def", "network", "broadcast", "groupcast", "unicast", "send",
    "deliver", "receive", "true", "false", "in", "notin",
];

struct CallSite {
    name: Sym,
    args: usize,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    program: Program,
    /// Names usable as variables in the current definition or leaf.
    locals: HashSet<Sym>,
    /// Treat unknown identifiers as variables (formulas parsed standalone).
    open_scope: bool,
    calls: Vec<CallSite>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(program: Program, src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            program,
            locals: HashSet::new(),
            open_scope: false,
            calls: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[pos.min(self.toks.len() - 1)];
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        self.err_at(self.pos, kind)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.err(ParseErrorKind::Syntax(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        )))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            let wanted = match t {
                Tok::Eof => "end of input".to_string(),
                other => other.describe(),
            };
            Err(self.unexpected(&wanted))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn sort(&mut self) -> PResult<Sort> {
        let pos = self.pos;
        let name = self.ident()?;
        if !self.program.sig.has_sort(&name) {
            return Err(self.err_at(pos, ParseErrorKind::UnknownSort(name)));
        }
        Ok(Sort::new(&name))
    }

    fn sig_err(&self, pos: usize, e: SignatureError) -> ParseError {
        let kind = match e {
            SignatureError::UnknownSort(s) => ParseErrorKind::UnknownSort(s),
            other => ParseErrorKind::Signature(other),
        };
        self.err_at(pos, kind)
    }

    fn ident_list(&mut self) -> PResult<Vec<(usize, String)>> {
        let mut out = vec![(self.pos, self.ident()?)];
        while self.eat(&Tok::Comma) {
            out.push((self.pos, self.ident()?));
        }
        Ok(out)
    }

    // ---- declarations ----

    fn document(&mut self) -> PResult<Option<NetworkExpression>> {
        let mut network = None;
        loop {
            if self.eat(&Tok::Eof) {
                break;
            }
            if self.eat_kw("sort") {
                for (pos, name) in self.ident_list()? {
                    self.program
                        .sig
                        .declare_sort(&name)
                        .map_err(|e| self.sig_err(pos, e))?;
                }
                self.expect(&Tok::Semi)?;
            } else if self.eat_kw("var") {
                let names = self.ident_list()?;
                self.expect(&Tok::Colon)?;
                let sort = self.sort()?;
                for (pos, name) in names {
                    self.program
                        .sig
                        .declare_var(&name, &sort)
                        .map_err(|e| self.sig_err(pos, e))?;
                }
                self.expect(&Tok::Semi)?;
            } else if self.eat_kw("const") {
                let names = self.ident_list()?;
                self.expect(&Tok::Colon)?;
                let sort = self.sort()?;
                for (pos, name) in names {
                    self.program
                        .sig
                        .declare_atom(&name, &sort)
                        .map_err(|e| self.sig_err(pos, e))?;
                }
                self.expect(&Tok::Semi)?;
            } else if self.eat_kw("ctor") {
                let pos = self.pos;
                let name = self.ident()?;
                self.expect(&Tok::LParen)?;
                let mut args = Vec::new();
                if !self.eat(&Tok::RParen) {
                    args.push(self.sort()?);
                    while self.eat(&Tok::Comma) {
                        args.push(self.sort()?);
                    }
                    self.expect(&Tok::RParen)?;
                }
                self.expect(&Tok::Colon)?;
                let result = self.sort()?;
                self.program
                    .sig
                    .declare_ctor(&name, args, result)
                    .map_err(|e| self.sig_err(pos, e))?;
                self.expect(&Tok::Semi)?;
            } else if self.eat_kw("def") {
                self.definition()?;
                self.eat(&Tok::Semi);
            } else if self.eat_kw("network") {
                if network.is_some() {
                    return Err(self.err(ParseErrorKind::Syntax("only one network per document".into())));
                }
                network = Some(self.network()?);
                self.eat(&Tok::Semi);
            } else {
                return Err(self.unexpected("a declaration"));
            }
        }
        self.check_calls()?;
        Ok(network)
    }

    fn definition(&mut self) -> PResult<()> {
        let pos = self.pos;
        let name = self.ident()?;
        if self.program.def(&name).is_some() {
            return Err(self.err_at(pos, ParseErrorKind::DuplicateProcess(name)));
        }
        self.expect(&Tok::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let pname = self.ident()?;
                let sort = if self.eat(&Tok::Colon) {
                    Some(self.sort()?)
                } else {
                    self.program.sig.var_sort(&pname).cloned()
                };
                params.push(Param {
                    name: sym(&pname),
                    sort,
                });
                if !(self.eat(&Tok::Comma) || self.eat(&Tok::Semi)) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        self.expect(&Tok::Eq)?;
        self.locals = params.iter().map(|p| p.name.clone()).collect();
        let body = self.process()?;
        self.locals.clear();
        self.program.define(ProcessDefinition {
            name: sym(&name),
            params,
            body,
        });
        Ok(())
    }

    fn check_calls(&self) -> PResult<()> {
        for c in &self.calls {
            let err = |kind| ParseError {
                line: c.line,
                col: c.col,
                kind,
            };
            match self.program.def(&c.name) {
                None => return Err(err(ParseErrorKind::UnknownProcess(c.name.to_string()))),
                Some(d) if d.params.len() != c.args => {
                    return Err(err(ParseErrorKind::Arity {
                        name: c.name.to_string(),
                        expected: d.params.len(),
                        got: c.args,
                    }))
                }
                _ => {}
            }
        }
        Ok(())
    }

    // ---- processes ----

    fn process(&mut self) -> PResult<ProcId> {
        let mut acc = self.prefix()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.prefix()?;
            acc = self.program.intern(Proc::Choice(acc, rhs));
        }
        Ok(acc)
    }

    fn dot_prefix(&mut self) -> PResult<ProcId> {
        self.expect(&Tok::Dot)?;
        self.prefix()
    }

    fn prefix(&mut self) -> PResult<ProcId> {
        match self.peek().clone() {
            Tok::LBracket => {
                let is_assign = self.peek_at(1) == &Tok::LBracket
                    && matches!(self.peek_at(2), Tok::Ident(_))
                    && self.peek_at(3) == &Tok::Assign;
                self.bump();
                if is_assign {
                    self.bump();
                    let var = self.ident()?;
                    self.expect(&Tok::Assign)?;
                    let expr = self.expr()?;
                    self.expect(&Tok::RBracket)?;
                    self.expect(&Tok::RBracket)?;
                    self.locals.insert(sym(&var));
                    let then = self.prefix()?;
                    Ok(self.program.intern(Proc::Assign {
                        var: sym(&var),
                        expr,
                        then,
                    }))
                } else {
                    let cond = self.formula()?;
                    self.expect(&Tok::RBracket)?;
                    let then = self.prefix()?;
                    Ok(self.program.intern(Proc::Guard { cond, then }))
                }
            }
            Tok::LParen => {
                self.bump();
                let p = self.process()?;
                self.expect(&Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(kw) => match kw.as_str() {
                "broadcast" | "send" | "deliver" => {
                    self.bump();
                    self.expect(&Tok::LParen)?;
                    let e = self.expr()?;
                    self.expect(&Tok::RParen)?;
                    let then = self.dot_prefix()?;
                    let node = match kw.as_str() {
                        "broadcast" => Proc::Broadcast { msg: e, then },
                        "send" => Proc::Send { msg: e, then },
                        _ => Proc::Deliver { data: e, then },
                    };
                    Ok(self.program.intern(node))
                }
                "groupcast" | "unicast" => {
                    self.bump();
                    self.expect(&Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(&Tok::Comma)?;
                    let msg = self.expr()?;
                    self.expect(&Tok::RParen)?;
                    let then = self.dot_prefix()?;
                    let node = if kw == "groupcast" {
                        Proc::Groupcast { dests: a, msg, then }
                    } else {
                        self.expect(&Tok::Gt)?;
                        let otherwise = self.prefix()?;
                        Proc::Unicast {
                            dest: a,
                            msg,
                            then,
                            otherwise,
                        }
                    };
                    Ok(self.program.intern(node))
                }
                "receive" => {
                    self.bump();
                    self.expect(&Tok::LParen)?;
                    let var = self.ident()?;
                    self.expect(&Tok::RParen)?;
                    self.locals.insert(sym(&var));
                    let then = self.dot_prefix()?;
                    Ok(self.program.intern(Proc::Receive { var: sym(&var), then }))
                }
                _ => {
                    let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
                    let name = self.ident()?;
                    let mut args = Vec::new();
                    if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if !(self.eat(&Tok::Comma) || self.eat(&Tok::Semi)) {
                                break;
                            }
                        }
                        self.expect(&Tok::RParen)?;
                    }
                    self.calls.push(CallSite {
                        name: sym(&name),
                        args: args.len(),
                        line,
                        col,
                    });
                    Ok(self.program.intern(Proc::Call { name: sym(&name), args }))
                }
            },
            _ => Err(self.unexpected("a process")),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> PResult<Formula> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::OrOr) {
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::AndAnd) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn relop(&self) -> Option<RelOp> {
        match self.peek() {
            Tok::Eq => Some(RelOp::Eq),
            Tok::Neq => Some(RelOp::Neq),
            Tok::Lt => Some(RelOp::Lt),
            Tok::Le => Some(RelOp::Le),
            Tok::Gt => Some(RelOp::Gt),
            Tok::Ge => Some(RelOp::Ge),
            Tok::Ident(s) if s == "in" => Some(RelOp::In),
            Tok::Ident(s) if s == "notin" => Some(RelOp::NotIn),
            _ => None,
        }
    }

    fn continues_expr(&self) -> bool {
        self.relop().is_some() || matches!(self.peek(), Tok::Plus | Tok::Minus)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.peek() == &Tok::LParen {
            let save = self.pos;
            self.bump();
            if let Ok(f) = self.formula() {
                if self.eat(&Tok::RParen) && !self.continues_expr() {
                    return Ok(f);
                }
            }
            self.pos = save;
        }
        if matches!(self.peek(), Tok::Ident(s) if s == "true" || s == "false") {
            let save = self.pos;
            let is_true = self.is_kw("true");
            self.bump();
            if !self.continues_expr() {
                return Ok(if is_true { Formula::True } else { Formula::False });
            }
            self.pos = save;
        }
        let lhs = self.expr()?;
        match self.relop() {
            Some(op) => {
                self.bump();
                let rhs = self.expr()?;
                Ok(Formula::Rel(op, lhs, rhs))
            }
            None => Ok(Formula::Holds(lhs)),
        }
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let mut acc = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => "+",
                Tok::Minus => "-",
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            acc = Expr::app(op, vec![acc, rhs]);
        }
        Ok(acc)
    }

    fn expr_list(&mut self, close: &Tok) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(close)?;
        Ok(out)
    }

    fn term(&mut self) -> PResult<Expr> {
        let pos = self.pos;
        match self.bump() {
            Tok::Num(n) => Ok(Expr::nat(n)),
            Tok::LParen => {
                let mut items = self.expr_list(&Tok::RParen)?;
                match items.len() {
                    0 => Err(self.err_at(pos, ParseErrorKind::Syntax("empty parentheses".into()))),
                    1 => Ok(items.pop().unwrap()),
                    _ => Ok(Expr::Tuple(items)),
                }
            }
            Tok::LBracket => Ok(Expr::Seq(self.expr_list(&Tok::RBracket)?)),
            Tok::LBrace => {
                if self.eat(&Tok::MapsTo) {
                    self.expect(&Tok::RBrace)?;
                    return Ok(Expr::Map(Vec::new()));
                }
                if self.eat(&Tok::RBrace) {
                    return Ok(Expr::Set(Vec::new()));
                }
                let first = self.expr()?;
                if self.eat(&Tok::MapsTo) {
                    let mut pairs = vec![(first, self.expr()?)];
                    while self.eat(&Tok::Comma) {
                        let k = self.expr()?;
                        self.expect(&Tok::MapsTo)?;
                        pairs.push((k, self.expr()?));
                    }
                    self.expect(&Tok::RBrace)?;
                    return Ok(Expr::Map(pairs));
                }
                let mut items = vec![first];
                while self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(&Tok::RBrace)?;
                Ok(Expr::Set(items))
            }
            Tok::Ident(name) if name == "true" => Ok(Expr::Const(Value::Bool(true))),
            Tok::Ident(name) if name == "false" => Ok(Expr::Const(Value::Bool(false))),
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                if self.peek() == &Tok::LParen {
                    self.bump();
                    let args = self.expr_list(&Tok::RParen)?;
                    return self.application(pos, &name, args);
                }
                self.identifier(pos, &name)
            }
            _ => {
                self.pos = pos;
                Err(self.unexpected("an expression"))
            }
        }
    }

    fn application(&self, pos: usize, name: &str, args: Vec<Expr>) -> PResult<Expr> {
        let sig = &self.program.sig;
        if let Some(c) = sig.ctor_def(name) {
            if c.args.len() != args.len() {
                return Err(self.err_at(
                    pos,
                    ParseErrorKind::Arity {
                        name: name.into(),
                        expected: c.args.len(),
                        got: args.len(),
                    },
                ));
            }
            return Ok(Expr::Ctor(sym(name), args));
        }
        if let Some(op) = sig.op_def(name) {
            if let Some(n) = op.arity {
                if n != args.len() {
                    return Err(self.err_at(
                        pos,
                        ParseErrorKind::Arity {
                            name: name.into(),
                            expected: n,
                            got: args.len(),
                        },
                    ));
                }
            }
            return Ok(Expr::App(sym(name), args));
        }
        Err(self.err_at(pos, ParseErrorKind::UnknownOperator(name.into())))
    }

    fn identifier(&self, pos: usize, name: &str) -> PResult<Expr> {
        let sig = &self.program.sig;
        if self.locals.contains(name) || sig.var_sort(name).is_some() {
            return Ok(Expr::Var(sym(name)));
        }
        if let Some((_, v)) = sig.constant(name) {
            return Ok(Expr::Const(v.clone()));
        }
        if let Some(op) = sig.op_def(name) {
            if op.arity == Some(0) {
                return Ok(Expr::App(sym(name), Vec::new()));
            }
        }
        if self.open_scope {
            return Ok(Expr::Var(sym(name)));
        }
        Err(self.err_at(pos, ParseErrorKind::UnknownIdentifier(name.into())))
    }

    // ---- networks ----

    fn network(&mut self) -> PResult<NetworkExpression> {
        let start = self.pos;
        let net = if self.eat(&Tok::LBracket) {
            if self.peek() == &Tok::RBracket {
                return Err(self.err(ParseErrorKind::EmptyNetwork));
            }
            let m = self.nodes()?;
            self.expect(&Tok::RBracket)?;
            NetworkExpression::Complete(m)
        } else {
            if matches!(self.peek(), Tok::Eof | Tok::Semi) {
                return Err(self.err(ParseErrorKind::EmptyNetwork));
            }
            NetworkExpression::Partial(self.nodes()?)
        };
        let mut seen = BTreeSet::new();
        for ip in net.inner().addresses() {
            if !seen.insert(ip.clone()) {
                return Err(self.err_at(start, ParseErrorKind::DuplicateNode(ip.to_string())));
            }
        }
        Ok(net)
    }

    fn nodes(&mut self) -> PResult<PartialNetwork> {
        let first = self.node_term()?;
        if self.eat(&Tok::OrOr) {
            let rest = self.nodes()?;
            return Ok(PartialNetwork::par(first, rest));
        }
        Ok(first)
    }

    fn node_term(&mut self) -> PResult<PartialNetwork> {
        if self.peek() == &Tok::LParen {
            self.bump();
            let m = self.nodes()?;
            self.expect(&Tok::RParen)?;
            return Ok(m);
        }
        let ip = self.closed_value()?;
        self.expect(&Tok::Colon)?;
        let process = self.par()?;
        self.expect(&Tok::Colon)?;
        let pos = self.pos;
        let range = match self.closed_value()? {
            Value::Set(s) => (*s).clone(),
            other => {
                return Err(self.err_at(pos, ParseErrorKind::Syntax(format!("range must be a set, got {other}"))))
            }
        };
        Ok(PartialNetwork::Node(NodeExpression { ip, process, range }))
    }

    fn closed_value(&mut self) -> PResult<Value> {
        let pos = self.pos;
        let e = self.expr()?;
        eval(&self.program.sig, &Valuation::new(), &e)
            .map_err(|err| self.err_at(pos, ParseErrorKind::Eval(err.to_string())))
    }

    fn par(&mut self) -> PResult<ParallelProcess> {
        let mut acc = self.par_term()?;
        while self.eat(&Tok::LeftMerge) {
            let rhs = self.par_term()?;
            acc = ParallelProcess::par(acc, rhs);
        }
        Ok(acc)
    }

    fn par_term(&mut self) -> PResult<ParallelProcess> {
        if self.peek() == &Tok::LParen {
            let save = (self.pos, self.calls.len());
            self.bump();
            if let Ok(p) = self.par() {
                if self.eat(&Tok::RParen) {
                    return Ok(p);
                }
            }
            self.pos = save.0;
            self.calls.truncate(save.1);
        }
        let mut env = Valuation::new();
        let is_valuation = self.peek() == &Tok::LBrace
            && (self.peek_at(1) == &Tok::RBrace
                || (matches!(self.peek_at(1), Tok::Ident(_)) && self.peek_at(2) == &Tok::Assign));
        if is_valuation {
            self.bump();
            if !self.eat(&Tok::RBrace) {
                loop {
                    let name = self.ident()?;
                    self.expect(&Tok::Assign)?;
                    let v = self.closed_value()?;
                    env.insert(sym(&name), v);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RBrace)?;
            }
            self.expect(&Tok::Comma)?;
        }
        self.locals = env.vars().cloned().collect();
        let proc = self.process()?;
        self.locals.clear();
        Ok(ParallelProcess::leaf(env, proc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "
        const a, b : IP;
        const d, e : DATA;
        ctor mg(DATA, IP) : MSG;
        var data : DATA;
        var dip : IP;
        var m : MSG;
        def X(ip; data, dip) = broadcast(mg(data, dip)) . Y(ip)
        def Y(ip) = receive(m) . ( [m = mg(data, dip) && dip = ip] deliver(data) . Y(ip)
                                 + [m = mg(data, dip) && dip != ip] X(ip; data, dip) )
        network [ a : X(a; d, b) : {b} || b : Y(b) : {a} ]
    ";

    #[test]
    fn toy_document() {
        let doc = parse_document(TOY).unwrap();
        let net = doc.network.unwrap();
        assert!(net.is_complete());
        assert_eq!(net.inner().addresses(), vec![Value::atom("a"), Value::atom("b")]);
        let x = doc.program.def("X").unwrap();
        assert_eq!(x.params.len(), 3);
        assert!(matches!(doc.program.proc(x.body), Proc::Broadcast { .. }));
    }

    #[test]
    fn deterministic() {
        let a = parse_document(TOY).unwrap();
        let b = parse_document(TOY).unwrap();
        assert_eq!(a.network, b.network);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_document("const a : IP;\nnetwork [ ]").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyNetwork);
        assert_eq!(err.line, 2);

        let err = parse_document("def X() = Z()").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownProcess("Z".into()));

        let err = parse_document("var x : FOO;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownSort("FOO".into()));

        let err = parse_document("def X() = broadcast(zap(1)).X()").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownOperator("zap".into()));

        let err = parse_document("const a : IP;\ndef X() = X()\nnetwork [ a : X() : {} || a : X() : {} ]")
            .unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateNode("a".into()));

        let err = parse_document("def X() = broadcast(1).\n  X(1)").unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::Arity {
                name: "X".into(),
                expected: 0,
                got: 1
            }
        );
        assert_eq!((err.line, err.col), (2, 3));

        let err = parse_document("def X() = broadcast(1) X()").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn assignment_versus_guard() {
        let doc = parse_document(
            "var q : NAT;\n def P(x) = [[q := []]] [[] = q] ([[x := x + 1]] P(x) + [x <= 3 -> (x) = 2] P(x))",
        )
        .unwrap();
        let p = doc.program.def("P").unwrap();
        let Proc::Assign { then, .. } = doc.program.proc(p.body) else {
            panic!("expected assignment")
        };
        assert!(matches!(doc.program.proc(*then), Proc::Guard { .. }));
    }

    #[test]
    fn parallel_and_partial_networks() {
        let src = "
            const a, b, c : IP;
            var msg : MSG;
            def P() = receive(msg) . P()
            network a : {x := 1}, P() <<| (P() <<| P()) : {b} || (b : P() : {} || c : P() : {a, b})
        ";
        let doc = parse_document(src).unwrap();
        let net = doc.network.unwrap();
        assert!(!net.is_complete());
        let PartialNetwork::Par(left, right) = net.inner() else {
            panic!()
        };
        let PartialNetwork::Node(n) = left.as_ref() else {
            panic!()
        };
        assert!(matches!(&n.process, ParallelProcess::Par(l, r)
            if matches!(l.as_ref(), ParallelProcess::Leaf { .. })
            && matches!(r.as_ref(), ParallelProcess::Par(..))));
        assert!(matches!(right.as_ref(), PartialNetwork::Par(..)));
    }
}
