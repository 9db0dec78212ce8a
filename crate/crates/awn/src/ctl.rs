//! Explicit-state CTL model checking.
//!
//! Paths are maximal: they are infinite or end in a state without
//! successors. Hence `AX φ` holds vacuously in a deadlock, `EX φ` fails
//! there, and `AF φ` fails in a deadlock not satisfying `φ`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::label::Label;
use crate::lts::Lts;
use crate::syntax::NetworkExpression;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ctl<A> {
    True,
    False,
    Atom(A),
    Not(Box<Ctl<A>>),
    And(Box<Ctl<A>>, Box<Ctl<A>>),
    Or(Box<Ctl<A>>, Box<Ctl<A>>),
    Implies(Box<Ctl<A>>, Box<Ctl<A>>),
    EX(Box<Ctl<A>>),
    AX(Box<Ctl<A>>),
    EF(Box<Ctl<A>>),
    AF(Box<Ctl<A>>),
    EG(Box<Ctl<A>>),
    AG(Box<Ctl<A>>),
    EU(Box<Ctl<A>>, Box<Ctl<A>>),
    AU(Box<Ctl<A>>, Box<Ctl<A>>),
}

impl<A> Ctl<A> {
    pub fn depth(&self) -> usize {
        use Ctl::*;
        match self {
            True | False | Atom(_) => 0,
            Not(a) | EX(a) | AX(a) | EF(a) | AF(a) | EG(a) | AG(a) => 1 + a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Replaces every atom, keeping the shape.
    pub fn map_atoms<B, E>(&self, f: &mut impl FnMut(&A) -> Result<B, E>) -> Result<Ctl<B>, E> {
        self.map_atoms_dyn(f)
    }

    fn map_atoms_dyn<B, E>(&self, f: &mut dyn FnMut(&A) -> Result<B, E>) -> Result<Ctl<B>, E> {
        use Ctl::*;
        let b = |x: &Ctl<A>, f: &mut dyn FnMut(&A) -> Result<B, E>| -> Result<Box<Ctl<B>>, E> {
            Ok(Box::new(x.map_atoms_dyn(f)?))
        };
        Ok(match self {
            True => True,
            False => False,
            Atom(a) => Atom(f(a)?),
            Not(x) => Not(b(x, f)?),
            And(x, y) => And(b(x, f)?, b(y, f)?),
            Or(x, y) => Or(b(x, f)?, b(y, f)?),
            Implies(x, y) => Implies(b(x, f)?, b(y, f)?),
            EX(x) => EX(b(x, f)?),
            AX(x) => AX(b(x, f)?),
            EF(x) => EF(b(x, f)?),
            AF(x) => AF(b(x, f)?),
            EG(x) => EG(b(x, f)?),
            AG(x) => AG(b(x, f)?),
            EU(x, y) => EU(b(x, f)?, b(y, f)?),
            AU(x, y) => AU(b(x, f)?, b(y, f)?),
        })
    }

    pub fn atoms(&self) -> Vec<&A> {
        use Ctl::*;
        match self {
            True | False => Vec::new(),
            Atom(a) => vec![a],
            Not(a) | EX(a) | AX(a) | EF(a) | AF(a) | EG(a) | AG(a) => a.atoms(),
            And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => {
                let mut v = a.atoms();
                v.extend(b.atoms());
                v
            }
        }
    }
}

impl<A: fmt::Display> fmt::Display for Ctl<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Ctl::*;
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => write!(f, "{a}"),
            Not(a) => write!(f, "!{a}"),
            And(a, b) => write!(f, "({a} && {b})"),
            Or(a, b) => write!(f, "({a} || {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            EX(a) => write!(f, "EX {a}"),
            AX(a) => write!(f, "AX {a}"),
            EF(a) => write!(f, "EF {a}"),
            AF(a) => write!(f, "AF {a}"),
            EG(a) => write!(f, "EG {a}"),
            AG(a) => write!(f, "AG {a}"),
            EU(a, b) => write!(f, "E[{a} U {b}]"),
            AU(a, b) => write!(f, "A[{a} U {b}]"),
        }
    }
}

/// A finite Kripke structure: successor lists and initial states.
#[derive(Clone, Debug)]
pub struct Kripke {
    pub succ: Vec<Vec<usize>>,
    pub initial: Vec<usize>,
}

impl Kripke {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    fn preds(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.succ.len()];
        for (s, ts) in self.succ.iter().enumerate() {
            for &t in ts {
                p[t].push(s);
            }
        }
        p
    }
}

/// Computes the set of states satisfying `f`.
pub fn sat<A>(k: &Kripke, f: &Ctl<A>, atom: &dyn Fn(&A, usize) -> bool) -> Vec<bool> {
    Checker::new(k).eval(f, atom)
}

struct Checker<'k> {
    k: &'k Kripke,
    preds: Vec<Vec<usize>>,
}

impl<'k> Checker<'k> {
    fn new(k: &'k Kripke) -> Self {
        Checker { k, preds: k.preds() }
    }

    fn eval<A>(&self, f: &Ctl<A>, atom: &dyn Fn(&A, usize) -> bool) -> Vec<bool> {
        let n = self.k.len();
        use Ctl::*;
        match f {
            True => vec![true; n],
            False => vec![false; n],
            Atom(a) => (0..n).map(|s| atom(a, s)).collect(),
            Not(a) => self.eval(a, atom).into_iter().map(|x| !x).collect(),
            And(a, b) => zip(self.eval(a, atom), self.eval(b, atom), |x, y| x && y),
            Or(a, b) => zip(self.eval(a, atom), self.eval(b, atom), |x, y| x || y),
            Implies(a, b) => zip(self.eval(a, atom), self.eval(b, atom), |x, y| !x || y),
            EX(a) => {
                let s = self.eval(a, atom);
                self.k.succ.iter().map(|ts| ts.iter().any(|&t| s[t])).collect()
            }
            AX(a) => {
                let s = self.eval(a, atom);
                self.k.succ.iter().map(|ts| ts.iter().all(|&t| s[t])).collect()
            }
            EF(a) => self.eu(&vec![true; n], &self.eval(a, atom)),
            AF(a) => self.au(&vec![true; n], &self.eval(a, atom)),
            EG(a) => self.eg(&self.eval(a, atom)),
            AG(a) => {
                let neg: Vec<bool> = self.eval(a, atom).into_iter().map(|x| !x).collect();
                self.eu(&vec![true; n], &neg).into_iter().map(|x| !x).collect()
            }
            EU(a, b) => self.eu(&self.eval(a, atom), &self.eval(b, atom)),
            AU(a, b) => self.au(&self.eval(a, atom), &self.eval(b, atom)),
        }
    }

    /// Least Z with ψ ⊆ Z and φ ∩ pre∃(Z) ⊆ Z, by backward search.
    fn eu(&self, phi: &[bool], psi: &[bool]) -> Vec<bool> {
        let mut z = psi.to_vec();
        let mut queue: VecDeque<usize> = (0..z.len()).filter(|&s| z[s]).collect();
        while let Some(t) = queue.pop_front() {
            for &s in &self.preds[t] {
                if !z[s] && phi[s] {
                    z[s] = true;
                    queue.push_back(s);
                }
            }
        }
        z
    }

    /// Least Z with ψ ⊆ Z and φ ∩ ¬deadlock ∩ pre∀(Z) ⊆ Z, by counting
    /// successors still outside Z.
    fn au(&self, phi: &[bool], psi: &[bool]) -> Vec<bool> {
        let mut z = psi.to_vec();
        let mut remaining: Vec<usize> = self.k.succ.iter().map(|ts| ts.len()).collect();
        let mut queue: VecDeque<usize> = (0..z.len()).filter(|&s| z[s]).collect();
        while let Some(t) = queue.pop_front() {
            for &s in &self.preds[t] {
                remaining[s] -= 1;
                if remaining[s] == 0 && !z[s] && phi[s] {
                    z[s] = true;
                    queue.push_back(s);
                }
            }
        }
        z
    }

    /// Greatest Z ⊆ φ with every non-deadlocked state of Z having a successor in Z.
    fn eg(&self, phi: &[bool]) -> Vec<bool> {
        let mut z = phi.to_vec();
        let mut inside: Vec<usize> = self
            .k
            .succ
            .iter()
            .map(|ts| ts.iter().filter(|&&t| z[t]).count())
            .collect();
        let mut queue: VecDeque<usize> = (0..z.len())
            .filter(|&s| z[s] && !self.k.succ[s].is_empty() && inside[s] == 0)
            .collect();
        for &s in &queue {
            z[s] = false;
        }
        while let Some(t) = queue.pop_front() {
            for &s in &self.preds[t] {
                inside[s] -= 1;
                if z[s] && inside[s] == 0 {
                    z[s] = false;
                    queue.push_back(s);
                }
            }
        }
        z
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// A path through the Kripke structure; if `loop_start` is set the path
/// continues forever from that position after its last state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub path: Vec<usize>,
    pub loop_start: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtlVerdict {
    pub holds: bool,
    /// For a failing formula: a path from an initial state exhibiting the failure.
    pub counterexample: Option<Witness>,
}

/// Checks `f` in all initial states and, when it fails, builds a counterexample.
pub fn check<A>(k: &Kripke, f: &Ctl<A>, atom: &dyn Fn(&A, usize) -> bool) -> CtlVerdict {
    let c = Checker::new(k);
    let s = c.eval(f, atom);
    match k.initial.iter().find(|&&i| !s[i]) {
        None => CtlVerdict {
            holds: true,
            counterexample: None,
        },
        Some(&i) => {
            let mut path = vec![i];
            let loop_start = c.refute(f, atom, &mut path);
            CtlVerdict {
                holds: false,
                counterexample: Some(Witness { path, loop_start }),
            }
        }
    }
}

impl<'k> Checker<'k> {
    /// Extends `path` (whose last state violates `f`) to show why.
    fn refute<A>(&self, f: &Ctl<A>, atom: &dyn Fn(&A, usize) -> bool, path: &mut Vec<usize>) -> Option<usize> {
        let s = *path.last().unwrap();
        use Ctl::*;
        match f {
            AG(a) => {
                let bad: Vec<bool> = self.eval(a, atom).into_iter().map(|x| !x).collect();
                let route = self.shortest(s, &vec![true; self.k.len()], &bad);
                path.extend(route.into_iter().skip(1));
                self.refute(a, atom, path)
            }
            Implies(_, b) => self.refute(b, atom, path),
            And(a, b) => {
                if !self.eval(a, atom)[s] {
                    self.refute(a, atom, path)
                } else {
                    self.refute(b, atom, path)
                }
            }
            AX(a) => {
                let sa = self.eval(a, atom);
                let t = *self.k.succ[s].iter().find(|&&t| !sa[t]).unwrap();
                path.push(t);
                self.refute(a, atom, path)
            }
            AF(a) => {
                let notf: Vec<bool> = self.eval(a, atom).into_iter().map(|x| !x).collect();
                self.eg_path(&self.eg(&notf), path)
            }
            AU(a, b) => {
                let sa = self.eval(a, atom);
                let sb = self.eval(b, atom);
                let not_b: Vec<bool> = sb.iter().map(|x| !x).collect();
                let eg = self.eg(&not_b);
                if eg[s] {
                    return self.eg_path(&eg, path);
                }
                let target: Vec<bool> = (0..sa.len()).map(|x| !sa[x] && !sb[x]).collect();
                let route = self.shortest(s, &not_b, &target);
                path.extend(route.into_iter().skip(1));
                None
            }
            _ => None,
        }
    }

    /// Shortest path from `s` through `via` states to a `target` state.
    fn shortest(&self, s: usize, via: &[bool], target: &[bool]) -> Vec<usize> {
        let mut prev: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::from([s]);
        let mut seen = BTreeSet::from([s]);
        while let Some(x) = queue.pop_front() {
            if target[x] {
                let mut out = vec![x];
                let mut cur = x;
                while let Some(&p) = prev.get(&cur) {
                    out.push(p);
                    cur = p;
                }
                out.reverse();
                return out;
            }
            if !via[x] {
                continue;
            }
            for &t in &self.k.succ[x] {
                if seen.insert(t) {
                    prev.insert(t, x);
                    queue.push_back(t);
                }
            }
        }
        vec![s]
    }

    /// Follows states inside an EG set until a deadlock or a repeated state.
    fn eg_path(&self, eg: &[bool], path: &mut Vec<usize>) -> Option<usize> {
        let mut pos: HashMap<usize, usize> = path.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let start = path.len() - 1;
        let mut cur = path[start];
        loop {
            let &next = self.k.succ[cur].iter().find(|&&t| eg[t])?;
            if let Some(&i) = pos.get(&next) {
                if i >= start {
                    return Some(i);
                }
            }
            pos.insert(next, path.len());
            path.push(next);
            cur = next;
        }
    }
}

// ---- text syntax ----

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula error at offset {offset}: {message}")]
pub struct CtlParseError {
    pub offset: usize,
    pub message: String,
}

/// An atom as written: `name(arg, ...)` where an argument is an identifier
/// or the wildcard `*` (`None`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomText {
    pub name: String,
    pub args: Vec<Option<String>>,
}

impl fmt::Display for AtomText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<&str> = self.args.iter().map(|a| a.as_deref().unwrap_or("*")).collect();
        if self.args.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}({})", self.name, args.join(","))
        }
    }
}

/// Parses a formula. Operators: `!`, `&&`, `||`, `->` (also `=>`), the unary
/// temporal operators `AG AF AX EG EF EX`, `A[φ U ψ]`, `E[φ U ψ]`. An atom
/// `ip:name(args)` is read as `name(ip, args)`.
pub fn parse_ctl(src: &str) -> Result<Ctl<AtomText>, CtlParseError> {
    let toks = ctl_lex(src)?;
    let mut p = CtlParser { toks, pos: 0 };
    let f = p.imp()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum CTok {
    Ident(String),
    Sym(&'static str),
}

fn ctl_lex(src: &str) -> Result<Vec<(usize, CTok)>, CtlParseError> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < cs.len() {
        let (off, c) = cs[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let mut j = i;
            while j < cs.len() && (cs[j].1.is_alphanumeric() || cs[j].1 == '_' || cs[j].1 == '\'') {
                j += 1;
            }
            out.push((off, CTok::Ident(cs[i..j].iter().map(|x| x.1).collect())));
            i = j;
            continue;
        }
        let rest: String = cs[i..cs.len().min(i + 2)].iter().map(|x| x.1).collect();
        let two = ["&&", "||", "->", "=>"].into_iter().find(|t| rest.starts_with(t));
        if let Some(t) = two {
            out.push((off, CTok::Sym(t)));
            i += 2;
            continue;
        }
        let one = match c {
            '!' | '¬' => "!",
            '(' => "(",
            ')' => ")",
            '[' => "[",
            ']' => "]",
            ',' => ",",
            '*' => "*",
            ':' => ":",
            '∧' => "&&",
            '∨' => "||",
            '⇒' => "->",
            _ => {
                return Err(CtlParseError {
                    offset: off,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((off, CTok::Sym(one)));
        i += 1;
    }
    Ok(out)
}

type TextCtl = Ctl<AtomText>;

struct CtlParser {
    toks: Vec<(usize, CTok)>,
    pos: usize,
}

impl CtlParser {
    fn err(&self, message: &str) -> CtlParseError {
        CtlParseError {
            offset: self.toks.get(self.pos).map(|t| t.0).unwrap_or(usize::MAX),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&CTok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(CTok::Sym(x)) if *x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), CtlParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn imp(&mut self) -> Result<Ctl<AtomText>, CtlParseError> {
        let lhs = self.or()?;
        if self.eat("->") || self.eat("=>") {
            return Ok(Ctl::Implies(Box::new(lhs), Box::new(self.imp()?)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ctl<AtomText>, CtlParseError> {
        let mut acc = self.and()?;
        while self.eat("||") {
            acc = Ctl::Or(Box::new(acc), Box::new(self.and()?));
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Ctl<AtomText>, CtlParseError> {
        let mut acc = self.unary()?;
        while self.eat("&&") {
            acc = Ctl::And(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn until(&mut self) -> Result<(Box<TextCtl>, Box<TextCtl>), CtlParseError> {
        self.expect("[")?;
        let a = self.imp()?;
        match self.peek() {
            Some(CTok::Ident(u)) if u == "U" => self.pos += 1,
            _ => return Err(self.err("expected `U`")),
        }
        let b = self.imp()?;
        self.expect("]")?;
        Ok((Box::new(a), Box::new(b)))
    }

    fn unary(&mut self) -> Result<Ctl<AtomText>, CtlParseError> {
        if self.eat("!") {
            return Ok(Ctl::Not(Box::new(self.unary()?)));
        }
        if self.eat("(") {
            let f = self.imp()?;
            self.expect(")")?;
            return Ok(f);
        }
        let Some(CTok::Ident(word)) = self.peek().cloned() else {
            return Err(self.err("expected a formula"));
        };
        self.pos += 1;
        let unary = |c: fn(Box<Ctl<AtomText>>) -> Ctl<AtomText>, p: &mut Self| -> Result<Ctl<AtomText>, CtlParseError> {
            Ok(c(Box::new(p.unary()?)))
        };
        match word.as_str() {
            "true" => Ok(Ctl::True),
            "false" => Ok(Ctl::False),
            "AG" => unary(Ctl::AG, self),
            "AF" => unary(Ctl::AF, self),
            "AX" => unary(Ctl::AX, self),
            "EG" => unary(Ctl::EG, self),
            "EF" => unary(Ctl::EF, self),
            "EX" => unary(Ctl::EX, self),
            "A" if matches!(self.peek(), Some(CTok::Sym("["))) => {
                let (a, b) = self.until()?;
                Ok(Ctl::AU(a, b))
            }
            "E" if matches!(self.peek(), Some(CTok::Sym("["))) => {
                let (a, b) = self.until()?;
                Ok(Ctl::EU(a, b))
            }
            _ => {
                let mut args = Vec::new();
                let mut name = word;
                if self.eat(":") {
                    // ip:name(args) is sugar for name(ip, args)
                    args.push(Some(name));
                    name = match self.peek().cloned() {
                        Some(CTok::Ident(n)) => {
                            self.pos += 1;
                            n
                        }
                        _ => return Err(self.err("expected an atom name after `:`")),
                    };
                }
                if self.eat("(") && !self.eat(")") {
                    loop {
                        if self.eat("*") {
                            args.push(None);
                        } else if let Some(CTok::Ident(a)) = self.peek().cloned() {
                            self.pos += 1;
                            args.push(Some(a));
                        } else {
                            return Err(self.err("expected an argument"));
                        }
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect(")")?;
                }
                Ok(Ctl::Atom(AtomText { name, args }))
            }
        }
    }
}

// ---- network atoms ----

/// Argument of a network atom; `None` matches anything.
pub type Pat = Option<Value>;

fn pat_ok(p: &Pat, v: &Value) -> bool {
    p.as_ref().is_none_or(|x| x == v)
}

/// Atomic propositions over states of a complete network. Transition
/// predicates hold in the state right after a matching transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NetAtom {
    NewPkt(Pat, Pat, Pat),
    Deliver(Pat, Pat),
    Connect(Pat, Pat),
    Disconnect(Pat, Pat),
    /// Directed reachability through ranges, including the empty path.
    Connected(Value, Value),
}

impl fmt::Display for NetAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |x: &Pat| x.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "*".into());
        match self {
            NetAtom::NewPkt(ip, d, dip) => write!(f, "{}:newpkt({},{})", p(ip), p(d), p(dip)),
            NetAtom::Deliver(ip, d) => write!(f, "{}:deliver({})", p(ip), p(d)),
            NetAtom::Connect(a, b) => write!(f, "connect({},{})", p(a), p(b)),
            NetAtom::Disconnect(a, b) => write!(f, "disconnect({},{})", p(a), p(b)),
            NetAtom::Connected(a, b) => write!(f, "connected*({a},{b})"),
        }
    }
}

impl NetAtom {
    /// Evaluates the atom in network state `n` entered through `tag`.
    pub fn eval(&self, n: &NetworkExpression, tag: Option<&Label>) -> bool {
        match (self, tag) {
            (NetAtom::NewPkt(ip, d, dip), Some(Label::NewPkt(i, x, y))) => {
                pat_ok(ip, i) && pat_ok(d, x) && pat_ok(dip, y)
            }
            (NetAtom::Deliver(ip, d), Some(Label::NodeDeliver(i, x))) => pat_ok(ip, i) && pat_ok(d, x),
            (NetAtom::Connect(a, b), Some(Label::Connect(x, y)))
            | (NetAtom::Disconnect(a, b), Some(Label::Disconnect(x, y))) => pat_ok(a, x) && pat_ok(b, y),
            (NetAtom::Connected(a, b), _) => connected(n, a, b),
            _ => false,
        }
    }
}

/// `connected*(a, b)`: a chain a = ip0, ..., ipn = b with ip_i in the range of ip_{i-1}.
pub fn connected(n: &NetworkExpression, a: &Value, b: &Value) -> bool {
    if a == b {
        return true;
    }
    let nodes = n.inner().nodes();
    let mut seen = BTreeSet::from([a.clone()]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(x) = queue.pop_front() {
        let Some(node) = nodes.iter().find(|m| m.ip == x) else {
            continue;
        };
        for y in &node.range {
            if y == b {
                return true;
            }
            if seen.insert(y.clone()) {
                queue.push_back(y.clone());
            }
        }
    }
    false
}

/// A Kripke structure whose states are LTS states split by the label of the
/// incoming transition, restricted to labels `keep` deems observable.
#[derive(Clone, Debug)]
pub struct TaggedKripke {
    pub kripke: Kripke,
    /// `(lts state, tag)` per Kripke state.
    pub states: Vec<(usize, Option<Label>)>,
}

impl TaggedKripke {
    pub fn new<S>(lts: &Lts<S>, keep: impl Fn(&Label) -> bool) -> Self {
        let mut ids: HashMap<(usize, Option<Label>), usize> = HashMap::new();
        let mut states = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let out = lts.successors();
        let mut queue = VecDeque::new();
        let mut intern = |key: (usize, Option<Label>),
                          states: &mut Vec<(usize, Option<Label>)>,
                          succ: &mut Vec<Vec<usize>>,
                          queue: &mut VecDeque<usize>| {
            *ids.entry(key.clone()).or_insert_with(|| {
                states.push(key);
                succ.push(Vec::new());
                queue.push_back(states.len() - 1);
                states.len() - 1
            })
        };
        let init = intern((lts.initial, None), &mut states, &mut succ, &mut queue);
        while let Some(k) = queue.pop_front() {
            let s = states[k].0;
            let mut next = Vec::new();
            for &e in &out[s] {
                let edge = &lts.edges[e];
                let tag = keep(&edge.label).then(|| edge.label.clone());
                next.push(intern((edge.dst, tag), &mut states, &mut succ, &mut queue));
            }
            next.sort_unstable();
            next.dedup();
            succ[k] = next;
        }
        TaggedKripke {
            kripke: Kripke {
                succ,
                initial: vec![init],
            },
            states,
        }
    }
}

/// Which labels are worth tagging for network atoms.
pub fn observable(label: &Label) -> bool {
    matches!(
        label,
        Label::NewPkt(..) | Label::NodeDeliver(..) | Label::Connect(..) | Label::Disconnect(..)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(succ: Vec<Vec<usize>>) -> Kripke {
        Kripke { succ, initial: vec![0] }
    }

    fn p(set: &'static [usize]) -> Ctl<&'static [usize]> {
        Ctl::Atom(set)
    }

    fn at(a: &&'static [usize], s: usize) -> bool {
        a.contains(&s)
    }

    #[test]
    fn deadlocks_end_paths() {
        // 0 -> 1, 1 deadlocks
        let m = k(vec![vec![1], vec![]]);
        assert_eq!(sat(&m, &Ctl::AX(Box::new(Ctl::False)), &at), vec![false, true]);
        assert_eq!(sat(&m, &Ctl::EX(Box::new(Ctl::True)), &at), vec![true, false]);
        assert_eq!(sat(&m, &Ctl::AF(Box::new(p(&[1]))), &at), vec![true, true]);
        assert_eq!(sat(&m, &Ctl::AF(Box::new(p(&[0]))), &at), vec![true, false]);
        assert_eq!(sat(&m, &Ctl::EG(Box::new(p(&[0, 1]))), &at), vec![true, true]);
    }

    #[test]
    fn lasso_counterexample() {
        // 0 -> 1 -> 2 -> 1, goal 3 unreachable
        let m = k(vec![vec![1], vec![2], vec![1], vec![]]);
        let f = Ctl::AF(Box::new(p(&[3])));
        let v = check(&m, &f, &at);
        assert!(!v.holds);
        let w = v.counterexample.unwrap();
        assert_eq!(w.path, vec![0, 1, 2]);
        assert_eq!(w.loop_start, Some(1));
    }

    #[test]
    fn parse_packet_delivery() {
        let f = parse_ctl("AG((oip:newpkt(d,dip) && connected(oip,dip)) -> AF(disconnect(*,*) || dip:deliver(d)))")
            .unwrap();
        let atoms: Vec<String> = f.atoms().iter().map(|a| a.to_string()).collect();
        assert_eq!(
            atoms,
            vec!["newpkt(oip,d,dip)", "connected(oip,dip)", "disconnect(*,*)", "deliver(dip,d)"]
        );
        assert!(parse_ctl("A[true U p]").is_ok());
        assert!(parse_ctl("AG (").is_err());
    }
}
