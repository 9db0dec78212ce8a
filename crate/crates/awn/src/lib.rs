//! Interpreter for the Algebra for Wireless Networks: terms, a surface
//! syntax, structural operational semantics for all four layers, transition
//! system extraction, strong bisimilarity and CTL model checking.

pub mod bindings;
pub mod bisim;
pub mod ctl;
pub mod eval;
mod lexer;
pub mod label;
pub mod lts;
pub mod parser;
pub mod printer;
pub mod semantics;
pub mod signature;
pub mod syntax;
pub mod valuation;
pub mod value;

pub use bisim::{bisimilar, bisimulation_classes, hml_holds, BisimError, BisimResult, Hml};
pub use ctl::{check as check_ctl, parse_ctl, AtomText, Ctl, CtlVerdict, Kripke, NetAtom, TaggedKripke, Witness};
pub use lts::{build_lts, with_workers, Bounds, Edge, Lts};
pub use bindings::{check_bindings, check_program, UnboundVar};
pub use eval::{eval, holds, satisfy, EvalError};
pub use label::{gamma, CastInfo, Label};
pub use parser::{parse_document, parse_document_with, parse_formula, parse_network, parse_value, Document, ParseError, ParseErrorKind};
pub use semantics::{ConnectPolicy, Derivation, Environment, Semantics, SemanticsOptions, Transition};
pub use signature::{OpError, Signature};
pub use syntax::{
    Expr, Formula, NetworkExpression, NodeExpression, ParallelProcess, PartialNetwork, Proc, ProcId,
    ProcessDefinition, Program,
};
pub use valuation::Valuation;
pub use value::{sym, Sort, Sym, Value};
