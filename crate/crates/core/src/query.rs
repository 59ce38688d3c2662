//! Regular path queries: parsing, compilation to a single-start/single-final
//! NFA, and syntactic classification.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! alt     := concat ('|' concat)*
//! concat  := postfix postfix*
//! postfix := atom ('+' | '*')*
//! atom    := symbol | '%' | '(' alt ')'
//! ```
//!
//! `%` is ε and `α*` is stored as `α+ | %`. Whitespace is ignored.

use std::fmt;

use crate::error::{Result, RpqError};
use crate::graph::{Alphabet, Label, SigmaGraph, EPSILON_MARKER, EPSILON_SLOT, RESERVED_CHARS};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RegexNode {
    Literal(char),
    Epsilon,
    Concat(Box<RegexNode>, Box<RegexNode>),
    Alt(Box<RegexNode>, Box<RegexNode>),
    Plus(Box<RegexNode>),
}

impl RegexNode {
    pub fn lit(c: char) -> Self {
        RegexNode::Literal(c)
    }

    pub fn concat(l: RegexNode, r: RegexNode) -> Self {
        RegexNode::Concat(Box::new(l), Box::new(r))
    }

    pub fn alt(l: RegexNode, r: RegexNode) -> Self {
        RegexNode::Alt(Box::new(l), Box::new(r))
    }

    pub fn plus(c: RegexNode) -> Self {
        RegexNode::Plus(Box::new(c))
    }

    pub fn star(c: RegexNode) -> Self {
        RegexNode::alt(RegexNode::plus(c), RegexNode::Epsilon)
    }

    /// Left-nested concatenation of the given parts; `None` when empty.
    pub fn concat_all(parts: impl IntoIterator<Item = RegexNode>) -> Option<Self> {
        parts.into_iter().reduce(RegexNode::concat)
    }

    /// Left-nested alternation of the given parts; `None` when empty.
    pub fn alt_all(parts: impl IntoIterator<Item = RegexNode>) -> Option<Self> {
        parts.into_iter().reduce(RegexNode::alt)
    }

    /// The word as a chain of literals (ε for the empty word).
    pub fn word(w: &str) -> Self {
        RegexNode::concat_all(w.chars().map(RegexNode::Literal)).unwrap_or(RegexNode::Epsilon)
    }

    /// Number of AST nodes.
    pub fn node_count(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            count += 1;
            match n {
                RegexNode::Literal(_) | RegexNode::Epsilon => {}
                RegexNode::Concat(l, r) | RegexNode::Alt(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                RegexNode::Plus(c) => stack.push(c),
            }
        }
        count
    }

    pub fn depth(&self) -> usize {
        match self {
            RegexNode::Literal(_) | RegexNode::Epsilon => 0,
            RegexNode::Concat(l, r) | RegexNode::Alt(l, r) => 1 + l.depth().max(r.depth()),
            RegexNode::Plus(c) => 1 + c.depth(),
        }
    }

    pub fn symbols(&self) -> Vec<char> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            match n {
                RegexNode::Literal(c) => {
                    if !out.contains(c) {
                        out.push(*c);
                    }
                }
                RegexNode::Epsilon => {}
                RegexNode::Concat(l, r) | RegexNode::Alt(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                RegexNode::Plus(c) => stack.push(c),
            }
        }
        out
    }

    fn as_star(&self) -> Option<&RegexNode> {
        match self {
            RegexNode::Alt(l, r) => match (l.as_ref(), r.as_ref()) {
                (RegexNode::Plus(c), RegexNode::Epsilon) => Some(c),
                _ => None,
            },
            _ => None,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: alternation, 1: concatenation, 2: postfix operand
        if let Some(c) = self.as_star() {
            c.fmt_prec(f, 2)?;
            return write!(f, "*");
        }
        match self {
            RegexNode::Literal(c) => write!(f, "{c}"),
            RegexNode::Epsilon => write!(f, "{EPSILON_MARKER}"),
            RegexNode::Plus(c) => {
                c.fmt_prec(f, 2)?;
                write!(f, "+")
            }
            RegexNode::Concat(l, r) => {
                let wrap = prec > 1;
                if wrap {
                    write!(f, "(")?;
                }
                l.fmt_prec(f, 1)?;
                r.fmt_prec(f, 2)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            RegexNode::Alt(l, r) => {
                let wrap = prec > 0;
                if wrap {
                    write!(f, "(")?;
                }
                l.fmt_prec(f, 0)?;
                write!(f, "|")?;
                r.fmt_prec(f, 1)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Prints a string that parses back to the same tree.
impl fmt::Display for RegexNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A parsed query together with its source length |α|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub ast: RegexNode,
    pub length: usize,
}

impl Query {
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Query> {
        let ast = parse_rpq(text, alphabet)?;
        Ok(Query { ast, length: text.chars().filter(|c| !c.is_whitespace()).count() })
    }
}

impl From<RegexNode> for Query {
    fn from(ast: RegexNode) -> Self {
        let length = ast.to_string().chars().count();
        Query { ast, length }
    }
}

/// Parses a query and checks every literal against `alphabet`.
pub fn parse_rpq(text: &str, alphabet: &Alphabet) -> Result<RegexNode> {
    let ast = parse_rpq_unchecked(text)?;
    for c in ast.symbols() {
        if !alphabet.contains(c) {
            return Err(RpqError::UnknownSymbol(c));
        }
    }
    Ok(ast)
}

/// Parses a query accepting any non-reserved character as a symbol.
pub fn parse_rpq_unchecked(text: &str) -> Result<RegexNode> {
    let tokens: Vec<(usize, char)> = text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = Parser { tokens: &tokens, pos: 0, end: text.chars().count() };
    let ast = p.alt()?;
    if let Some((at, c)) = p.peek() {
        return Err(RpqError::Syntax { pos: at, message: format!("unexpected '{c}'") });
    }
    Ok(ast)
}

struct Parser<'a> {
    tokens: &'a [(usize, char)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<(usize, char)> {
        self.tokens.get(self.pos).copied()
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |(at, _)| at)
    }

    fn starts_atom(c: char) -> bool {
        c == '(' || c == EPSILON_MARKER || !RESERVED_CHARS.contains(&c)
    }

    fn alt(&mut self) -> Result<RegexNode> {
        let mut node = self.concat()?;
        while let Some((_, '|')) = self.peek() {
            self.pos += 1;
            let rhs = self.concat()?;
            node = RegexNode::alt(node, rhs);
        }
        Ok(node)
    }

    fn concat(&mut self) -> Result<RegexNode> {
        let mut node = self.postfix()?;
        while let Some((_, c)) = self.peek() {
            if !Self::starts_atom(c) {
                break;
            }
            let rhs = self.postfix()?;
            node = RegexNode::concat(node, rhs);
        }
        Ok(node)
    }

    fn postfix(&mut self) -> Result<RegexNode> {
        let mut node = self.atom()?;
        loop {
            match self.peek() {
                Some((_, '+')) => node = RegexNode::plus(node),
                Some((_, '*')) => node = RegexNode::star(node),
                _ => return Ok(node),
            }
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<RegexNode> {
        let at = self.here();
        match self.peek() {
            None => Err(RpqError::Syntax { pos: at, message: "expected an expression".into() }),
            Some((_, '(')) => {
                self.pos += 1;
                if let Some((close, ')')) = self.peek() {
                    return Err(RpqError::Syntax { pos: close, message: "empty group".into() });
                }
                let inner = self.alt()?;
                match self.peek() {
                    Some((_, ')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(RpqError::Syntax { pos: self.here(), message: "expected ')'".into() }),
                }
            }
            Some((_, c)) if c == EPSILON_MARKER => {
                self.pos += 1;
                Ok(RegexNode::Epsilon)
            }
            Some((_, c)) if RESERVED_CHARS.contains(&c) => {
                Err(RpqError::Syntax { pos: at, message: format!("expected an expression, found '{c}'") })
            }
            Some((_, c)) => {
                self.pos += 1;
                Ok(RegexNode::Literal(c))
            }
        }
    }
}

/// An NFA with one start and one final state, stored as a Σ-graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub graph: SigmaGraph,
    pub start: usize,
    pub accept: usize,
}

impl Nfa {
    pub fn state_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.graph.alphabet()
    }
}

/// Compiles the tree into an NFA with exactly two states per AST node.
///
/// The node with preorder number `k` owns states `2k` (entry) and `2k + 1`
/// (exit), so the whole expression starts in 0 and accepts in 1.
pub fn compile_nfa(ast: &RegexNode, alphabet: &Alphabet) -> Result<Nfa> {
    let mut g = SigmaGraph::new(alphabet.clone(), 2 * ast.node_count());
    // (node, preorder id, parent id, role)
    enum Role {
        Root,
        ConcatLeft,
        ConcatRight,
        AltChild,
        PlusChild,
    }
    let mut stack: Vec<(&RegexNode, usize, Role)> = vec![(ast, 0, Role::Root)];
    // id of the left child of each concat node, filled when that child is numbered
    let mut concat_left = vec![usize::MAX; ast.node_count()];
    let mut next = 0usize;
    let entry = |k: usize| 2 * k;
    let exit = |k: usize| 2 * k + 1;
    while let Some((node, parent, role)) = stack.pop() {
        let k = next;
        next += 1;
        match role {
            Role::Root => {}
            Role::ConcatLeft => {
                g.push_arc(entry(parent), EPSILON_SLOT, entry(k));
                concat_left[parent] = k;
            }
            Role::ConcatRight => {
                g.push_arc(exit(concat_left[parent]), EPSILON_SLOT, entry(k));
                g.push_arc(exit(k), EPSILON_SLOT, exit(parent));
            }
            Role::AltChild => {
                g.push_arc(entry(parent), EPSILON_SLOT, entry(k));
                g.push_arc(exit(k), EPSILON_SLOT, exit(parent));
            }
            Role::PlusChild => {
                g.push_arc(entry(parent), EPSILON_SLOT, entry(k));
                g.push_arc(exit(k), EPSILON_SLOT, exit(parent));
                g.push_arc(exit(parent), EPSILON_SLOT, entry(parent));
            }
        }
        match node {
            RegexNode::Literal(c) => {
                let slot = alphabet.slot(Label::Symbol(*c)).ok_or(RpqError::UnknownSymbol(*c))?;
                g.push_arc(entry(k), slot, exit(k));
            }
            RegexNode::Epsilon => g.push_arc(entry(k), EPSILON_SLOT, exit(k)),
            RegexNode::Concat(l, r) => {
                stack.push((r, k, Role::ConcatRight));
                stack.push((l, k, Role::ConcatLeft));
            }
            RegexNode::Alt(l, r) => {
                stack.push((r, k, Role::AltChild));
                stack.push((l, k, Role::AltChild));
            }
            RegexNode::Plus(c) => stack.push((c, k, Role::PlusChild)),
        }
    }
    Ok(Nfa { graph: g, start: 0, accept: 1 })
}

/// Standard ε-closure simulation.
pub fn nfa_accepts(nfa: &Nfa, word: &str) -> Result<bool> {
    let g = &nfa.graph;
    let n = g.node_count();
    let closure = |set: &mut Vec<bool>| {
        let mut stack: Vec<usize> = (0..n).filter(|&p| set[p]).collect();
        while let Some(p) = stack.pop() {
            for &r in g.successors(p, EPSILON_SLOT) {
                if !set[r] {
                    set[r] = true;
                    stack.push(r);
                }
            }
        }
    };
    let mut current = vec![false; n];
    current[nfa.start] = true;
    closure(&mut current);
    for c in word.chars() {
        let slot = g.alphabet().symbol_slot(c).ok_or(RpqError::UnknownSymbol(c))?;
        let mut next = vec![false; n];
        for p in (0..n).filter(|&p| current[p]) {
            for &r in g.successors(p, slot) {
                next[r] = true;
            }
        }
        closure(&mut next);
        current = next;
    }
    Ok(current[nfa.accept])
}

/// Syntactic query classes with a dedicated enumerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryClass {
    /// `(x1|…|xk)*` when reflexive, `(x1|…|xk)+` otherwise. An empty label
    /// list with `reflexive` set stands for a bare `%`.
    Bt { labels: Vec<char>, reflexive: bool },
    /// `(x1|…|xk)`.
    SSingle { labels: Vec<char> },
    /// `(x1|…|xk)(y1|…|yk')`.
    SDouble { first: Vec<char>, second: Vec<char> },
    /// Top-level alternation of at least two members of the classes above.
    Disjunction(Vec<QueryClass>),
    General,
}

impl QueryClass {
    pub fn is_restricted(&self) -> bool {
        !matches!(self, QueryClass::General)
    }

    /// A tree with the language of this class; `None` for `General`.
    pub fn to_ast(&self) -> Option<RegexNode> {
        let alt_of = |ls: &[char]| RegexNode::alt_all(ls.iter().map(|&c| RegexNode::Literal(c)));
        match self {
            QueryClass::Bt { labels, reflexive: true } if labels.is_empty() => Some(RegexNode::Epsilon),
            QueryClass::Bt { labels, reflexive } => {
                let inner = RegexNode::plus(alt_of(labels)?);
                Some(if *reflexive { RegexNode::alt(inner, RegexNode::Epsilon) } else { inner })
            }
            QueryClass::SSingle { labels } => alt_of(labels),
            QueryClass::SDouble { first, second } => Some(RegexNode::concat(alt_of(first)?, alt_of(second)?)),
            QueryClass::Disjunction(ms) => {
                let parts: Option<Vec<_>> = ms.iter().map(QueryClass::to_ast).collect();
                RegexNode::alt_all(parts?)
            }
            QueryClass::General => None,
        }
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let group = |ls: &[char]| {
            let inner: Vec<String> = ls.iter().map(|c| c.to_string()).collect();
            format!("({})", inner.join("|"))
        };
        match self {
            QueryClass::Bt { labels, reflexive } => {
                write!(f, "BT {}{}", group(labels), if *reflexive { '*' } else { '+' })
            }
            QueryClass::SSingle { labels } => write!(f, "S {}", group(labels)),
            QueryClass::SDouble { first, second } => write!(f, "S {}{}", group(first), group(second)),
            QueryClass::Disjunction(ms) => {
                write!(f, "Disjunction[")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "]")
            }
            QueryClass::General => write!(f, "General"),
        }
    }
}

fn literal_alt(node: &RegexNode) -> Option<Vec<char>> {
    let mut out = Vec::new();
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        match n {
            RegexNode::Literal(c) => {
                if !out.contains(c) {
                    out.push(*c);
                }
            }
            RegexNode::Alt(l, r) => {
                stack.push(r);
                stack.push(l);
            }
            _ => return None,
        }
    }
    Some(out)
}

fn classify_member(node: &RegexNode) -> Option<QueryClass> {
    if let Some(labels) = literal_alt(node) {
        return Some(QueryClass::SSingle { labels });
    }
    match node {
        RegexNode::Epsilon => Some(QueryClass::Bt { labels: Vec::new(), reflexive: true }),
        RegexNode::Plus(c) => literal_alt(c).map(|labels| QueryClass::Bt { labels, reflexive: false }),
        RegexNode::Alt(l, r) => {
            let plus = match (l.as_ref(), r.as_ref()) {
                (RegexNode::Plus(c), RegexNode::Epsilon) | (RegexNode::Epsilon, RegexNode::Plus(c)) => c,
                _ => return None,
            };
            literal_alt(plus).map(|labels| QueryClass::Bt { labels, reflexive: true })
        }
        RegexNode::Concat(l, r) => {
            let first = literal_alt(l)?;
            let second = literal_alt(r)?;
            Some(QueryClass::SDouble { first, second })
        }
        RegexNode::Literal(_) => None,
    }
}

fn flatten_alternatives<'a>(node: &'a RegexNode, out: &mut Vec<&'a RegexNode>) {
    match node {
        RegexNode::Alt(l, r) if classify_member(node).is_none() => {
            flatten_alternatives(l, out);
            flatten_alternatives(r, out);
        }
        _ => out.push(node),
    }
}

/// The most specific class of the query.
pub fn classify(ast: &RegexNode) -> QueryClass {
    if let Some(m) = classify_member(ast) {
        return m;
    }
    let mut alternatives = Vec::new();
    flatten_alternatives(ast, &mut alternatives);
    if alternatives.len() < 2 {
        return QueryClass::General;
    }
    let members: Option<Vec<QueryClass>> = alternatives.into_iter().map(classify_member).collect();
    members.map_or(QueryClass::General, QueryClass::Disjunction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> Alphabet {
        Alphabet::new("abc#".chars()).unwrap()
    }

    fn p(s: &str) -> RegexNode {
        parse_rpq(s, &abc()).unwrap()
    }

    // Direct language membership on the tree, used as the oracle below.
    fn member(ast: &RegexNode, w: &[char]) -> bool {
        match ast {
            RegexNode::Literal(c) => w.len() == 1 && w[0] == *c,
            RegexNode::Epsilon => w.is_empty(),
            RegexNode::Concat(l, r) => (0..=w.len()).any(|k| member(l, &w[..k]) && member(r, &w[k..])),
            RegexNode::Alt(l, r) => member(l, w) || member(r, w),
            RegexNode::Plus(c) => {
                member(c, w) || (1..w.len()).any(|k| member(c, &w[..k]) && member(ast, &w[k..]))
            }
        }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("ab"), RegexNode::concat(RegexNode::lit('a'), RegexNode::lit('b')));
        assert_eq!(p("a*"), RegexNode::alt(RegexNode::plus(RegexNode::lit('a')), RegexNode::Epsilon));
        assert!(matches!(parse_rpq("a||b", &abc()), Err(RpqError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_rpq("()", &abc()), Err(RpqError::Syntax { pos: 1, .. })));
        assert!(matches!(parse_rpq("(a", &abc()), Err(RpqError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_rpq("a)", &abc()), Err(RpqError::Syntax { pos: 1, .. })));
        assert!(matches!(parse_rpq("", &abc()), Err(RpqError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_rpq("+a", &abc()), Err(RpqError::Syntax { pos: 0, .. })));
        assert_eq!(parse_rpq("ad", &abc()), Err(RpqError::UnknownSymbol('d')));
        assert_eq!(p("a b | c"), p("ab|c"));
        assert_eq!(p("%"), RegexNode::Epsilon);
    }

    #[test]
    fn display_round_trips() {
        for s in ["ab|c*|(a|b)+", "a(b|c)", "#a#", "(ab)+", "a|(b|c)", "a(bc)", "a**", "%|a", "(a|%)+"] {
            let ast = p(s);
            assert_eq!(p(&ast.to_string()), ast, "{s} printed as {ast}");
        }
    }

    #[test]
    fn compile_examples() {
        let m = compile_nfa(&p("a"), &abc()).unwrap();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.graph.arc_count(), 1);
        assert!(m.graph.has_arc(m.start, Label::Symbol('a'), m.accept));

        let ab = compile_nfa(&p("ab"), &abc()).unwrap();
        for w in ["", "a", "b", "ab", "ba", "abb", "aab"] {
            assert_eq!(nfa_accepts(&ab, w).unwrap(), w == "ab", "{w}");
        }

        let plus = compile_nfa(&p("a+"), &abc()).unwrap();
        let alpha = ['a', 'b'];
        let mut words = vec![String::new()];
        for len in 1..=3 {
            for i in 0..alpha.len().pow(len) {
                let mut w = String::new();
                let mut x = i;
                for _ in 0..len {
                    w.push(alpha[x % 2]);
                    x /= 2;
                }
                words.push(w);
            }
        }
        for w in &words {
            let expected = !w.is_empty() && w.chars().all(|c| c == 'a');
            assert_eq!(nfa_accepts(&plus, w).unwrap(), expected, "{w}");
        }
    }

    #[test]
    fn accepts_examples() {
        let star = compile_nfa(&p("a*"), &abc()).unwrap();
        assert!(nfa_accepts(&star, "").unwrap());
        let hash = compile_nfa(&p("#a#"), &abc()).unwrap();
        assert!(nfa_accepts(&hash, "#a#").unwrap());
        let alt = compile_nfa(&p("ab|c"), &abc()).unwrap();
        assert!(!nfa_accepts(&alt, "b").unwrap());
        assert_eq!(nfa_accepts(&alt, "z"), Err(RpqError::UnknownSymbol('z')));
    }

    #[test]
    fn out_degree_at_most_two() {
        let m = compile_nfa(&p("((a|b)+c|%)*(ab)+|c"), &abc()).unwrap();
        for s in 0..m.state_count() {
            assert!(m.graph.out_entries(s) <= 2);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&p("(a|b)+")), QueryClass::Bt { labels: vec!['a', 'b'], reflexive: false });
        assert_eq!(classify(&p("a(b|c)")), QueryClass::SDouble { first: vec!['a'], second: vec!['b', 'c'] });
        assert_eq!(
            classify(&p("ab|c*|(a|b)+")),
            QueryClass::Disjunction(vec![
                QueryClass::SDouble { first: vec!['a'], second: vec!['b'] },
                QueryClass::Bt { labels: vec!['c'], reflexive: true },
                QueryClass::Bt { labels: vec!['a', 'b'], reflexive: false },
            ])
        );
        assert_eq!(classify(&p("a*b")), QueryClass::General);
        assert_eq!(classify(&p("aa")), QueryClass::SDouble { first: vec!['a'], second: vec!['a'] });
        assert_eq!(classify(&p("a|b")), QueryClass::SSingle { labels: vec!['a', 'b'] });
        assert_eq!(classify(&p("(a|b)*")), QueryClass::Bt { labels: vec!['a', 'b'], reflexive: true });
        assert_eq!(classify(&p("abc")), QueryClass::General);
        assert_eq!(classify(&p("ab|abc")), QueryClass::General);
        assert!(matches!(classify(&p("b|a*")), QueryClass::Disjunction(_)));
        assert_eq!(classify(&p("(a|b)+")).to_string(), "BT (a|b)+");
    }

    fn arb_ast(depth: u32) -> impl Strategy<Value = RegexNode> {
        let leaf = prop_oneof![
            4 => prop::sample::select(vec!['a', 'b', 'c']).prop_map(RegexNode::Literal),
            1 => Just(RegexNode::Epsilon),
        ];
        leaf.prop_recursive(depth, 31, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| RegexNode::concat(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| RegexNode::alt(l, r)),
                inner.prop_map(RegexNode::plus),
            ]
        })
    }

    fn words_up_to(len: usize) -> Vec<String> {
        let mut all = vec![String::new()];
        let mut frontier = vec![String::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &frontier {
                for c in ['a', 'b', 'c'] {
                    next.push(format!("{w}{c}"));
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all
    }

    proptest! {
        #[test]
        fn nfa_matches_tree_language(ast in arb_ast(4)) {
            let m = compile_nfa(&ast, &abc()).unwrap();
            prop_assert_eq!(m.state_count(), 2 * ast.node_count());
            for w in words_up_to(4) {
                let chars: Vec<char> = w.chars().collect();
                prop_assert_eq!(nfa_accepts(&m, &w).unwrap(), member(&ast, &chars), "word {:?} in {}", w, ast);
            }
        }

        #[test]
        fn printing_reparses(ast in arb_ast(4)) {
            prop_assert_eq!(parse_rpq(&ast.to_string(), &abc()).unwrap(), ast);
        }

        #[test]
        fn disjunction_members_cover_alternatives(ast in arb_ast(3)) {
            if let QueryClass::Disjunction(ms) = classify(&ast) {
                prop_assert!(ms.len() >= 2);
                let rebuilt = QueryClass::Disjunction(ms).to_ast().unwrap();
                for w in words_up_to(3) {
                    let chars: Vec<char> = w.chars().collect();
                    prop_assert_eq!(member(&rebuilt, &chars), member(&ast, &chars));
                }
            }
        }
    }
}
