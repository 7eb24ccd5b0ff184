//! Hash-consed SMT-LIB terms over booleans and integers, with light constant
//! folding and a deterministic printer.
//!
//! Structurally equal terms share one [`TermId`], so two encodings can be
//! compared by id.

use std::collections::HashMap;
use std::fmt::Write as _;

/// Handle to a node in a [`TermPool`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Int(i64),
    /// Declared constant, by declaration index.
    Var(u32),
    Not(TermId),
    And(Vec<TermId>),
    Or(Vec<TermId>),
    Implies(TermId, TermId),
    /// Equality; on booleans this is equivalence.
    Eq(TermId, TermId),
    Ge(TermId, TermId),
    Ite(TermId, TermId, TermId),
    Add(Vec<TermId>),
    Sub(TermId, TermId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub sort: Sort,
}

/// Arena of terms and declared constants.
#[derive(Debug, Clone)]
pub struct TermPool {
    nodes: Vec<Node>,
    index: HashMap<Node, TermId>,
    decls: Vec<Decl>,
    by_name: HashMap<String, TermId>,
}

impl Default for TermPool {
    fn default() -> Self {
        Self::new()
    }
}

/// Whether `name` can be printed without `|...|` quoting.
pub fn is_simple_symbol(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    let ok = |c: char| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c);
    !first.is_ascii_digit() && ok(first) && chars.all(ok)
}

/// Prints a symbol, quoting it when it is not a simple symbol.
pub fn quote_symbol(name: &str) -> String {
    if is_simple_symbol(name) {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

impl TermPool {
    pub fn new() -> Self {
        let mut pool = TermPool {
            nodes: Vec::new(),
            index: HashMap::new(),
            decls: Vec::new(),
            by_name: HashMap::new(),
        };
        pool.intern(Node::True);
        pool.intern(Node::False);
        pool
    }

    fn intern(&mut self, node: Node) -> TermId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn node(&self, t: TermId) -> &Node {
        &self.nodes[t.0 as usize]
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn tt(&self) -> TermId {
        TermId(0)
    }

    pub fn ff(&self) -> TermId {
        TermId(1)
    }

    pub fn bool_lit(&self, b: bool) -> TermId {
        if b {
            self.tt()
        } else {
            self.ff()
        }
    }

    pub fn int(&mut self, n: i64) -> TermId {
        self.intern(Node::Int(n))
    }

    /// Declares (or returns the already declared) constant `name`.
    ///
    /// Panics if `name` was declared with a different sort.
    pub fn var(&mut self, name: &str, sort: Sort) -> TermId {
        if let Some(&t) = self.by_name.get(name) {
            let Node::Var(d) = self.node(t) else {
                unreachable!()
            };
            assert_eq!(
                self.decls[*d as usize].sort, sort,
                "`{name}` redeclared with another sort"
            );
            return t;
        }
        let d = self.decls.len() as u32;
        self.decls.push(Decl {
            name: name.to_string(),
            sort,
        });
        let t = self.intern(Node::Var(d));
        self.by_name.insert(name.to_string(), t);
        t
    }

    pub fn bool_var(&mut self, name: &str) -> TermId {
        self.var(name, Sort::Bool)
    }

    /// The constant called `name`, if declared.
    pub fn lookup(&self, name: &str) -> Option<TermId> {
        self.by_name.get(name).copied()
    }

    pub fn not(&mut self, a: TermId) -> TermId {
        match self.node(a) {
            Node::True => self.ff(),
            Node::False => self.tt(),
            Node::Not(inner) => *inner,
            _ => self.intern(Node::Not(a)),
        }
    }

    pub fn and(&mut self, items: impl IntoIterator<Item = TermId>) -> TermId {
        let mut out = Vec::new();
        for t in items {
            match self.node(t) {
                Node::True => {}
                Node::False => return self.ff(),
                _ => {
                    if !out.contains(&t) {
                        out.push(t);
                    }
                }
            }
        }
        match out.len() {
            0 => self.tt(),
            1 => out[0],
            _ => self.intern(Node::And(out)),
        }
    }

    pub fn or(&mut self, items: impl IntoIterator<Item = TermId>) -> TermId {
        let mut out = Vec::new();
        for t in items {
            match self.node(t) {
                Node::False => {}
                Node::True => return self.tt(),
                _ => {
                    if !out.contains(&t) {
                        out.push(t);
                    }
                }
            }
        }
        match out.len() {
            0 => self.ff(),
            1 => out[0],
            _ => self.intern(Node::Or(out)),
        }
    }

    pub fn and2(&mut self, a: TermId, b: TermId) -> TermId {
        self.and([a, b])
    }

    pub fn or2(&mut self, a: TermId, b: TermId) -> TermId {
        self.or([a, b])
    }

    pub fn implies(&mut self, a: TermId, b: TermId) -> TermId {
        match (self.node(a), self.node(b)) {
            (Node::False, _) | (_, Node::True) => self.tt(),
            (Node::True, _) => b,
            (_, Node::False) => self.not(a),
            _ if a == b => self.tt(),
            _ => self.intern(Node::Implies(a, b)),
        }
    }

    /// Boolean equivalence.
    pub fn iff(&mut self, a: TermId, b: TermId) -> TermId {
        match (self.node(a), self.node(b)) {
            _ if a == b => self.tt(),
            (Node::True, _) => b,
            (_, Node::True) => a,
            (Node::False, _) => self.not(b),
            (_, Node::False) => self.not(a),
            _ => self.intern(Node::Eq(a, b)),
        }
    }

    /// Integer equality.
    pub fn int_eq(&mut self, a: TermId, b: TermId) -> TermId {
        match (self.node(a), self.node(b)) {
            _ if a == b => self.tt(),
            (Node::Int(x), Node::Int(y)) => self.bool_lit(x == y),
            _ => self.intern(Node::Eq(a, b)),
        }
    }

    pub fn ge(&mut self, a: TermId, b: TermId) -> TermId {
        match (self.node(a), self.node(b)) {
            (Node::Int(x), Node::Int(y)) => self.bool_lit(x >= y),
            _ => self.intern(Node::Ge(a, b)),
        }
    }

    pub fn ite(&mut self, c: TermId, a: TermId, b: TermId) -> TermId {
        match self.node(c) {
            Node::True => a,
            Node::False => b,
            _ if a == b => a,
            _ => self.intern(Node::Ite(c, a, b)),
        }
    }

    pub fn add(&mut self, items: impl IntoIterator<Item = TermId>) -> TermId {
        let mut out = Vec::new();
        let mut lit = 0i64;
        for t in items {
            match self.node(t) {
                Node::Int(n) => lit += n,
                _ => out.push(t),
            }
        }
        if lit != 0 || out.is_empty() {
            let l = self.int(lit);
            out.push(l);
        }
        match out.len() {
            1 => out[0],
            _ => self.intern(Node::Add(out)),
        }
    }

    pub fn sub(&mut self, a: TermId, b: TermId) -> TermId {
        match (self.node(a), self.node(b)) {
            (_, Node::Int(0)) => a,
            (Node::Int(x), Node::Int(y)) => {
                let d = x - y;
                self.int(d)
            }
            _ => self.intern(Node::Sub(a, b)),
        }
    }

    /// At most one of `items` is true, as pairwise exclusions.
    pub fn at_most_one(&mut self, items: &[TermId]) -> TermId {
        let mut parts = Vec::new();
        for (k, &a) in items.iter().enumerate() {
            for &b in &items[k + 1..] {
                let both = self.and2(a, b);
                parts.push(self.not(both));
            }
        }
        self.and(parts)
    }

    pub fn exactly_one(&mut self, items: &[TermId]) -> TermId {
        let some = self.or(items.iter().copied());
        let amo = self.at_most_one(items);
        self.and2(some, amo)
    }

    fn children(&self, t: TermId) -> Vec<TermId> {
        match self.node(t) {
            Node::True | Node::False | Node::Int(_) | Node::Var(_) => Vec::new(),
            Node::Not(a) => vec![*a],
            Node::And(xs) | Node::Or(xs) | Node::Add(xs) => xs.clone(),
            Node::Implies(a, b) | Node::Eq(a, b) | Node::Ge(a, b) | Node::Sub(a, b) => vec![*a, *b],
            Node::Ite(c, a, b) => vec![*c, *a, *b],
        }
    }

    /// Number of distinct nodes reachable from `roots`.
    pub fn dag_size(&self, roots: &[TermId]) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<TermId> = roots.to_vec();
        let mut n = 0;
        while let Some(t) = stack.pop() {
            if std::mem::replace(&mut seen[t.0 as usize], true) {
                continue;
            }
            n += 1;
            stack.extend(self.children(t));
        }
        n
    }

    /// Sort of a term.
    pub fn sort(&self, t: TermId) -> Sort {
        match self.node(t) {
            Node::Int(_) | Node::Add(_) | Node::Sub(..) => Sort::Int,
            Node::Var(d) => self.decls[*d as usize].sort,
            Node::Ite(_, a, _) => self.sort(*a),
            _ => Sort::Bool,
        }
    }

    /// Prints a term in full, without sharing.
    pub fn render(&self, t: TermId) -> String {
        let mut out = String::new();
        self.write_term(t, &HashMap::new(), &mut out);
        out
    }

    fn write_term(&self, t: TermId, names: &HashMap<TermId, String>, out: &mut String) {
        if let Some(n) = names.get(&t) {
            out.push_str(n);
            return;
        }
        let (head, args): (&str, Vec<TermId>) = match self.node(t) {
            Node::True => return out.push_str("true"),
            Node::False => return out.push_str("false"),
            Node::Int(n) if *n < 0 => return write!(out, "(- {})", -n).unwrap(),
            Node::Int(n) => return write!(out, "{n}").unwrap(),
            Node::Var(d) => return out.push_str(&quote_symbol(&self.decls[*d as usize].name)),
            Node::Not(a) => ("not", vec![*a]),
            Node::And(xs) => ("and", xs.clone()),
            Node::Or(xs) => ("or", xs.clone()),
            Node::Implies(a, b) => ("=>", vec![*a, *b]),
            Node::Eq(a, b) => ("=", vec![*a, *b]),
            Node::Ge(a, b) => (">=", vec![*a, *b]),
            Node::Ite(c, a, b) => ("ite", vec![*c, *a, *b]),
            Node::Add(xs) => ("+", xs.clone()),
            Node::Sub(a, b) => ("-", vec![*a, *b]),
        };
        out.push('(');
        out.push_str(head);
        for a in args {
            out.push(' ');
            self.write_term(a, names, out);
        }
        out.push(')');
    }

    /// Prints a complete script: logic, declarations, shared definitions,
    /// one `assert` per entry of `asserts`, then `(check-sat)` and
    /// `(get-model)`.
    ///
    /// Compound subterms that occur more than once and are not tiny are
    /// bound once with `define-fun` as `share_<N>`.
    pub fn script(&self, logic: &str, comments: &[String], asserts: &[TermId]) -> String {
        let mut refs = vec![0u32; self.nodes.len()];
        let mut size = vec![0usize; self.nodes.len()];
        let mut order = Vec::new();
        let mut seen = vec![false; self.nodes.len()];
        for &r in asserts {
            refs[r.0 as usize] += 1;
            self.post_order(r, &mut seen, &mut refs, &mut order);
        }
        for &t in &order {
            size[t.0 as usize] = 1 + self
                .children(t)
                .iter()
                .map(|c| size[c.0 as usize])
                .sum::<usize>();
        }
        let mut out = String::new();
        for c in comments {
            writeln!(out, "; {c}").unwrap();
        }
        writeln!(out, "(set-option :produce-models true)").unwrap();
        writeln!(out, "(set-logic {logic})").unwrap();
        for d in &self.decls {
            let sort = match d.sort {
                Sort::Bool => "Bool",
                Sort::Int => "Int",
            };
            writeln!(out, "(declare-const {} {sort})", quote_symbol(&d.name)).unwrap();
        }
        let mut names: HashMap<TermId, String> = HashMap::new();
        for &t in &order {
            let i = t.0 as usize;
            if refs[i] > 1 && size[i] >= 5 && !asserts.contains(&t) {
                let name = format!("share_{}", names.len());
                let sort = match self.sort(t) {
                    Sort::Bool => "Bool",
                    Sort::Int => "Int",
                };
                let mut body = String::new();
                self.write_term(t, &names, &mut body);
                writeln!(out, "(define-fun {name} () {sort} {body})").unwrap();
                names.insert(t, name);
            }
        }
        for &a in asserts {
            let mut body = String::new();
            self.write_term(a, &names, &mut body);
            writeln!(out, "(assert {body})").unwrap();
        }
        out.push_str("(check-sat)\n(get-model)\n");
        out
    }

    fn post_order(
        &self,
        root: TermId,
        seen: &mut [bool],
        refs: &mut [u32],
        order: &mut Vec<TermId>,
    ) {
        // Iterative to stay clear of deep recursion on long conjunctions.
        let mut stack = vec![(root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                order.push(t);
                continue;
            }
            if seen[t.0 as usize] {
                continue;
            }
            seen[t.0 as usize] = true;
            stack.push((t, true));
            for c in self.children(t).into_iter().rev() {
                refs[c.0 as usize] += 1;
                if !seen[c.0 as usize] {
                    stack.push((c, false));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_and_sharing() {
        let mut p = TermPool::new();
        let a = p.bool_var("a");
        let b = p.bool_var("b");
        let tt = p.tt();
        let ff = p.ff();
        assert_eq!(p.and([a, tt, a]), a);
        assert_eq!(p.and([a, ff]), ff);
        assert_eq!(p.or([ff, ff]), ff);
        let na = p.not(a);
        assert_eq!(p.not(na), a);
        let x = p.and2(a, b);
        assert_eq!(p.and2(a, b), x);
        assert_eq!(p.implies(ff, b), tt);
        assert_eq!(p.iff(a, tt), a);
        assert_eq!(p.render(x), "(and a b)");
    }

    #[test]
    fn quoting() {
        assert!(is_simple_symbol("p_PR_1_0"));
        assert!(!is_simple_symbol("1abc"));
        assert_eq!(quote_symbol("p_a:b_1_0"), "|p_a:b_1_0|");
    }

    #[test]
    fn script_binds_shared_subterms() {
        let mut p = TermPool::new();
        let vs: Vec<TermId> = (0..4).map(|k| p.bool_var(&format!("v{k}"))).collect();
        let big = p.or(vs.clone());
        let c = p.bool_var("c");
        let d = p.bool_var("d");
        let x = p.and2(big, c);
        let y = p.and2(big, d);
        let s = p.script("QF_LIA", &[], &[x, y]);
        assert!(s.contains("(define-fun share_0 () Bool (or v0 v1 v2 v3))"));
        assert!(s.contains("(assert (and share_0 c))"));
        assert!(s.ends_with("(check-sat)\n(get-model)\n"));
    }

    #[test]
    fn integer_terms() {
        let mut p = TermPool::new();
        let n = p.var("n", Sort::Int);
        let one = p.int(1);
        let zero = p.int(0);
        let s = p.add([n, zero]);
        assert_eq!(s, n);
        let m = p.sub(n, one);
        assert_eq!(p.render(m), "(- n 1)");
        let neg = p.int(-2);
        assert_eq!(p.render(neg), "(- 2)");
        let g = p.ge(one, zero);
        assert_eq!(g, p.tt());
    }
}
