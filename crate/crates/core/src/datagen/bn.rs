//! Discrete Bayesian networks and their text format.
//!
//! The format is a small subset of the classic BIF style:
//!
//! ```text
//! # comment
//! network asia;
//! variable smoke { states: yes, no; }
//! variable lung { states: yes, no; }
//! probability ( smoke ) { table: 0.5, 0.5; }
//! probability ( lung | smoke ) {
//!   (yes): 0.1, 0.9;
//!   (no): 0.01, 0.99;
//! }
//! ```
//!
//! Conditional rows are keyed by parent states in the order the parents are
//! listed after `|`; every parent configuration must appear exactly once.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Dag;

const ROW_SUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

/// Conditional probability table. Row `k` holds P(child | parent config `k`),
/// where configurations are numbered in mixed radix with the last parent
/// varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub parents: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    name: String,
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    dag: Dag,
}

impl BayesNet {
    /// Validates and builds a network. Rows within tolerance of one are
    /// renormalized so stored rows sum to one to rounding.
    pub fn new(name: impl Into<String>, variables: Vec<Variable>, mut cpts: Vec<Cpt>) -> Result<Self> {
        if variables.len() != cpts.len() {
            return Err(Error::InvalidNetwork(format!(
                "{} variables but {} tables",
                variables.len(),
                cpts.len()
            )));
        }
        for (i, (v, cpt)) in variables.iter().zip(cpts.iter_mut()).enumerate() {
            if v.states.is_empty() {
                return Err(Error::InvalidNetwork(format!("`{}` has no states", v.name)));
            }
            if variables[..i].iter().any(|o| o.name == v.name) {
                return Err(Error::InvalidNetwork(format!("duplicate variable `{}`", v.name)));
            }
            let expected: usize = cpt
                .parents
                .iter()
                .map(|&p| variables.get(p).map_or(0, |pv| pv.states.len()))
                .product();
            if cpt.rows.len() != expected {
                return Err(Error::InvalidNetwork(format!(
                    "`{}` has {} rows, expected {expected}",
                    v.name,
                    cpt.rows.len()
                )));
            }
            for row in cpt.rows.iter_mut() {
                check_row(&v.name, row, v.states.len())?;
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    row.iter_mut().for_each(|p| *p /= s);
                }
            }
        }
        let dag = Dag::new(
            variables.iter().map(|v| v.name.clone()).collect(),
            cpts.iter().map(|c| c.parents.clone()).collect(),
        )?;
        Ok(BayesNet {
            name: name.into(),
            variables,
            cpts,
            dag,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, idx: usize) -> &Variable {
        &self.variables[idx]
    }

    pub fn cpt(&self, idx: usize) -> &Cpt {
        &self.cpts[idx]
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.dag.index_of(name)
    }

    pub fn card(&self, idx: usize) -> usize {
        self.variables[idx].states.len()
    }

    /// Row index of a CPT for the given parent states (same order as
    /// `cpt.parents`).
    pub fn row_index(&self, idx: usize, parent_states: &[usize]) -> usize {
        self.cpts[idx]
            .parents
            .iter()
            .zip(parent_states)
            .fold(0, |acc, (&p, &s)| acc * self.card(p) + s)
    }

    pub fn prob(&self, idx: usize, parent_states: &[usize], state: usize) -> f64 {
        self.cpts[idx].rows[self.row_index(idx, parent_states)][state]
    }
}

fn check_row(node: &str, row: &[f64], n_states: usize) -> Result<()> {
    if row.len() != n_states {
        return Err(Error::InvalidNetwork(format!(
            "`{node}`: row has {} entries, expected {n_states}",
            row.len()
        )));
    }
    if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidNetwork(format!(
            "`{node}`: probabilities must lie in [0, 1]"
        )));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::InvalidNetwork(format!(
            "`{node}`: row sums to {s}, not 1"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = li + 1;
        let code = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let chars: Vec<(usize, char)> = code.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (_, c) = chars[i];
            let column = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if "{}(),;:|".contains(c) {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line: line_no,
                    column,
                });
                i += 1;
            } else if is_word_char(c) {
                let start = i;
                while i < chars.len() && is_word_char(chars[i].1) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|(_, c)| c).collect();
                out.push(Token {
                    tok: Tok::Word(word),
                    line: line_no,
                    column,
                });
            } else {
                return Err(Error::Parse {
                    line: line_no,
                    column,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || "_.-+".contains(c)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn err<T>(&self, tok: Option<&Token>, message: impl Into<String>) -> Result<T> {
        let (line, column) = tok.map_or(self.end, |t| (t.line, t.column));
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<(String, Token)> {
        match self.next() {
            Some(t) => match &t.tok {
                Tok::Word(w) => Ok((w.clone(), t.clone())),
                Tok::Punct(c) => self.err(Some(&t), format!("expected {what}, found `{c}`")),
            },
            None => self.err(None, format!("expected {what}, found end of input")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let (w, t) = self.word(&format!("`{kw}`"))?;
        if w != kw {
            return self.err(Some(&t), format!("expected `{kw}`, found `{w}`"));
        }
        Ok(())
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(t) if t.tok == Tok::Punct(c) => Ok(()),
            Some(t) => {
                let found = match &t.tok {
                    Tok::Word(w) => w.clone(),
                    Tok::Punct(p) => p.to_string(),
                };
                self.err(Some(&t), format!("expected `{c}`, found `{found}`"))
            }
            None => self.err(None, format!("expected `{c}`, found end of input")),
        }
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(t) if t.tok == Tok::Punct(c))
    }

    /// `w1, w2, ...` up to (not including) `;` or `)`.
    fn word_list(&mut self, what: &str) -> Result<Vec<(String, Token)>> {
        let mut out = vec![self.word(what)?];
        while self.at_punct(',') {
            self.pos += 1;
            out.push(self.word(what)?);
        }
        Ok(out)
    }

    fn numbers(&mut self) -> Result<(Vec<f64>, Token)> {
        let words = self.word_list("a probability")?;
        let first = words[0].1.clone();
        let mut vals = Vec::with_capacity(words.len());
        for (w, t) in words {
            match w.parse::<f64>() {
                Ok(v) if v.is_finite() => vals.push(v),
                _ => return self.err(Some(&t), format!("`{w}` is not a number")),
            }
        }
        Ok((vals, first))
    }
}

struct RawTable {
    child: usize,
    parents: Vec<usize>,
    rows: Vec<Option<Vec<f64>>>,
}

/// Parses the network text format.
pub fn parse_bn(text: &str) -> Result<BayesNet> {
    let toks = tokenize(text)?;
    let end = (text.lines().count().max(1), 1);
    let mut p = Parser { toks, pos: 0, end };

    p.keyword("network")?;
    let (name, _) = p.word("a network name")?;
    p.punct(';')?;

    let mut variables: Vec<Variable> = Vec::new();
    let mut tables: Vec<RawTable> = Vec::new();
    let lookup = |vars: &[Variable], name: &str| vars.iter().position(|v| v.name == name);

    while let Some(t) = p.next() {
        let kw = match &t.tok {
            Tok::Word(w) => w.clone(),
            Tok::Punct(c) => return p.err(Some(&t), format!("unexpected `{c}`")),
        };
        match kw.as_str() {
            "variable" => {
                let (vname, vt) = p.word("a variable name")?;
                if lookup(&variables, &vname).is_some() {
                    return p.err(Some(&vt), format!("variable `{vname}` declared twice"));
                }
                p.punct('{')?;
                p.keyword("states")?;
                p.punct(':')?;
                let states: Vec<String> =
                    p.word_list("a state name")?.into_iter().map(|s| s.0).collect();
                p.punct(';')?;
                p.punct('}')?;
                for (i, s) in states.iter().enumerate() {
                    if states[..i].contains(s) {
                        return p.err(Some(&vt), format!("`{vname}` repeats state `{s}`"));
                    }
                }
                variables.push(Variable { name: vname, states });
            }
            "probability" => {
                p.punct('(')?;
                let (cname, ct) = p.word("a variable name")?;
                let child = lookup(&variables, &cname)
                    .map_or_else(|| p.err(Some(&ct), format!("undeclared variable `{cname}`")), Ok)?;
                if tables.iter().any(|t| t.child == child) {
                    return p.err(Some(&ct), format!("second probability block for `{cname}`"));
                }
                let mut parents = Vec::new();
                if p.at_punct('|') {
                    p.pos += 1;
                    for (pname, pt) in p.word_list("a parent name")? {
                        let idx = lookup(&variables, &pname).map_or_else(
                            || p.err(Some(&pt), format!("undeclared parent `{pname}` of `{cname}`")),
                            Ok,
                        )?;
                        if parents.contains(&idx) || idx == child {
                            return p.err(Some(&pt), format!("bad parent `{pname}` of `{cname}`"));
                        }
                        parents.push(idx);
                    }
                }
                p.punct(')')?;
                p.punct('{')?;
                let n_rows: usize = parents.iter().map(|&q| variables[q].states.len()).product();
                let n_states = variables[child].states.len();
                let mut rows: Vec<Option<Vec<f64>>> = vec![None; n_rows];
                while !p.at_punct('}') {
                    let (key, kt) = if parents.is_empty() {
                        p.keyword("table")?;
                        (0, p.peek().cloned())
                    } else {
                        let open = p.peek().cloned();
                        p.punct('(')?;
                        let states = p.word_list("a parent state")?;
                        p.punct(')')?;
                        if states.len() != parents.len() {
                            return p.err(
                                open.as_ref(),
                                format!("`{cname}` row needs {} parent states", parents.len()),
                            );
                        }
                        let mut key = 0;
                        for ((s, st), &q) in states.iter().zip(&parents) {
                            let si = variables[q].states.iter().position(|x| x == s);
                            let Some(si) = si else {
                                return p.err(
                                    Some(st),
                                    format!("`{s}` is not a state of `{}`", variables[q].name),
                                );
                            };
                            key = key * variables[q].states.len() + si;
                        }
                        (key, open)
                    };
                    p.punct(':')?;
                    let (vals, vt) = p.numbers()?;
                    p.punct(';')?;
                    if vals.len() != n_states {
                        return p.err(
                            Some(&vt),
                            format!("`{cname}` row has {} values, expected {n_states}", vals.len()),
                        );
                    }
                    if let Err(Error::InvalidNetwork(msg)) = check_row(&cname, &vals, n_states) {
                        return p.err(Some(&vt), msg);
                    }
                    if rows[key].is_some() {
                        return p.err(kt.as_ref(), format!("`{cname}` row given twice"));
                    }
                    rows[key] = Some(vals);
                }
                let close = p.peek().cloned();
                p.punct('}')?;
                if rows.iter().any(Option::is_none) {
                    return p.err(
                        close.as_ref(),
                        format!("`{cname}` table is missing parent configurations"),
                    );
                }
                tables.push(RawTable {
                    child,
                    parents,
                    rows,
                });
            }
            other => {
                return p.err(
                    Some(&t),
                    format!("expected `variable` or `probability`, found `{other}`"),
                )
            }
        }
    }

    let mut cpts: Vec<Option<Cpt>> = vec![None; variables.len()];
    for t in tables {
        cpts[t.child] = Some(Cpt {
            parents: t.parents,
            rows: t.rows.into_iter().map(|r| r.expect("checked")).collect(),
        });
    }
    let cpts = cpts
        .into_iter()
        .zip(&variables)
        .map(|(c, v)| {
            c.ok_or_else(|| Error::InvalidNetwork(format!("no probability block for `{}`", v.name)))
        })
        .collect::<Result<Vec<_>>>()?;
    BayesNet::new(name, variables, cpts)
}

/// Canonical text form: declaration order, rows in mixed-radix order, and
/// shortest round-trip decimal probabilities.
pub fn emit_bn(bn: &BayesNet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "network {};", bn.name);
    for v in &bn.variables {
        let _ = writeln!(s, "variable {} {{ states: {}; }}", v.name, v.states.join(", "));
    }
    for (i, v) in bn.variables.iter().enumerate() {
        let cpt = &bn.cpts[i];
        let fmt_row = |row: &[f64]| {
            row.iter()
                .map(|p| format!("{p:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        if cpt.parents.is_empty() {
            let _ = writeln!(
                s,
                "probability ( {} ) {{ table: {}; }}",
                v.name,
                fmt_row(&cpt.rows[0])
            );
            continue;
        }
        let pnames: Vec<&str> = cpt
            .parents
            .iter()
            .map(|&p| bn.variables[p].name.as_str())
            .collect();
        let _ = writeln!(s, "probability ( {} | {} ) {{", v.name, pnames.join(", "));
        let cards: Vec<usize> = cpt.parents.iter().map(|&p| bn.card(p)).collect();
        for (k, row) in cpt.rows.iter().enumerate() {
            let mut rem = k;
            let mut states = vec![""; cards.len()];
            for j in (0..cards.len()).rev() {
                states[j] = &bn.variables[cpt.parents[j]].states[rem % cards[j]];
                rem /= cards[j];
            }
            let _ = writeln!(s, "  ({}): {};", states.join(", "), fmt_row(row));
        }
        let _ = writeln!(s, "}}");
    }
    s
}
