//! The `.nlmp` model format.
//!
//! ```text
//! # comment to end of line
//! lmp                               # optional: at most one measure per (state, label)
//! states s t x y
//! labels a b
//! sigma powerset                    # default; or: sigma gen {s t} {x}
//! trans s a x:1/2 y:1/2             # one line per measure in T_a(s)
//! trans x b -> x                    # Dirac shorthand
//! ```
//!
//! Weights are attached to states. On a coarse σ-algebra the weights inside
//! one atom are added into the atom's weight.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measurable::{SigmaAlgebra, Universe};
use crate::measures::Measure;
use crate::model::{Lmp, Nlmp};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::stateset::StateSet;

#[derive(Debug, Clone)]
pub enum ModelKind {
    Nlmp(Nlmp),
    Lmp(Lmp),
}

/// A parsed model with the source line of every transition.
#[derive(Debug, Clone)]
pub struct ModelDocument {
    pub kind: ModelKind,
    /// `(line, state, label)` for every `trans` line, in file order.
    pub transition_lines: Vec<(usize, usize, usize)>,
}

impl ModelDocument {
    /// The model as an NLMP; an LMP is embedded with singleton rows.
    pub fn nlmp(&self) -> Nlmp {
        match &self.kind {
            ModelKind::Nlmp(m) => m.clone(),
            ModelKind::Lmp(l) => l.embed(),
        }
    }

    pub fn lmp(&self) -> Option<&Lmp> {
        match &self.kind {
            ModelKind::Lmp(l) => Some(l),
            ModelKind::Nlmp(_) => None,
        }
    }

    pub fn is_lmp(&self) -> bool {
        self.lmp().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    LBrace,
    RBrace,
    Colon,
    Arrow,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '/')
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '{' => {
                out.push((Tok::LBrace, col));
                i += 1;
            }
            '}' => {
                out.push((Tok::RBrace, col));
                i += 1;
            }
            ':' => {
                out.push((Tok::Colon, col));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, col));
                i += 2;
            }
            c if is_word_char(c) => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Word(chars[start..i].iter().collect()), col));
            }
            other => {
                return Err(parse_error(
                    lineno,
                    col,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(out)
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Line {
    no: usize,
    toks: Vec<(Tok, usize)>,
    /// Column just past the end of the line, for errors at end of input.
    end: usize,
}

impl Line {
    fn col(&self, i: usize) -> usize {
        self.toks.get(i).map_or(self.end, |t| t.1)
    }

    fn err(&self, i: usize, msg: impl Into<String>) -> Error {
        parse_error(self.no, self.col(i), msg)
    }

    fn word(&self, i: usize, what: &str) -> Result<&str> {
        match self.toks.get(i) {
            Some((Tok::Word(w), _)) => Ok(w),
            _ => Err(self.err(i, format!("expected {what}"))),
        }
    }
}

/// Lifts a domain error to a parse error at the given line and column.
fn at(line: &Line, i: usize) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Domain(msg) | Error::Precondition(msg) | Error::Unsupported(msg) => line.err(i, msg),
        other => other,
    }
}

/// A `trans` line before measures are built.
struct PendingTrans {
    line: usize,
    state: usize,
    label: usize,
    measure: Measure,
}

pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let toks = lex_line(raw, i + 1)?;
        if !toks.is_empty() {
            lines.push(Line {
                no: i + 1,
                toks,
                end: raw.chars().count() + 1,
            });
        }
    }

    let mut is_lmp = false;
    let mut universe: Option<Arc<Universe>> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut sigma: Option<Arc<SigmaAlgebra>> = None;
    let mut sigma_line = false;
    let mut pending = Vec::new();

    for line in &lines {
        let keyword = line.word(0, "a keyword")?;
        match keyword {
            "lmp" => {
                if line.toks.len() > 1 {
                    return Err(line.err(1, "`lmp` takes no arguments"));
                }
                if universe.is_some() {
                    return Err(line.err(0, "`lmp` must precede the `states` line"));
                }
                is_lmp = true;
            }
            "states" => {
                if universe.is_some() {
                    return Err(line.err(0, "duplicate `states` line"));
                }
                let names = (1..line.toks.len())
                    .map(|i| line.word(i, "a state name").map(str::to_string))
                    .collect::<Result<Vec<_>>>()?;
                universe = Some(Arc::new(Universe::new(names).map_err(at(line, 1))?));
            }
            "labels" => {
                if labels.is_some() {
                    return Err(line.err(0, "duplicate `labels` line"));
                }
                let mut names: Vec<String> = Vec::new();
                for i in 1..line.toks.len() {
                    let w = line.word(i, "a label name")?;
                    if names.iter().any(|n| n == w) {
                        return Err(line.err(i, format!("duplicate label `{w}`")));
                    }
                    names.push(w.to_string());
                }
                labels = Some(names);
            }
            "sigma" => {
                let u = universe
                    .clone()
                    .ok_or_else(|| line.err(0, "`sigma` must follow the `states` line"))?;
                if sigma.is_some() {
                    let msg = if sigma_line {
                        "duplicate `sigma` line"
                    } else {
                        "`sigma` must precede the `trans` lines"
                    };
                    return Err(line.err(0, msg));
                }
                sigma_line = true;
                sigma = Some(Arc::new(parse_sigma(line, u)?));
            }
            "trans" => {
                let u = universe
                    .clone()
                    .ok_or_else(|| line.err(0, "`trans` must follow the `states` line"))?;
                let ls = labels
                    .as_ref()
                    .ok_or_else(|| line.err(0, "`trans` must follow the `labels` line"))?;
                let sig = sigma
                    .get_or_insert_with(|| Arc::new(SigmaAlgebra::powerset(u.clone())))
                    .clone();
                pending.push(parse_trans(line, &u, ls, sig)?);
            }
            other => return Err(line.err(0, format!("unknown keyword `{other}`"))),
        }
    }

    let universe = universe.ok_or_else(|| parse_error(1, 1, "missing `states` line"))?;
    let labels = labels.unwrap_or_default();
    let sigma = sigma.unwrap_or_else(|| Arc::new(SigmaAlgebra::powerset(universe.clone())));
    let transition_lines = pending.iter().map(|p| (p.line, p.state, p.label)).collect();

    let kind = if is_lmp {
        let mut kernels: Vec<Vec<Option<Measure>>> = vec![vec![None; universe.len()]; labels.len()];
        for p in pending {
            let slot = &mut kernels[p.label][p.state];
            if slot.is_some() {
                return Err(parse_error(
                    p.line,
                    1,
                    format!(
                        "lmp: second transition for state `{}` and label `{}`",
                        universe.name(p.state),
                        labels[p.label]
                    ),
                ));
            }
            *slot = Some(p.measure);
        }
        ModelKind::Lmp(Lmp::new(sigma, labels, kernels)?)
    } else {
        let mut b = Nlmp::builder(sigma, labels)?;
        for p in pending {
            b.add(p.state, p.label, p.measure)?;
        }
        ModelKind::Nlmp(b.build())
    };
    Ok(ModelDocument {
        kind,
        transition_lines,
    })
}

fn parse_sigma(line: &Line, universe: Arc<Universe>) -> Result<SigmaAlgebra> {
    match line.word(1, "`powerset` or `gen`")? {
        "powerset" => {
            if line.toks.len() > 2 {
                return Err(line.err(2, "`sigma powerset` takes no arguments"));
            }
            Ok(SigmaAlgebra::powerset(universe))
        }
        "gen" => {
            let mut generators = Vec::new();
            let mut i = 2;
            while i < line.toks.len() {
                if line.toks[i].0 != Tok::LBrace {
                    return Err(line.err(i, "expected `{`"));
                }
                i += 1;
                let mut set = StateSet::empty(universe.len());
                loop {
                    match line.toks.get(i) {
                        Some((Tok::RBrace, _)) => {
                            i += 1;
                            break;
                        }
                        Some((Tok::Word(w), _)) => {
                            set.insert(universe.lookup(w).map_err(at(line, i))?);
                            i += 1;
                        }
                        _ => return Err(line.err(i, "expected a state name or `}`")),
                    }
                }
                generators.push(set);
            }
            SigmaAlgebra::generate(universe, &generators)
        }
        other => Err(line.err(1, format!("unknown σ-algebra `{other}`"))),
    }
}

fn parse_trans(
    line: &Line,
    universe: &Universe,
    labels: &[String],
    sigma: Arc<SigmaAlgebra>,
) -> Result<PendingTrans> {
    let state = universe
        .lookup(line.word(1, "a state")?)
        .map_err(at(line, 1))?;
    let label_name = line.word(2, "a label")?;
    let label = labels
        .iter()
        .position(|l| l == label_name)
        .ok_or_else(|| line.err(2, format!("unknown label `{label_name}`")))?;

    if let Some((Tok::Arrow, _)) = line.toks.get(3) {
        let target = universe
            .lookup(line.word(4, "a target state")?)
            .map_err(at(line, 4))?;
        if line.toks.len() > 5 {
            return Err(line.err(5, "unexpected token after Dirac target"));
        }
        let measure = Measure::dirac(sigma, target).map_err(at(line, 4))?;
        return Ok(PendingTrans {
            line: line.no,
            state,
            label,
            measure,
        });
    }

    let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut i = 3;
    if i >= line.toks.len() {
        return Err(line.err(i, "expected `->` or weighted targets"));
    }
    while i < line.toks.len() {
        let target = universe
            .lookup(line.word(i, "a target state")?)
            .map_err(at(line, i))?;
        if line.toks.get(i + 1).map(|t| &t.0) != Some(&Tok::Colon) {
            return Err(line.err(i + 1, "expected `:`"));
        }
        let w_text = line.word(i + 2, "a weight")?;
        let w = parse_rational(w_text)
            .filter(|w| !num_traits::Signed::is_negative(w))
            .ok_or_else(|| line.err(i + 2, format!("malformed weight `{w_text}`")))?;
        if weights.insert(target, w).is_some() {
            return Err(line.err(i, format!("duplicate target `{}`", universe.name(target))));
        }
        i += 3;
    }
    let measure = Measure::from_state_weights(sigma, weights).map_err(at(line, 3))?;
    Ok(PendingTrans {
        line: line.no,
        state,
        label,
        measure,
    })
}

fn write_header(out: &mut String, sigma: &SigmaAlgebra, labels: &[String]) {
    let u = sigma.universe();
    let _ = writeln!(out, "states {}", u.names().join(" "));
    let _ = writeln!(out, "labels {}", labels.join(" "));
    if sigma.is_powerset() {
        out.push_str("sigma powerset\n");
    } else {
        out.push_str("sigma gen");
        for block in sigma.atoms().blocks() {
            let names: Vec<&str> = block.iter().map(|&s| u.name(s)).collect();
            let _ = write!(out, " {{{}}}", names.join(" "));
        }
        out.push('\n');
    }
}

fn write_trans(out: &mut String, sigma: &SigmaAlgebra, state: &str, label: &str, mu: &Measure) {
    let u = sigma.universe();
    if let Some(atom) = mu.dirac_atom() {
        let _ = writeln!(
            out,
            "trans {state} {label} -> {}",
            u.name(sigma.atoms().block(atom)[0])
        );
        return;
    }
    let _ = write!(out, "trans {state} {label}");
    for (a, w) in mu.weights().iter().enumerate() {
        if !w.is_zero() {
            let _ = write!(
                out,
                " {}:{}",
                u.name(sigma.atoms().block(a)[0]),
                format_rational(w)
            );
        }
    }
    out.push('\n');
}

/// Canonical text for a model; parsing it yields an identical model.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut out = String::new();
    match &doc.kind {
        ModelKind::Nlmp(m) => {
            write_header(&mut out, m.sigma(), m.labels());
            for (a, label) in m.labels().iter().enumerate() {
                for s in 0..m.num_states() {
                    for mu in m.transitions(a, s) {
                        write_trans(&mut out, m.sigma(), m.universe().name(s), label, mu);
                    }
                }
            }
        }
        ModelKind::Lmp(l) => {
            out.push_str("lmp\n");
            write_header(&mut out, l.sigma(), l.labels());
            for (a, label) in l.labels().iter().enumerate() {
                for s in 0..l.num_states() {
                    if let Some(mu) = l.kernel(a, s) {
                        write_trans(&mut out, l.sigma(), l.sigma().universe().name(s), label, mu);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn minimal_model() {
        let doc = parse_model("states s\nlabels a\n").unwrap();
        let m = doc.nlmp();
        assert_eq!(m.num_states(), 1);
        assert_eq!(m.num_labels(), 1);
        assert!(m.row(0, 0).is_empty());
        assert!(m.validate().is_valid());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let err = parse_model("states s x y\nlabels a\ntrans s a x:1/2 y:1/3\n").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("weights sum to 5/6"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_names_are_located() {
        let err = parse_model("states s\nlabels a\ntrans s b -> s\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 9,
                message: "unknown label `b`".into()
            }
        );
        let err = parse_model("states s\nlabels a\ntrans s a -> q\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 3,
                    column: 14,
                    ..
                }
            ),
            "{err:?}"
        );
        assert!(parse_model("states s s\n").is_err());
        assert!(parse_model("labels a\n").is_err());
        assert!(parse_model("states s\nfoo\n").is_err());
        assert!(parse_model("states s\nlabels a\ntrans s a s:x\n").is_err());
        assert!(parse_model("states s\nlabels a\ntrans s a\n").is_err());
    }

    #[test]
    fn coarse_weights_are_summed_per_atom() {
        let doc =
            parse_model("states s t x\nlabels a\nsigma gen {s t}\ntrans x a s:1/4 t:1/4 x:1/2\n")
                .unwrap();
        let m = doc.nlmp();
        assert_eq!(m.sigma().num_atoms(), 2);
        assert_eq!(m.pool().get(0).weights(), &[ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn lmp_allows_one_kernel_per_state_and_label() {
        let ok =
            parse_model("lmp\nstates s t\nlabels a\ntrans s a -> t\ntrans t a -> t\n").unwrap();
        assert!(ok.is_lmp());
        let partial = parse_model("lmp\nstates s t\nlabels a\ntrans s a -> t\n").unwrap();
        assert!(partial.lmp().unwrap().kernel(0, 1).is_none());
        let twice =
            parse_model("lmp\nstates s\nlabels a\ntrans s a -> s\ntrans s a -> s\n").unwrap_err();
        assert!(matches!(twice, Error::Parse { line: 5, .. }));
    }

    #[test]
    fn comments_and_blank_lines() {
        let doc =
            parse_model("# header\n\nstates s t # two states\nlabels a\ntrans s a -> t # go\n")
                .unwrap();
        assert_eq!(doc.transition_lines, vec![(5, 0, 0)]);
    }

    #[test]
    fn serialize_round_trip() {
        let text = "states s t x\nlabels a b\nsigma gen {s t}\ntrans x a s:1/4 t:1/4 x:1/2\ntrans s b -> x\ntrans t b -> x\n";
        let doc = parse_model(text).unwrap();
        let again = parse_model(&serialize_model(&doc)).unwrap();
        assert_eq!(serialize_model(&again), serialize_model(&doc));
        let (m1, m2) = (doc.nlmp(), again.nlmp());
        assert_eq!(m1.sigma(), m2.sigma());
        assert_eq!(m1.pool().measures(), m2.pool().measures());
    }
}
