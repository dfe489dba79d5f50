//! Declarative model specifications: latent blocks, second-order constructs,
//! structural edges, marker block and outcome.
//!
//! The text format is line oriented. A version header comes first, then
//! bracketed sections:
//!
//! ```text
//! plsspec 1
//! [constructs]
//! EXP = EXP-1, EXP-2, EXP-3
//! PSR = PSR-1, PSR-2
//! I2P = I2P-1, I2P-2
//! [second_order]
//! SI = EXP
//! [edges]
//! SI -> PSR
//! PSR -> I2P
//! [outcome]
//! I2P
//! ```
//!
//! `#` starts a comment. See `docs/spec-format.md` for the full grammar.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEC_HEADER: &str = "plsspec";
pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construct {
    pub name: String,
    pub indicators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondOrder {
    pub name: String,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
        }
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

/// A validated model specification. Construct it with [`ModelSpec::new`] or
/// [`parse_model_spec`]; both enforce the structural invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    constructs: Vec<Construct>,
    second_order: Vec<SecondOrder>,
    edges: Vec<Edge>,
    marker: Option<String>,
    outcome: String,
}

impl ModelSpec {
    pub fn new(
        constructs: Vec<Construct>,
        second_order: Vec<SecondOrder>,
        edges: Vec<Edge>,
        marker: Option<String>,
        outcome: Option<String>,
    ) -> Result<Self> {
        let mut spec = ModelSpec {
            constructs,
            second_order,
            edges,
            marker,
            outcome: outcome.unwrap_or_default(),
        };
        spec.check_structure()?;
        if spec.outcome.is_empty() {
            spec.outcome = infer_outcome(
                &spec.constructs,
                &spec.second_order,
                &spec.edges,
                spec.marker.as_deref(),
            )?;
        }
        spec.check_outcome()?;
        Ok(spec)
    }

    pub fn constructs(&self) -> &[Construct] {
        &self.constructs
    }

    pub fn second_order(&self) -> &[SecondOrder] {
        &self.second_order
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn marker(&self) -> Option<&str> {
        self.marker.as_deref()
    }

    pub fn outcome(&self) -> &str {
        &self.outcome
    }

    pub fn is_second_order(&self, name: &str) -> bool {
        self.second_order.iter().any(|s| s.name == name)
    }

    pub fn has_construct(&self, name: &str) -> bool {
        self.constructs.iter().any(|c| c.name == name) || self.is_second_order(name)
    }

    /// Constructs taking part in estimation, in canonical order: first-order
    /// blocks (marker excluded) as declared, then second-order constructs.
    pub fn estimation_constructs(&self) -> Vec<&str> {
        self.first_order_constructs()
            .into_iter()
            .chain(self.second_order.iter().map(|s| s.name.as_str()))
            .collect()
    }

    /// First-order constructs other than the marker.
    pub fn first_order_constructs(&self) -> Vec<&str> {
        self.constructs
            .iter()
            .filter(|c| Some(c.name.as_str()) != self.marker.as_deref())
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Constructs that appear in at least one structural edge, in canonical order.
    pub fn structural_constructs(&self) -> Vec<&str> {
        self.estimation_constructs()
            .into_iter()
            .filter(|c| {
                self.edges
                    .iter()
                    .any(|e| e.source == *c || e.target == *c)
            })
            .collect()
    }

    pub fn parents(&self, name: &str) -> Vec<&str> {
        let order = self.estimation_constructs();
        let mut ps: Vec<&str> = self
            .edges
            .iter()
            .filter(|e| e.target == name)
            .map(|e| e.source.as_str())
            .collect();
        ps.sort_by_key(|p| order.iter().position(|c| c == p));
        ps
    }

    pub fn children(&self, name: &str) -> Vec<&str> {
        let order = self.estimation_constructs();
        let mut cs: Vec<&str> = self
            .edges
            .iter()
            .filter(|e| e.source == name)
            .map(|e| e.target.as_str())
            .collect();
        cs.sort_by_key(|p| order.iter().position(|c| c == p));
        cs
    }

    pub fn has_edge(&self, source: &str, target: &str) -> bool {
        self.edges
            .iter()
            .any(|e| e.source == source && e.target == target)
    }

    /// Structural constructs with no incoming edge.
    pub fn exogenous(&self) -> Vec<&str> {
        self.structural_constructs()
            .into_iter()
            .filter(|c| self.parents(c).is_empty())
            .collect()
    }

    /// Structural constructs with at least one incoming edge.
    pub fn endogenous(&self) -> Vec<&str> {
        self.structural_constructs()
            .into_iter()
            .filter(|c| !self.parents(c).is_empty())
            .collect()
    }

    /// Structural constructs in a topological order of the edge DAG; ties
    /// keep canonical order.
    pub fn topological_order(&self) -> Vec<&str> {
        let nodes = self.structural_constructs();
        let mut indeg: HashMap<&str, usize> = nodes.iter().map(|n| (*n, 0)).collect();
        for e in &self.edges {
            *indeg.get_mut(e.target.as_str()).expect("edge target") += 1;
        }
        let mut done = Vec::with_capacity(nodes.len());
        let mut remaining: Vec<&str> = nodes.clone();
        while !remaining.is_empty() {
            let pos = remaining
                .iter()
                .position(|n| indeg[n] == 0)
                .expect("spec is acyclic");
            let n = remaining.remove(pos);
            for c in self.children(n) {
                *indeg.get_mut(c).expect("child") -= 1;
            }
            done.push(n);
        }
        done
    }

    /// Indicators measuring a construct. Second-order constructs reuse the
    /// indicators of their components, in component order.
    pub fn block_indicators(&self, name: &str) -> Vec<&str> {
        if let Some(c) = self.constructs.iter().find(|c| c.name == name) {
            return c.indicators.iter().map(String::as_str).collect();
        }
        if let Some(s) = self.second_order.iter().find(|s| s.name == name) {
            return s
                .components
                .iter()
                .flat_map(|c| self.block_indicators(c))
                .collect();
        }
        Vec::new()
    }

    /// Every indicator that enters estimation (marker excluded), in
    /// declaration order.
    pub fn estimation_indicators(&self) -> Vec<&str> {
        self.first_order_constructs()
            .into_iter()
            .flat_map(|c| self.block_indicators(c))
            .collect()
    }

    pub fn marker_indicators(&self) -> Vec<&str> {
        self.marker
            .as_deref()
            .map(|m| self.block_indicators(m))
            .unwrap_or_default()
    }

    /// Every declared indicator including the marker block.
    pub fn all_indicators(&self) -> Vec<&str> {
        self.constructs
            .iter()
            .flat_map(|c| c.indicators.iter().map(String::as_str))
            .collect()
    }

    /// The second-order construct a first-order construct belongs to, if any.
    pub fn higher_order_of(&self, name: &str) -> Option<&str> {
        self.second_order
            .iter()
            .find(|s| s.components.iter().any(|c| c == name))
            .map(|s| s.name.as_str())
    }

    /// Copy of this spec with one structural edge removed. The outcome
    /// invariant is not re-checked, since the copy only feeds re-estimation.
    pub fn without_edge(&self, edge: &Edge) -> Result<ModelSpec> {
        if !self.edges.contains(edge) {
            return Err(Error::InvalidArgument(format!("edge `{edge}` not in spec")));
        }
        let mut copy = self.clone();
        copy.edges.retain(|e| e != edge);
        Ok(copy)
    }

    /// Copy restricted to the given structural constructs: edges among
    /// them, their blocks, and second-order components they need.
    pub fn submodel(&self, keep: &[&str], outcome: &str) -> Result<ModelSpec> {
        for k in keep {
            if !self.has_construct(k) {
                return Err(Error::UnknownConstruct(k.to_string()));
            }
        }
        let mut needed: BTreeSet<String> = keep.iter().map(|s| s.to_string()).collect();
        let second_order: Vec<SecondOrder> = self
            .second_order
            .iter()
            .filter(|s| keep.contains(&s.name.as_str()))
            .cloned()
            .collect();
        for s in &second_order {
            needed.extend(s.components.iter().cloned());
        }
        let constructs = self
            .constructs
            .iter()
            .filter(|c| needed.contains(&c.name))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep.contains(&e.source.as_str()) && keep.contains(&e.target.as_str()))
            .cloned()
            .collect();
        ModelSpec::new(constructs, second_order, edges, None, Some(outcome.to_string()))
    }

    fn check_structure(&self) -> Result<()> {
        let mut names: BTreeSet<&str> = BTreeSet::new();
        let mut owner: HashMap<&str, &str> = HashMap::new();
        for c in &self.constructs {
            if !names.insert(&c.name) {
                return Err(Error::DuplicateConstruct(c.name.clone()));
            }
            if c.indicators.is_empty() {
                return Err(Error::EmptyBlock(c.name.clone()));
            }
            for ind in &c.indicators {
                if let Some(prev) = owner.insert(ind, &c.name) {
                    return Err(Error::DuplicateIndicator {
                        indicator: ind.clone(),
                        first: prev.to_string(),
                        second: c.name.clone(),
                    });
                }
            }
        }
        let first_order: BTreeSet<&str> = names.clone();
        let mut claimed: HashMap<&str, &str> = HashMap::new();
        for s in &self.second_order {
            if !names.insert(&s.name) {
                return Err(Error::DuplicateConstruct(s.name.clone()));
            }
            if s.components.is_empty() {
                return Err(Error::InvalidSecondOrder {
                    name: s.name.clone(),
                    reason: "no components".into(),
                });
            }
            for comp in &s.components {
                if !first_order.contains(comp.as_str()) {
                    let reason = if self.second_order.iter().any(|o| &o.name == comp) {
                        format!("`{comp}` is not a first-order construct")
                    } else {
                        format!("unknown component `{comp}`")
                    };
                    return Err(Error::InvalidSecondOrder {
                        name: s.name.clone(),
                        reason,
                    });
                }
                if Some(comp.as_str()) == self.marker.as_deref() {
                    return Err(Error::InvalidSecondOrder {
                        name: s.name.clone(),
                        reason: format!("`{comp}` is the marker block"),
                    });
                }
                if let Some(prev) = claimed.insert(comp, &s.name) {
                    return Err(Error::InvalidSecondOrder {
                        name: s.name.clone(),
                        reason: format!("`{comp}` already belongs to `{prev}`"),
                    });
                }
            }
        }
        if let Some(m) = &self.marker {
            if !first_order.contains(m.as_str()) {
                return Err(Error::UnknownConstruct(m.clone()));
            }
        }
        let mut seen_edges = BTreeSet::new();
        for e in &self.edges {
            for end in [&e.source, &e.target] {
                if !names.contains(end.as_str()) {
                    return Err(Error::UnknownConstruct(end.clone()));
                }
                if Some(end.as_str()) == self.marker.as_deref() {
                    return Err(Error::MarkerInStructure(end.clone()));
                }
            }
            if e.source == e.target {
                return Err(Error::Cycle(e.source.clone()));
            }
            if !seen_edges.insert(e) {
                return Err(Error::InvalidArgument(format!("duplicate edge `{e}`")));
            }
        }
        if let Some(node) = find_cycle(&self.edges) {
            return Err(Error::Cycle(node));
        }
        Ok(())
    }

    fn check_outcome(&self) -> Result<()> {
        if !self.has_construct(&self.outcome) {
            return Err(Error::UnknownConstruct(self.outcome.clone()));
        }
        if Some(self.outcome.as_str()) == self.marker.as_deref() {
            return Err(Error::MarkerInStructure(self.outcome.clone()));
        }
        if !self.edges.iter().any(|e| e.target == self.outcome) {
            return Err(Error::OutcomeNoIncoming(self.outcome.clone()));
        }
        Ok(())
    }
}

fn infer_outcome(
    constructs: &[Construct],
    second_order: &[SecondOrder],
    edges: &[Edge],
    marker: Option<&str>,
) -> Result<String> {
    let mut candidates: Vec<&str> = Vec::new();
    let names = constructs
        .iter()
        .map(|c| c.name.as_str())
        .filter(|n| Some(*n) != marker)
        .filter(|n| !second_order.iter().any(|s| s.components.iter().any(|c| c == n)))
        .chain(second_order.iter().map(|s| s.name.as_str()));
    for n in names {
        if !edges.iter().any(|e| e.source == n) {
            candidates.push(n);
        }
    }
    match candidates.as_slice() {
        [only] => Ok(only.to_string()),
        _ => Err(Error::MissingOutcome),
    }
}

/// Returns a construct on a directed cycle, if any.
fn find_cycle(edges: &[Edge]) -> Option<String> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in edges {
        adj.entry(&e.source).or_default().push(&e.target);
        adj.entry(&e.target).or_default();
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: HashMap<&str, u8> = adj.keys().map(|k| (*k, 0)).collect();
    fn visit<'a>(
        n: &'a str,
        adj: &BTreeMap<&'a str, Vec<&'a str>>,
        state: &mut HashMap<&'a str, u8>,
    ) -> Option<String> {
        state.insert(n, 1);
        for &m in &adj[n] {
            match state[m] {
                1 => return Some(m.to_string()),
                0 => {
                    if let Some(c) = visit(m, adj, state) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        state.insert(n, 2);
        None
    }
    let keys: Vec<&str> = adj.keys().copied().collect();
    for k in keys {
        if state[k] == 0 {
            if let Some(c) = visit(k, &adj, &mut state) {
                return Some(c);
            }
        }
    }
    None
}

/// One non-blank, non-comment line of a sectioned document.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceLine {
    pub line: usize,
    /// 1-based column of the first content character.
    pub column: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub lines: Vec<SourceLine>,
}

/// Split a versioned, sectioned document into its sections. Shared by the
/// model spec and the generator spec.
pub fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let column = content.len() - content.trim_start().len() + 1;
        if !header_seen {
            let mut parts = trimmed.split_whitespace();
            let (Some(tag), Some(ver), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Syntax {
                    line: line_no,
                    column,
                    message: format!("expected version header `{SPEC_HEADER} {SPEC_VERSION}`"),
                });
            };
            if tag != SPEC_HEADER {
                return Err(Error::Syntax {
                    line: line_no,
                    column,
                    message: format!("expected version header `{SPEC_HEADER} {SPEC_VERSION}`"),
                });
            }
            if ver != SPEC_VERSION.to_string() {
                return Err(Error::UnsupportedVersion(ver.to_string()));
            }
            header_seen = true;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(Error::Syntax {
                    line: line_no,
                    column: column + trimmed.len(),
                    message: "unterminated section header".into(),
                });
            };
            let name = name.trim();
            if !is_identifier(name) {
                return Err(Error::Syntax {
                    line: line_no,
                    column: column + 1,
                    message: format!("invalid section name `{name}`"),
                });
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::Syntax {
                    line: line_no,
                    column,
                    message: format!("section `[{name}]` repeated"),
                });
            }
            sections.push(Section {
                name: name.to_string(),
                line: line_no,
                lines: Vec::new(),
            });
            continue;
        }
        match sections.last_mut() {
            Some(s) => s.lines.push(SourceLine {
                line: line_no,
                column,
                text: trimmed.to_string(),
            }),
            None => {
                return Err(Error::Syntax {
                    line: line_no,
                    column,
                    message: "content before the first section header".into(),
                })
            }
        }
    }
    if !header_seen {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: format!("missing version header `{SPEC_HEADER} {SPEC_VERSION}`"),
        });
    }
    Ok(sections)
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Validate a construct or indicator name at a given position.
pub(crate) fn name_token(tok: &str, line: &SourceLine, offset: usize) -> Result<String> {
    let t = tok.trim();
    if is_identifier(t) {
        Ok(t.to_string())
    } else {
        Err(Error::Syntax {
            line: line.line,
            column: line.column + offset,
            message: format!("invalid name `{t}`"),
        })
    }
}

/// Split `lhs = rhs` and return both sides plus the rhs offset.
pub(crate) fn split_assignment(line: &SourceLine) -> Result<(&str, &str, usize)> {
    match line.text.find('=') {
        Some(p) => Ok((&line.text[..p], &line.text[p + 1..], p + 1)),
        None => Err(Error::Syntax {
            line: line.line,
            column: line.column,
            message: "expected `name = ...`".into(),
        }),
    }
}

fn parse_name_list(rhs: &str, line: &SourceLine, offset: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for part in rhs.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push(name_token(part, line, pos + lead)?);
        pos += part.len() + 1;
    }
    Ok(out)
}

/// Parse the `A -> B` form of a structural edge line, returning the edge and
/// whatever follows the target (used by the generator spec for `= value`).
pub(crate) fn parse_edge_line(line: &SourceLine) -> Result<(Edge, Option<&str>)> {
    let Some(arrow) = line.text.find("->") else {
        return Err(Error::Syntax {
            line: line.line,
            column: line.column,
            message: "expected `Source -> Target`".into(),
        });
    };
    let src = name_token(&line.text[..arrow], line, 0)?;
    let rest = &line.text[arrow + 2..];
    let (tgt_text, tail) = match rest.find('=') {
        Some(p) => (&rest[..p], Some(&rest[p + 1..])),
        None => (rest, None),
    };
    if tgt_text.contains("->") {
        return Err(Error::Syntax {
            line: line.line,
            column: line.column + arrow + 2 + tgt_text.find("->").unwrap_or(0),
            message: "one edge per line".into(),
        });
    }
    let lead = tgt_text.len() - tgt_text.trim_start().len();
    let tgt = name_token(tgt_text, line, arrow + 2 + lead)?;
    Ok((Edge::new(src, tgt), tail))
}

const MODEL_SECTIONS: [&str; 5] = ["constructs", "second_order", "edges", "marker", "outcome"];

/// Build a spec from already-split sections. When `allow_extra` is set,
/// sections outside the model grammar are ignored (the generator spec
/// parses them itself).
pub fn model_spec_from_sections(sections: &[Section], allow_extra: bool) -> Result<ModelSpec> {
    let mut constructs = Vec::new();
    let mut second_order = Vec::new();
    let mut edges = Vec::new();
    let mut marker = None;
    let mut outcome = None;
    for s in sections {
        if !MODEL_SECTIONS.contains(&s.name.as_str()) {
            if allow_extra {
                continue;
            }
            return Err(Error::Syntax {
                line: s.line,
                column: 1,
                message: format!("unknown section `[{}]`", s.name),
            });
        }
        match s.name.as_str() {
            "constructs" => {
                for l in &s.lines {
                    let (lhs, rhs, off) = split_assignment(l)?;
                    constructs.push(Construct {
                        name: name_token(lhs, l, 0)?,
                        indicators: parse_name_list(rhs, l, off)?,
                    });
                }
            }
            "second_order" => {
                for l in &s.lines {
                    let (lhs, rhs, off) = split_assignment(l)?;
                    second_order.push(SecondOrder {
                        name: name_token(lhs, l, 0)?,
                        components: parse_name_list(rhs, l, off)?,
                    });
                }
            }
            "edges" => {
                for l in &s.lines {
                    let (edge, tail) = parse_edge_line(l)?;
                    if tail.is_some() {
                        return Err(Error::Syntax {
                            line: l.line,
                            column: l.column + l.text.find('=').unwrap_or(0),
                            message: "edge values belong in a generator spec".into(),
                        });
                    }
                    edges.push(edge);
                }
            }
            "marker" | "outcome" => {
                let slot = if s.name == "marker" {
                    &mut marker
                } else {
                    &mut outcome
                };
                match s.lines.as_slice() {
                    [l] => *slot = Some(name_token(&l.text, l, 0)?),
                    [] => {
                        return Err(Error::Syntax {
                            line: s.line,
                            column: 1,
                            message: format!("section `[{}]` is empty", s.name),
                        })
                    }
                    [_, extra, ..] => {
                        return Err(Error::Syntax {
                            line: extra.line,
                            column: extra.column,
                            message: format!("section `[{}]` takes one name", s.name),
                        })
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    ModelSpec::new(constructs, second_order, edges, marker, outcome)
}

/// Parse a model spec document.
pub fn parse_model_spec(text: &str) -> Result<ModelSpec> {
    model_spec_from_sections(&parse_sections(text)?, false)
}

/// Render a spec in canonical form; `parse_model_spec(&emit(s)) == s`.
pub fn emit_model_spec(spec: &ModelSpec) -> String {
    let mut out = format!("{SPEC_HEADER} {SPEC_VERSION}\n[constructs]\n");
    for c in &spec.constructs {
        let _ = writeln!(out, "{} = {}", c.name, c.indicators.join(", "));
    }
    if !spec.second_order.is_empty() {
        out.push_str("[second_order]\n");
        for s in &spec.second_order {
            let _ = writeln!(out, "{} = {}", s.name, s.components.join(", "));
        }
    }
    if !spec.edges.is_empty() {
        out.push_str("[edges]\n");
        for e in &spec.edges {
            let _ = writeln!(out, "{e}");
        }
    }
    if let Some(m) = &spec.marker {
        let _ = writeln!(out, "[marker]\n{m}");
    }
    let _ = writeln!(out, "[outcome]\n{}", spec.outcome);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const STUDY2: &str = "\
plsspec 1
[constructs]
EXP = EXP-1, EXP-2, EXP-3, EXP-4
TW = TW-1, TW-2, TW-3, TW-4
ATT = ATT-1, ATT-2, ATT-3, ATT-4
SIM = SIM-1, SIM-2, SIM-3
PSR = PSR-1, PSR-2, PSR-3, PSR-4, PSR-5
BE = BE-1, BE-2, BE-3, BE-4, BE-5, BE-6, BE-7, BE-8
I2P = I2P-1, I2P-2, I2P-3
[second_order]
SI = EXP, TW, ATT, SIM
[edges]
SI -> PSR
SI -> BE
SI -> I2P
PSR -> BE
PSR -> I2P
BE -> I2P
[outcome]
I2P
";

    #[test]
    fn parses_study_two_topology() {
        let spec = parse_model_spec(STUDY2).unwrap();
        assert_eq!(spec.edges().len(), 6);
        assert_eq!(spec.outcome(), "I2P");
        assert_eq!(spec.block_indicators("SI").len(), 15);
        assert_eq!(spec.exogenous(), vec!["SI"]);
        assert_eq!(spec.endogenous(), vec!["PSR", "BE", "I2P"]);
    }

    #[test]
    fn topological_order_respects_edges() {
        let spec = parse_model_spec(STUDY2).unwrap();
        let order = spec.topological_order();
        assert_eq!(order, vec!["SI", "PSR", "BE", "I2P"]);
    }

    #[test]
    fn missing_outcome_edge_is_reported() {
        let text = "plsspec 1\n[constructs]\nA = a1, a2\n";
        assert_eq!(
            parse_model_spec(text),
            Err(Error::OutcomeNoIncoming("A".into()))
        );
    }

    #[test]
    fn two_cycle_is_rejected() {
        let text = "plsspec 1\n[constructs]\nA = a1\nB = b1\n[edges]\nA -> B\nB -> A\n[outcome]\nB\n";
        assert!(matches!(parse_model_spec(text), Err(Error::Cycle(_))));
    }

    #[test]
    fn duplicate_indicator_is_named() {
        let text = "plsspec 1\n[constructs]\nA = a1, x\nB = x\n[edges]\nA -> B\n";
        assert_eq!(
            parse_model_spec(text),
            Err(Error::DuplicateIndicator {
                indicator: "x".into(),
                first: "A".into(),
                second: "B".into()
            })
        );
    }

    #[test]
    fn unknown_edge_endpoint() {
        let text = "plsspec 1\n[constructs]\nA = a1\n[edges]\nA -> Z\n";
        assert_eq!(
            parse_model_spec(text),
            Err(Error::UnknownConstruct("Z".into()))
        );
    }

    #[test]
    fn syntax_error_carries_position() {
        let text = "plsspec 1\n[constructs]\nA = a1, b c\n";
        match parse_model_spec(text) {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_header_is_a_syntax_error() {
        assert!(matches!(
            parse_model_spec("[constructs]\nA = a\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert_eq!(
            parse_model_spec("plsspec 2\n"),
            Err(Error::UnsupportedVersion("2".into()))
        );
    }

    #[test]
    fn marker_cannot_enter_structure() {
        let text = "plsspec 1\n[constructs]\nA = a1\nB = b1\nM = m1, m2\n[edges]\nA -> B\nM -> B\n[marker]\nM\n";
        assert_eq!(
            parse_model_spec(text),
            Err(Error::MarkerInStructure("M".into()))
        );
    }

    #[test]
    fn second_order_must_reference_first_order() {
        let text = "plsspec 1\n[constructs]\nA = a1\nB = b1\n[second_order]\nS = A, Q\n[edges]\nS -> B\n";
        assert!(matches!(
            parse_model_spec(text),
            Err(Error::InvalidSecondOrder { .. })
        ));
    }

    #[test]
    fn emit_then_parse_round_trips() {
        let spec = parse_model_spec(STUDY2).unwrap();
        assert_eq!(parse_model_spec(&emit_model_spec(&spec)).unwrap(), spec);
    }
}
