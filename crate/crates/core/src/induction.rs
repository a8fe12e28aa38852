//! DOMLEM rule induction.
//!
//! Rules are grown greedily one elementary condition at a time, choosing the
//! candidate whose cover is most precise with respect to the still uncovered
//! part of the target region. Once a rule's cover lies inside the target,
//! conditions that are no longer needed are dropped. After the covering loop,
//! rules whose objects are all covered by other rules are removed.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::dominance::{approximate, class_union_by_rank, IdSet, UnionKind};
use crate::error::{Error, Result};
use crate::eval::format_truncated;
use crate::table::{DecisionTable, Preference, Schema};

/// Name of the decision attribute in rendered rules.
pub const DECISION_NAME: &str = "Output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    AtMost,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementaryCondition {
    /// Index into the schema's attribute list.
    pub attribute: usize,
    pub relation: Relation,
    pub threshold: Decimal,
}

impl ElementaryCondition {
    pub fn holds(&self, values: &[Decimal]) -> bool {
        let v = values[self.attribute];
        match self.relation {
            Relation::AtLeast => v >= self.threshold,
            Relation::AtMost => v <= self.threshold,
        }
    }

    /// `self` admits no object that `other` rejects, on the same attribute and relation.
    fn at_least_as_strict_as(&self, other: &ElementaryCondition) -> bool {
        match self.relation {
            Relation::AtLeast => self.threshold >= other.threshold,
            Relation::AtMost => self.threshold <= other.threshold,
        }
    }
}

/// Conjunction of elementary conditions, at most one per attribute and relation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConditionSet(Vec<ElementaryCondition>);

impl ConditionSet {
    pub fn new() -> Self {
        ConditionSet(Vec::new())
    }

    /// Adds `e`, replacing a looser bound on the same attribute and relation.
    pub fn add(&mut self, e: ElementaryCondition) {
        match self
            .0
            .iter_mut()
            .find(|c| c.attribute == e.attribute && c.relation == e.relation)
        {
            Some(c) => {
                if e.at_least_as_strict_as(c) {
                    *c = e;
                }
            }
            None => self.0.push(e),
        }
    }

    pub fn with(&self, e: ElementaryCondition) -> Self {
        let mut out = self.clone();
        out.add(e);
        out
    }

    pub fn without(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.0.remove(index);
        out
    }

    pub fn conditions(&self) -> &[ElementaryCondition] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn matches(&self, values: &[Decimal]) -> bool {
        self.0.iter().all(|c| c.holds(values))
    }

    /// `[E]`: objects of the table satisfying every condition.
    pub fn cover(&self, table: &DecisionTable) -> IdSet {
        table
            .objects()
            .iter()
            .filter(|o| self.matches(&o.values))
            .map(|o| o.id)
            .collect()
    }
}

impl FromIterator<ElementaryCondition> for ConditionSet {
    fn from_iter<I: IntoIterator<Item = ElementaryCondition>>(iter: I) -> Self {
        let mut set = ConditionSet::new();
        for e in iter {
            set.add(e);
        }
        set
    }
}

/// Which relations candidate conditions may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Toward a downward union: at-most on gain, at-least on cost.
    Downward,
    /// Toward an upward union: at-least on gain, at-most on cost.
    Upward,
    /// Both relations on every attribute (approximate rules).
    Both,
}

impl Orientation {
    fn relations(self, preference: Preference) -> &'static [Relation] {
        use Relation::*;
        match (self, preference) {
            (Orientation::Downward, Preference::Gain) | (Orientation::Upward, Preference::Cost) => &[AtMost],
            (Orientation::Downward, Preference::Cost) | (Orientation::Upward, Preference::Gain) => &[AtLeast],
            (Orientation::Both, _) => &[AtLeast, AtMost],
        }
    }
}

impl From<UnionKind> for Orientation {
    fn from(kind: UnionKind) -> Self {
        match kind {
            UnionKind::Downward => Orientation::Downward,
            UnionKind::Upward => Orientation::Upward,
        }
    }
}

/// One candidate per attribute, relation and distinct value among the objects of `s`.
pub fn candidate_conditions(s: &IdSet, table: &DecisionTable, orientation: Orientation) -> Vec<ElementaryCondition> {
    let mut out = Vec::new();
    for (attribute, spec) in table.schema().attributes.iter().enumerate() {
        let values: BTreeSet<Decimal> = s
            .iter()
            .filter_map(|&id| table.get(id))
            .map(|o| o.values[attribute])
            .collect();
        for &relation in orientation.relations(spec.preference) {
            out.extend(values.iter().map(|&threshold| ElementaryCondition {
                attribute,
                relation,
                threshold,
            }));
        }
    }
    out
}

/// Evaluation of a grown conjunction: `hits / covered` with
/// `hits = |[E ∪ {e}] ∩ G|` and `covered = |[E ∪ {e}]|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Score {
    pub hits: usize,
    pub covered: usize,
}

impl Score {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.hits as u64, self.covered as u64)
    }

    /// Higher ratio first, then more hits.
    pub fn cmp_quality(&self, other: &Score) -> Ordering {
        let lhs = self.hits as u128 * other.covered as u128;
        let rhs = other.hits as u128 * self.covered as u128;
        lhs.cmp(&rhs).then(self.hits.cmp(&other.hits))
    }
}

pub fn evaluate_candidate(
    conditions: &ConditionSet,
    e: &ElementaryCondition,
    uncovered: &IdSet,
    table: &DecisionTable,
) -> Result<Score> {
    let cover = conditions.with(*e).cover(table);
    score_cover(&cover, uncovered)
}

fn score_cover(cover: &IdSet, uncovered: &IdSet) -> Result<Score> {
    if cover.is_empty() {
        return Err(Error::DivisionUndefined);
    }
    Ok(Score {
        hits: cover.intersection(uncovered).count(),
        covered: cover.len(),
    })
}

/// Tie-breaking for equally scored candidates: lower attribute index, then
/// at-least before at-most, then the stricter threshold.
fn prefer_on_tie(a: &ElementaryCondition, b: &ElementaryCondition) -> Ordering {
    b.attribute
        .cmp(&a.attribute)
        .then(b.relation.cmp(&a.relation))
        .then_with(|| match a.relation {
            Relation::AtLeast => a.threshold.cmp(&b.threshold),
            Relation::AtMost => b.threshold.cmp(&a.threshold),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Certain,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conclusion {
    /// At least / at most the given class rank.
    Union { kind: UnionKind, class: usize },
    /// One of the listed class ranks.
    Disjunction(Vec<usize>),
}

/// `covered / target`, the fraction of the target region covered by a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub covered: usize,
    pub target: usize,
}

impl Support {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.covered as u64, self.target as u64)
    }

    /// Percentage truncated to two decimals.
    pub fn percent(&self) -> String {
        format_truncated(self.ratio() * Ratio::from_integer(100))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionRule {
    pub kind: RuleKind,
    pub conditions: ConditionSet,
    pub conclusion: Conclusion,
    /// Objects of the training table matched by the conditions.
    pub covered: IdSet,
    pub support: Support,
}

impl DecisionRule {
    pub fn matches(&self, values: &[Decimal]) -> bool {
        self.conditions.matches(values)
    }
}

pub fn rule_support(rule: &DecisionRule, target: &IdSet) -> Result<Support> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    Ok(Support {
        covered: rule.covered.intersection(target).count(),
        target: target.len(),
    })
}

/// Induces a rule set whose covers lie inside `target` and jointly cover it.
pub fn domlem(
    table: &DecisionTable,
    target: &IdSet,
    orientation: Orientation,
    kind: RuleKind,
    conclusion: Conclusion,
) -> Result<Vec<DecisionRule>> {
    if target.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(&id) = target.iter().find(|&&id| table.get(id).is_none()) {
        return Err(Error::UnknownId(id));
    }
    let mut uncovered = target.clone();
    let mut found: Vec<(ConditionSet, IdSet)> = Vec::new();

    while !uncovered.is_empty() {
        let mut conditions = ConditionSet::new();
        let mut cover: IdSet = table.ids().collect();
        while !cover.is_subset(target) {
            let matching: IdSet = cover.intersection(&uncovered).copied().collect();
            let mut best: Option<(ElementaryCondition, Score, IdSet)> = None;
            for e in candidate_conditions(&matching, table, orientation) {
                let grown: IdSet = cover
                    .iter()
                    .copied()
                    .filter(|&id| e.holds(&table.get(id).expect("id from table").values))
                    .collect();
                if grown.len() == cover.len() {
                    continue;
                }
                let score = score_cover(&grown, &uncovered)?;
                let better = match &best {
                    None => true,
                    Some((b, bs, _)) => match score.cmp_quality(bs) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => prefer_on_tie(&e, b) == Ordering::Greater,
                    },
                };
                if better {
                    best = Some((e, score, grown));
                }
            }
            let Some((e, _, grown)) = best else {
                return Err(Error::Uncoverable(matching.into_iter().collect()));
            };
            conditions.add(e);
            cover = grown;
        }

        let mut i = 0;
        while i < conditions.len() {
            let reduced = conditions.without(i);
            if reduced.cover(table).is_subset(target) {
                conditions = reduced;
            } else {
                i += 1;
            }
        }
        let cover = conditions.cover(table);
        for id in &cover {
            uncovered.remove(id);
        }
        found.push((conditions, cover));
    }

    let mut i = 0;
    while i < found.len() {
        let others: IdSet = found
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, (_, c))| c.iter().copied())
            .collect();
        if target.is_subset(&others) {
            found.remove(i);
        } else {
            i += 1;
        }
    }

    Ok(found
        .into_iter()
        .map(|(conditions, covered)| {
            let support = Support {
                covered: covered.intersection(target).count(),
                target: target.len(),
            };
            DecisionRule {
                kind,
                conditions,
                conclusion: conclusion.clone(),
                covered,
                support,
            }
        })
        .collect())
}

/// Ordered rules followed by an implicit default rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleBase {
    pub attributes: Vec<String>,
    pub classes: Vec<String>,
    pub rules: Vec<DecisionRule>,
    pub default_class: usize,
}

impl RuleBase {
    pub fn certain(&self) -> impl Iterator<Item = &DecisionRule> {
        self.rules.iter().filter(|r| r.kind == RuleKind::Certain)
    }

    pub fn approximate(&self) -> impl Iterator<Item = &DecisionRule> {
        self.rules.iter().filter(|r| r.kind == RuleKind::Approximate)
    }

    /// Number of rules including the default rule.
    pub fn len_with_default(&self) -> usize {
        self.rules.len() + 1
    }

    /// 1-based index of the default rule.
    pub fn default_index(&self) -> usize {
        self.rules.len() + 1
    }

    /// Fails unless the attribute names and class tokens agree with `schema`.
    pub fn check_schema(&self, schema: &Schema) -> Result<()> {
        if self.attributes != schema.attribute_names() {
            return Err(Error::SchemaMismatch(format!(
                "rules use attributes [{}], schema has [{}]",
                self.attributes.join(", "),
                schema.attribute_names().join(", ")
            )));
        }
        let tokens: Vec<String> = schema.classes.labels().iter().map(|c| c.token.clone()).collect();
        if self.classes != tokens {
            return Err(Error::SchemaMismatch(format!(
                "rules use classes [{}], schema has [{}]",
                self.classes.join(", "),
                tokens.join(", ")
            )));
        }
        Ok(())
    }

    fn conclusion_text(&self, conclusion: &Conclusion) -> String {
        let worst = 0;
        let best = self.classes.len() - 1;
        match conclusion {
            Conclusion::Union { kind, class } => {
                let token = &self.classes[*class];
                match kind {
                    UnionKind::Downward if *class == worst => format!("({DECISION_NAME}={token})"),
                    UnionKind::Upward if *class == best => format!("({DECISION_NAME}={token})"),
                    UnionKind::Downward => format!("({DECISION_NAME}<={token})"),
                    UnionKind::Upward => format!("({DECISION_NAME}>={token})"),
                }
            }
            Conclusion::Disjunction(classes) => {
                let names: Vec<&str> = classes.iter().map(|&c| self.classes[c].as_str()).collect();
                format!("({DECISION_NAME}={})", names.join(" or "))
            }
        }
    }

    fn conditions_text(&self, conditions: &ConditionSet) -> String {
        if conditions.is_empty() {
            return "(true)".to_string();
        }
        let mut order: Vec<usize> = Vec::new();
        for c in conditions.conditions() {
            if !order.contains(&c.attribute) {
                order.push(c.attribute);
            }
        }
        let mut parts = Vec::new();
        for attribute in order {
            let name = &self.attributes[attribute];
            let bounds: Vec<&ElementaryCondition> = conditions
                .conditions()
                .iter()
                .filter(|c| c.attribute == attribute)
                .collect();
            if bounds.len() == 2 && bounds[0].threshold == bounds[1].threshold {
                parts.push(format!("({name}={})", bounds[0].threshold.to_string_min(2)));
            } else {
                for b in bounds {
                    parts.push(format!("({name}{}{})", b.relation.symbol(), b.threshold.to_string_min(2)));
                }
            }
        }
        parts.join(" & ")
    }

    /// One line per rule in the layout `Rule k.<TAB>If ... Then ...<TAB>support`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, rule) in self.rules.iter().enumerate() {
            let _ = writeln!(
                out,
                "Rule {}.\tIf {} Then {}\t{}%",
                i + 1,
                self.conditions_text(&rule.conditions),
                self.conclusion_text(&rule.conclusion),
                rule.support.percent()
            );
        }
        let _ = writeln!(
            out,
            "Rule {}.\tElse ({DECISION_NAME}={})\t100.00%",
            self.default_index(),
            self.classes[self.default_class]
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RuleBaseFile::from_rulebase(self)).expect("rule base serializes")
    }

    /// Loads a machine-format rule base and checks it against `schema`.
    pub fn from_json(text: &str, schema: &Schema) -> Result<Self> {
        let file: RuleBaseFile = serde_json::from_str(text).map_err(|e| Error::RuleFile(e.to_string()))?;
        let rb = file.into_rulebase()?;
        rb.check_schema(schema)?;
        Ok(rb)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ConditionEntry {
    attribute: String,
    relation: Relation,
    threshold: Decimal,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ConclusionEntry {
    Union { kind: UnionKind, class: String },
    Disjunction(Vec<String>),
}

#[derive(Debug, Serialize, Deserialize)]
struct SupportEntry {
    covered: usize,
    target: usize,
    percent: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RuleEntry {
    index: usize,
    kind: RuleKind,
    conditions: Vec<ConditionEntry>,
    conclusion: ConclusionEntry,
    support: SupportEntry,
    covered: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RuleBaseFile {
    attributes: Vec<String>,
    classes: Vec<String>,
    default_class: String,
    rules: Vec<RuleEntry>,
}

impl RuleBaseFile {
    fn from_rulebase(rb: &RuleBase) -> Self {
        let rules = rb
            .rules
            .iter()
            .enumerate()
            .map(|(i, r)| RuleEntry {
                index: i + 1,
                kind: r.kind,
                conditions: r
                    .conditions
                    .conditions()
                    .iter()
                    .map(|c| ConditionEntry {
                        attribute: rb.attributes[c.attribute].clone(),
                        relation: c.relation,
                        threshold: c.threshold,
                    })
                    .collect(),
                conclusion: match &r.conclusion {
                    Conclusion::Union { kind, class } => ConclusionEntry::Union {
                        kind: *kind,
                        class: rb.classes[*class].clone(),
                    },
                    Conclusion::Disjunction(cs) => {
                        ConclusionEntry::Disjunction(cs.iter().map(|&c| rb.classes[c].clone()).collect())
                    }
                },
                support: SupportEntry {
                    covered: r.support.covered,
                    target: r.support.target,
                    percent: r.support.percent(),
                },
                covered: r.covered.iter().copied().collect(),
            })
            .collect();
        RuleBaseFile {
            attributes: rb.attributes.clone(),
            classes: rb.classes.clone(),
            default_class: rb.classes[rb.default_class].clone(),
            rules,
        }
    }

    fn into_rulebase(self) -> Result<RuleBase> {
        let class_rank = |token: &str| {
            self.classes
                .iter()
                .position(|c| c == token)
                .ok_or_else(|| Error::UnknownClass(token.to_string()))
        };
        let mut rules = Vec::with_capacity(self.rules.len());
        for entry in &self.rules {
            let mut conditions = ConditionSet::new();
            for c in &entry.conditions {
                let attribute = self
                    .attributes
                    .iter()
                    .position(|a| *a == c.attribute)
                    .ok_or_else(|| Error::RuleFile(format!("unknown attribute {:?}", c.attribute)))?;
                conditions.add(ElementaryCondition {
                    attribute,
                    relation: c.relation,
                    threshold: c.threshold,
                });
            }
            let conclusion = match &entry.conclusion {
                ConclusionEntry::Union { kind, class } => Conclusion::Union {
                    kind: *kind,
                    class: class_rank(class)?,
                },
                ConclusionEntry::Disjunction(cs) => {
                    Conclusion::Disjunction(cs.iter().map(|c| class_rank(c)).collect::<Result<_>>()?)
                }
            };
            rules.push(DecisionRule {
                kind: entry.kind,
                conditions,
                conclusion,
                covered: entry.covered.iter().copied().collect(),
                support: Support {
                    covered: entry.support.covered,
                    target: entry.support.target,
                },
            });
        }
        if self.classes.len() < 2 {
            return Err(Error::RuleFile("at least two classes are required".into()));
        }
        Ok(RuleBase {
            default_class: class_rank(&self.default_class)?,
            attributes: self.attributes,
            classes: self.classes,
            rules,
        })
    }
}

/// Certain rules for the downward union of `target`, then (optionally)
/// approximate rules for its boundary, then the default class.
pub fn build_rulebase(
    table: &DecisionTable,
    target: &str,
    default: &str,
    with_approximate: bool,
) -> Result<RuleBase> {
    let schema = table.schema();
    let target = schema.classes.rank_of(target)?;
    let default_class = schema.classes.rank_of(default)?;
    let union = class_union_by_rank(table, target, UnionKind::Downward)?;
    let approx = approximate(table, &union);

    let mut rules = domlem(
        table,
        &approx.lower,
        Orientation::Downward,
        RuleKind::Certain,
        Conclusion::Union {
            kind: UnionKind::Downward,
            class: target,
        },
    )?;
    if with_approximate && !approx.boundary.is_empty() {
        let labels: BTreeSet<usize> = approx
            .boundary
            .iter()
            .map(|&id| table.get(id).expect("id from table").label)
            .collect();
        let lo = *labels.first().expect("non-empty boundary");
        let hi = *labels.last().expect("non-empty boundary");
        rules.extend(domlem(
            table,
            &approx.boundary,
            Orientation::Both,
            RuleKind::Approximate,
            Conclusion::Disjunction((lo..=hi).collect()),
        )?);
    }
    Ok(RuleBase {
        attributes: schema.attribute_names(),
        classes: schema.classes.labels().iter().map(|c| c.token.clone()).collect(),
        rules,
        default_class,
    })
}
