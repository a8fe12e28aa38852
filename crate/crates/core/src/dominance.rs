//! Dominance relation, dominance cones, class unions and rough approximations.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::table::{DecisionTable, ObjectRecord, Preference, Schema};

/// Set of 1-based object ids.
pub type IdSet = BTreeSet<usize>;

/// `x` is at least as good as `y` on every criterion. Arity is not checked.
pub fn dominates_values(schema: &Schema, x: &[Decimal], y: &[Decimal]) -> bool {
    schema
        .attributes
        .iter()
        .zip(x.iter().zip(y))
        .all(|(a, (vx, vy))| match a.preference {
            Preference::Gain => vx >= vy,
            Preference::Cost => vx <= vy,
        })
}

pub fn dominates(x: &ObjectRecord, y: &ObjectRecord, schema: &Schema) -> Result<bool> {
    let n = schema.arity();
    if x.values.len() != n || y.values.len() != n {
        return Err(Error::SchemaMismatch(format!(
            "expected {n} values, got {} and {}",
            x.values.len(),
            y.values.len()
        )));
    }
    Ok(dominates_values(schema, &x.values, &y.values))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceCone {
    pub origin: usize,
    /// Objects dominating the origin.
    pub positive: IdSet,
    /// Objects dominated by the origin.
    pub negative: IdSet,
}

pub fn dominance_cone(table: &DecisionTable, id: usize) -> Result<DominanceCone> {
    let x = table.get(id).ok_or(Error::UnknownId(id))?;
    let schema = table.schema();
    let mut positive = IdSet::new();
    let mut negative = IdSet::new();
    for y in table.objects() {
        if dominates_values(schema, &y.values, &x.values) {
            positive.insert(y.id);
        }
        if dominates_values(schema, &x.values, &y.values) {
            negative.insert(y.id);
        }
    }
    Ok(DominanceCone {
        origin: id,
        positive,
        negative,
    })
}

/// Cones of every object, indexed by `id - 1`.
pub fn all_cones(table: &DecisionTable) -> Vec<DominanceCone> {
    table
        .ids()
        .map(|id| dominance_cone(table, id).expect("id from table"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnionKind {
    /// Class `t` and every better class.
    Upward,
    /// Class `t` and every worse class.
    Downward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassUnion {
    pub kind: UnionKind,
    /// Threshold class rank.
    pub class: usize,
    pub members: IdSet,
}

pub fn class_union_by_rank(table: &DecisionTable, class: usize, kind: UnionKind) -> Result<ClassUnion> {
    if class >= table.schema().classes.len() {
        return Err(Error::UnknownClass(class.to_string()));
    }
    let members = table
        .objects()
        .iter()
        .filter(|o| match kind {
            UnionKind::Upward => o.label >= class,
            UnionKind::Downward => o.label <= class,
        })
        .map(|o| o.id)
        .collect();
    Ok(ClassUnion {
        kind,
        class,
        members,
    })
}

pub fn class_union(table: &DecisionTable, class: &str, kind: UnionKind) -> Result<ClassUnion> {
    let rank = table.schema().classes.rank_of(class)?;
    class_union_by_rank(table, rank, kind)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoughApproximation {
    pub union: ClassUnion,
    pub lower: IdSet,
    pub upper: IdSet,
    pub boundary: IdSet,
}

/// Lower and upper approximation of a union.
///
/// Downward union `U`: lower = {x : D-(x) ⊆ U}, upper = {x : D+(x) ∩ U ≠ ∅}.
/// Upward unions use the cones the other way round.
pub fn approximate(table: &DecisionTable, union: &ClassUnion) -> RoughApproximation {
    approximate_with_cones(&all_cones(table), union)
}

pub fn approximate_with_cones(cones: &[DominanceCone], union: &ClassUnion) -> RoughApproximation {
    let mut lower = IdSet::new();
    let mut upper = IdSet::new();
    for cone in cones {
        let (inner, outer) = match union.kind {
            UnionKind::Downward => (&cone.negative, &cone.positive),
            UnionKind::Upward => (&cone.positive, &cone.negative),
        };
        if inner.is_subset(&union.members) {
            lower.insert(cone.origin);
        }
        if !outer.is_disjoint(&union.members) {
            upper.insert(cone.origin);
        }
    }
    let boundary = upper.difference(&lower).copied().collect();
    RoughApproximation {
        union: union.clone(),
        lower,
        upper,
        boundary,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    IdenticalVector,
    StrictDominance,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::IdenticalVector => "identical-vector",
            WitnessKind::StrictDominance => "strict-dominance",
        }
    }
}

/// `dominating` is at least as good as `dominated` everywhere yet carries a
/// strictly worse class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InconsistentPair {
    pub dominating: usize,
    pub dominated: usize,
    pub kind: WitnessKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct InconsistencyReport {
    pub pairs: Vec<InconsistentPair>,
}

impl InconsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn render_text(&self, table: &DecisionTable) -> String {
        let schema = table.schema();
        if self.pairs.is_empty() {
            return "no inconsistencies\n".to_string();
        }
        let mut out = format!("{} inconsistent pair(s)\n", self.pairs.len());
        for p in &self.pairs {
            let x = table.get(p.dominating).expect("report ids come from table");
            let y = table.get(p.dominated).expect("report ids come from table");
            let _ = writeln!(
                out,
                "object {} (class {}) dominates object {} (class {}) [{}]",
                x.id,
                schema.classes.token(x.label),
                y.id,
                schema.classes.token(y.label),
                p.kind.as_str()
            );
            for o in [x, y] {
                let echo: Vec<String> = schema
                    .attributes
                    .iter()
                    .zip(&o.values)
                    .map(|(a, v)| format!("{}={v}", a.name))
                    .collect();
                let _ = writeln!(out, "  {}: {}", o.id, echo.join(" "));
            }
        }
        out
    }

    pub fn render_json(&self, table: &DecisionTable) -> String {
        #[derive(Serialize)]
        struct Entry<'a> {
            dominating: usize,
            dominated: usize,
            kind: WitnessKind,
            dominating_class: &'a str,
            dominated_class: &'a str,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            consistent: bool,
            objects: usize,
            pairs: Vec<Entry<'a>>,
        }
        let classes = &table.schema().classes;
        let label = |id: usize| classes.token(table.get(id).expect("id from table").label);
        let doc = Doc {
            consistent: self.is_consistent(),
            objects: table.len(),
            pairs: self
                .pairs
                .iter()
                .map(|p| Entry {
                    dominating: p.dominating,
                    dominated: p.dominated,
                    kind: p.kind,
                    dominating_class: label(p.dominating),
                    dominated_class: label(p.dominated),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

/// All ordered pairs violating the monotonicity requirement.
pub fn find_inconsistencies(table: &DecisionTable) -> InconsistencyReport {
    let schema = table.schema();
    let mut pairs = Vec::new();
    for x in table.objects() {
        for y in table.objects() {
            if x.label < y.label && dominates_values(schema, &x.values, &y.values) {
                let kind = if x.values == y.values {
                    WitnessKind::IdenticalVector
                } else {
                    WitnessKind::StrictDominance
                };
                pairs.push(InconsistentPair {
                    dominating: x.id,
                    dominated: y.id,
                    kind,
                });
            }
        }
    }
    InconsistencyReport { pairs }
}
