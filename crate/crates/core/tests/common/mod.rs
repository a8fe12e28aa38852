//! Random decision tables and brute-force oracles shared by the property
//! suite and the acceptance run. The oracles recompute dominance and
//! approximations straight from their definitions and never call into the
//! library's dominance module.

#![allow(dead_code)]

use std::collections::BTreeSet;

use drsa::decimal::Decimal;
use drsa::dominance::{
    all_cones, approximate, class_union_by_rank, dominance_cone, dominates_values, find_inconsistencies, IdSet,
    UnionKind,
};
use drsa::induction::{
    build_rulebase, domlem, Conclusion, ConditionSet, ElementaryCondition, Orientation, Relation, RuleKind,
};
use drsa::classify::{classify, Outcome};
use drsa::table::{AttributeSpec, ClassLabel, ClassOrder, DecisionTable, ObjectRecord, Preference, Schema};

/// Grid of attribute values used by random tables; small so ties are common.
pub const GRID: [i64; 5] = [0, 2500, 5000, 7500, 10_000];

#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub preferences: Vec<Preference>,
    pub classes: usize,
    /// (grid indices per attribute, class rank)
    pub rows: Vec<(Vec<usize>, usize)>,
}

pub fn make_table(spec: &RandomSpec) -> DecisionTable {
    let attributes = spec
        .preferences
        .iter()
        .enumerate()
        .map(|(i, p)| AttributeSpec::numeric(&format!("q{}", i + 1), 0, 1, 4, *p))
        .collect();
    let classes = ClassOrder::new(
        (0..spec.classes)
            .map(|c| ClassLabel {
                token: format!("C{c}"),
                name: String::new(),
            })
            .collect(),
    )
    .unwrap();
    let schema = Schema::new("random", attributes, classes).unwrap();
    let objects = spec
        .rows
        .iter()
        .enumerate()
        .map(|(i, (vals, label))| ObjectRecord {
            id: i + 1,
            values: vals.iter().map(|&g| Decimal::from_scaled(GRID[g])).collect(),
            label: *label,
        })
        .collect();
    DecisionTable::new(schema, objects).unwrap()
}

/// Draws a table with up to `max_objects` objects, 1..=3 attributes and 2..=3 classes.
pub fn random_spec<R: rand::Rng>(rng: &mut R, max_objects: usize) -> RandomSpec {
    let attrs = rng.gen_range(1..=3);
    let classes = rng.gen_range(2..=3);
    let n = rng.gen_range(1..=max_objects);
    let preferences = (0..attrs)
        .map(|_| if rng.gen_bool(0.5) { Preference::Gain } else { Preference::Cost })
        .collect();
    let rows = (0..n)
        .map(|_| {
            let vals = (0..attrs).map(|_| rng.gen_range(0..GRID.len())).collect();
            (vals, rng.gen_range(0..classes))
        })
        .collect();
    RandomSpec {
        preferences,
        classes,
        rows,
    }
}

// ---- oracles ----

fn oracle_dominates(schema: &Schema, x: &[Decimal], y: &[Decimal]) -> bool {
    for (i, a) in schema.attributes.iter().enumerate() {
        let ok = match a.preference {
            Preference::Gain => x[i].scaled() >= y[i].scaled(),
            Preference::Cost => x[i].scaled() <= y[i].scaled(),
        };
        if !ok {
            return false;
        }
    }
    true
}

fn oracle_union(table: &DecisionTable, class: usize, kind: UnionKind) -> IdSet {
    let mut out = IdSet::new();
    for o in table.objects() {
        let inside = match kind {
            UnionKind::Downward => o.label <= class,
            UnionKind::Upward => o.label >= class,
        };
        if inside {
            out.insert(o.id);
        }
    }
    out
}

/// (lower, upper) by the pairwise definition.
pub fn oracle_approximation(table: &DecisionTable, class: usize, kind: UnionKind) -> (IdSet, IdSet) {
    let schema = table.schema();
    let members = oracle_union(table, class, kind);
    let mut lower = IdSet::new();
    let mut upper = IdSet::new();
    for x in table.objects() {
        let mut all_inside = true;
        let mut any_inside = false;
        for y in table.objects() {
            // cone that must stay inside vs cone that must touch the union
            let (inner, outer) = match kind {
                UnionKind::Downward => (
                    oracle_dominates(schema, &x.values, &y.values),
                    oracle_dominates(schema, &y.values, &x.values),
                ),
                UnionKind::Upward => (
                    oracle_dominates(schema, &y.values, &x.values),
                    oracle_dominates(schema, &x.values, &y.values),
                ),
            };
            if inner && !members.contains(&y.id) {
                all_inside = false;
            }
            if outer && members.contains(&y.id) {
                any_inside = true;
            }
        }
        if all_inside {
            lower.insert(x.id);
        }
        if any_inside {
            upper.insert(x.id);
        }
    }
    (lower, upper)
}

/// Every conjunction of at most one threshold per attribute and relation
/// (thresholds drawn from table values) that stays inside `target`; returns
/// the union of their covers and whether at most one condition covers
/// `target` exactly.
pub fn oracle_coverable(table: &DecisionTable, target: &IdSet, orientation: Orientation) -> (IdSet, bool) {
    let schema = table.schema();
    let mut options_per_attr: Vec<Vec<Option<(Relation, Decimal)>>> = Vec::new();
    for (i, a) in schema.attributes.iter().enumerate() {
        let values: BTreeSet<Decimal> = table.objects().iter().map(|o| o.values[i]).collect();
        let relations: Vec<Relation> = match (orientation, a.preference) {
            (Orientation::Downward, Preference::Gain) | (Orientation::Upward, Preference::Cost) => {
                vec![Relation::AtMost]
            }
            (Orientation::Downward, Preference::Cost) | (Orientation::Upward, Preference::Gain) => {
                vec![Relation::AtLeast]
            }
            (Orientation::Both, _) => vec![Relation::AtLeast, Relation::AtMost],
        };
        for r in relations {
            let mut opts = vec![None];
            opts.extend(values.iter().map(|v| Some((r, *v))));
            options_per_attr.push(opts);
        }
    }
    let mut attr_of_slot = Vec::new();
    for (i, a) in schema.attributes.iter().enumerate() {
        let k = if orientation == Orientation::Both { 2 } else { 1 };
        let _ = a;
        for _ in 0..k {
            attr_of_slot.push(i);
        }
    }
    let holds = |values: &[Decimal], slot: usize, cond: (Relation, Decimal)| {
        let v = values[attr_of_slot[slot]];
        match cond.0 {
            Relation::AtLeast => v >= cond.1,
            Relation::AtMost => v <= cond.1,
        }
    };
    let mut coverable = IdSet::new();
    let mut single = false;
    let mut idx = vec![0usize; options_per_attr.len()];
    loop {
        let chosen: Vec<(usize, (Relation, Decimal))> = idx
            .iter()
            .enumerate()
            .filter_map(|(slot, &k)| options_per_attr[slot][k].map(|c| (slot, c)))
            .collect();
        let cover: IdSet = table
            .objects()
            .iter()
            .filter(|o| chosen.iter().all(|&(slot, c)| holds(&o.values, slot, c)))
            .map(|o| o.id)
            .collect();
        if !cover.is_empty() && cover.is_subset(target) {
            coverable.extend(cover.iter().copied());
            if chosen.len() <= 1 && &cover == target {
                single = true;
            }
        }
        // odometer increment
        let mut slot = 0;
        loop {
            if slot == idx.len() {
                return (coverable, single);
            }
            idx[slot] += 1;
            if idx[slot] < options_per_attr[slot].len() {
                break;
            }
            idx[slot] = 0;
            slot += 1;
        }
    }
}

fn cover_of(conditions: &ConditionSet, table: &DecisionTable) -> IdSet {
    table
        .objects()
        .iter()
        .filter(|o| conditions.conditions().iter().all(|c: &ElementaryCondition| c.holds(&o.values)))
        .map(|o| o.id)
        .collect()
}

fn check_rule_set(
    table: &DecisionTable,
    target: &IdSet,
    orientation: Orientation,
    kind: RuleKind,
    conclusion: Conclusion,
    what: &str,
) -> Result<(), String> {
    let rules = domlem(table, target, orientation, kind, conclusion.clone()).map_err(|e| format!("{what}: {e}"))?;
    let again = domlem(table, target, orientation, kind, conclusion).unwrap();
    if rules != again {
        return Err(format!("{what}: induction is not deterministic"));
    }
    let covers: Vec<IdSet> = rules.iter().map(|r| cover_of(&r.conditions, table)).collect();
    let mut covered = IdSet::new();
    for (r, c) in rules.iter().zip(&covers) {
        if !c.is_subset(target) {
            return Err(format!("{what}: unsound rule {:?} covers {c:?}", r.conditions));
        }
        if *c != r.covered {
            return Err(format!("{what}: recorded cover differs"));
        }
        for i in 0..r.conditions.len() {
            if cover_of(&r.conditions.without(i), table).is_subset(target) {
                return Err(format!("{what}: condition {i} of {:?} is redundant", r.conditions));
            }
        }
        covered.extend(c.iter().copied());
    }
    if &covered != target {
        return Err(format!("{what}: rules cover {covered:?}, target {target:?}"));
    }
    for skip in 0..covers.len() {
        let others: IdSet = covers
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        if target.is_subset(&others) {
            return Err(format!("{what}: rule {} is redundant", skip + 1));
        }
    }
    let (coverable, single) = oracle_coverable(table, target, orientation);
    if coverable != covered {
        return Err(format!("{what}: oracle coverable {coverable:?} vs greedy {covered:?}"));
    }
    if single && !target.is_empty() && (rules.len() != 1 || rules[0].conditions.len() > 1) {
        return Err(format!("{what}: a single condition covers the target but greedy emitted {rules:?}"));
    }
    Ok(())
}

/// Runs every table-level law; returns the first violation.
pub fn check_all(table: &DecisionTable) -> Result<(), String> {
    let schema = table.schema();
    let objects = table.objects();
    let k = schema.classes.len();
    let everything: IdSet = table.ids().collect();

    // dominance: reflexive and transitive, agrees with the oracle
    for x in objects {
        if !dominates_values(schema, &x.values, &x.values) {
            return Err(format!("dominance not reflexive on {}", x.id));
        }
        for y in objects {
            let xy = dominates_values(schema, &x.values, &y.values);
            if xy != oracle_dominates(schema, &x.values, &y.values) {
                return Err(format!("dominance disagrees with oracle on ({}, {})", x.id, y.id));
            }
            if !xy {
                continue;
            }
            for z in objects {
                if dominates_values(schema, &y.values, &z.values) && !dominates_values(schema, &x.values, &z.values) {
                    return Err(format!("dominance not transitive on ({}, {}, {})", x.id, y.id, z.id));
                }
            }
        }
    }
    for cone in all_cones(table) {
        if !cone.positive.contains(&cone.origin) || !cone.negative.contains(&cone.origin) {
            return Err(format!("cone of {} not reflexive", cone.origin));
        }
        if dominance_cone(table, cone.origin).unwrap() != cone {
            return Err("cone recomputation differs".into());
        }
    }

    // unions: nesting and extremes
    for t in 0..k {
        for u in t..k {
            let dt = class_union_by_rank(table, t, UnionKind::Downward).unwrap().members;
            let du = class_union_by_rank(table, u, UnionKind::Downward).unwrap().members;
            let ut = class_union_by_rank(table, t, UnionKind::Upward).unwrap().members;
            let uu = class_union_by_rank(table, u, UnionKind::Upward).unwrap().members;
            if !dt.is_subset(&du) || !uu.is_subset(&ut) {
                return Err(format!("unions not nested for classes {t} <= {u}"));
            }
        }
    }
    if class_union_by_rank(table, 0, UnionKind::Upward).unwrap().members != everything
        || class_union_by_rank(table, k - 1, UnionKind::Downward).unwrap().members != everything
    {
        return Err("extreme unions are not the whole table".into());
    }

    // approximations: oracle equivalence, rough inclusion, complementarity
    let mut any_boundary = false;
    for t in 0..k {
        for kind in [UnionKind::Downward, UnionKind::Upward] {
            let union = class_union_by_rank(table, t, kind).unwrap();
            let a = approximate(table, &union);
            let (lo, up) = oracle_approximation(table, t, kind);
            if a.lower != lo || a.upper != up {
                return Err(format!("approximation of {kind:?}({t}) differs from oracle"));
            }
            if !a.lower.is_subset(&union.members) || !union.members.is_subset(&a.upper) {
                return Err(format!("rough inclusion fails for {kind:?}({t})"));
            }
            if a.boundary != a.upper.difference(&a.lower).copied().collect() {
                return Err("boundary is not upper minus lower".into());
            }
            any_boundary |= !a.boundary.is_empty();
        }
        if t >= 1 {
            let up = approximate(table, &class_union_by_rank(table, t, UnionKind::Upward).unwrap());
            let down = approximate(table, &class_union_by_rank(table, t - 1, UnionKind::Downward).unwrap());
            let not_upper_down: IdSet = everything.difference(&down.upper).copied().collect();
            let not_upper_up: IdSet = everything.difference(&up.upper).copied().collect();
            if up.lower != not_upper_down || down.lower != not_upper_up {
                return Err(format!("complementarity fails at class {t}"));
            }
        }
    }
    let consistent = find_inconsistencies(table).is_consistent();
    if consistent == any_boundary {
        return Err(format!("inconsistency report (consistent={consistent}) disagrees with boundaries"));
    }

    // induction on every non-trivial union, certain and approximate
    for t in 0..k {
        for kind in [UnionKind::Downward, UnionKind::Upward] {
            let union = class_union_by_rank(table, t, kind).unwrap();
            let a = approximate(table, &union);
            check_rule_set(
                table,
                &a.lower,
                kind.into(),
                RuleKind::Certain,
                Conclusion::Union { kind, class: t },
                &format!("certain {kind:?}({t})"),
            )?;
            check_rule_set(
                table,
                &a.boundary,
                Orientation::Both,
                RuleKind::Approximate,
                Conclusion::Disjunction((0..k).collect()),
                &format!("approximate {kind:?}({t})"),
            )?;
        }
    }

    // classifier: monotone on definite predictions, certain rules stay in the union
    let worst = schema.classes.token(0).to_string();
    let best = schema.classes.token(k - 1).to_string();
    let rb = build_rulebase(table, &worst, &best, true).map_err(|e| e.to_string())?;
    let target_union = class_union_by_rank(table, 0, UnionKind::Downward).unwrap().members;
    for r in rb.certain() {
        if !r.covered.is_subset(&target_union) {
            return Err("certain rule fires outside the target union".into());
        }
    }
    let mut points: Vec<Vec<Decimal>> = objects.iter().map(|o| o.values.clone()).collect();
    let m = schema.arity();
    let mut idx = vec![0usize; m];
    'grid: loop {
        points.push(idx.iter().map(|&g| Decimal::from_scaled(GRID[g])).collect());
        let mut i = 0;
        loop {
            if i == m {
                break 'grid;
            }
            idx[i] += 1;
            if idx[i] < GRID.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
    let preds: Vec<_> = points
        .iter()
        .enumerate()
        .map(|(i, p)| classify(&rb, i + 1, p).unwrap())
        .collect();
    for (a, pa) in points.iter().zip(&preds) {
        for (b, pb) in points.iter().zip(&preds) {
            if let (Outcome::Class(ca), Outcome::Class(cb)) = (&pa.outcome, &pb.outcome) {
                if oracle_dominates(schema, a, b) && ca < cb {
                    return Err(format!("classifier not monotone: {a:?} -> {ca}, {b:?} -> {cb}"));
                }
            }
        }
    }
    Ok(())
}
