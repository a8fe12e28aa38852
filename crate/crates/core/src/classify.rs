//! Applying a rule base to records.

use serde::Serialize;

use crate::decimal::Decimal;
use crate::dominance::UnionKind;
use crate::error::{Error, Result};
use crate::induction::{Conclusion, DecisionRule, RuleBase, RuleKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// A definite class rank.
    Class(usize),
    /// Only an approximate rule matched; one of these class ranks.
    Uncertain(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fired {
    /// 1-based index of the rule in the rule base.
    Rule(usize),
    Default,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub id: usize,
    pub outcome: Outcome,
    pub fired: Fired,
}

impl Prediction {
    pub fn is_definite(&self) -> bool {
        matches!(self.outcome, Outcome::Class(_))
    }
}

/// Whether every condition of `rule` holds for `values`.
pub fn matches(rule: &DecisionRule, values: &[Decimal]) -> Result<bool> {
    if let Some(c) = rule.conditions.conditions().iter().find(|c| c.attribute >= values.len()) {
        return Err(Error::SchemaMismatch(format!(
            "rule refers to attribute {} but the record has {} values",
            c.attribute + 1,
            values.len()
        )));
    }
    Ok(rule.matches(values))
}

fn certain_class(conclusion: &Conclusion) -> usize {
    match conclusion {
        Conclusion::Union {
            kind: UnionKind::Downward | UnionKind::Upward,
            class,
        } => *class,
        Conclusion::Disjunction(classes) => classes[0],
    }
}

/// First matching certain rule wins; otherwise an approximate rule makes the
/// outcome uncertain; otherwise the default class.
pub fn classify(rulebase: &RuleBase, id: usize, values: &[Decimal]) -> Result<Prediction> {
    if values.len() != rulebase.attributes.len() {
        return Err(Error::SchemaMismatch(format!(
            "record has {} values, rule base expects {}",
            values.len(),
            rulebase.attributes.len()
        )));
    }
    let certain = rulebase
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.kind == RuleKind::Certain)
        .find(|(_, r)| r.matches(values));
    if let Some((i, rule)) = certain {
        return Ok(Prediction {
            id,
            outcome: Outcome::Class(certain_class(&rule.conclusion)),
            fired: Fired::Rule(i + 1),
        });
    }
    let approximate = rulebase
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.kind == RuleKind::Approximate)
        .find(|(_, r)| r.matches(values));
    if let Some((i, rule)) = approximate {
        let classes = match &rule.conclusion {
            Conclusion::Disjunction(cs) => cs.clone(),
            Conclusion::Union { class, .. } => vec![*class],
        };
        return Ok(Prediction {
            id,
            outcome: Outcome::Uncertain(classes),
            fired: Fired::Rule(i + 1),
        });
    }
    Ok(Prediction {
        id,
        outcome: Outcome::Class(rulebase.default_class),
        fired: Fired::Default,
    })
}

/// Renders predictions as `id<TAB>class-or-UNCERTAIN<TAB>rule-index`; the
/// default rule is numbered after the induced rules.
pub fn render_predictions_text(rulebase: &RuleBase, predictions: &[Prediction]) -> String {
    let mut out = String::new();
    for p in predictions {
        let outcome = match &p.outcome {
            Outcome::Class(c) => rulebase.classes[*c].as_str(),
            Outcome::Uncertain(_) => "UNCERTAIN",
        };
        let rule = match p.fired {
            Fired::Rule(i) => i,
            Fired::Default => rulebase.default_index(),
        };
        out.push_str(&format!("{}\t{}\t{}\n", p.id, outcome, rule));
    }
    out
}

pub fn render_predictions_json(rulebase: &RuleBase, predictions: &[Prediction]) -> String {
    let entries: Vec<serde_json::Value> = predictions
        .iter()
        .map(|p| {
            let (prediction, classes) = match &p.outcome {
                Outcome::Class(c) => (rulebase.classes[*c].clone(), vec![rulebase.classes[*c].clone()]),
                Outcome::Uncertain(cs) => (
                    "UNCERTAIN".to_string(),
                    cs.iter().map(|&c| rulebase.classes[c].clone()).collect(),
                ),
            };
            let rule = match p.fired {
                Fired::Rule(i) => i,
                Fired::Default => rulebase.default_index(),
            };
            serde_json::json!({
                "id": p.id,
                "prediction": prediction,
                "classes": classes,
                "rule": rule,
                "default": p.fired == Fired::Default,
            })
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("predictions serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::IdSet;
    use crate::induction::{ConditionSet, ElementaryCondition, Relation, Support};

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn sitting_rule(kind: RuleKind, threshold: &str) -> DecisionRule {
        DecisionRule {
            kind,
            conditions: [ElementaryCondition {
                attribute: 1,
                relation: Relation::AtLeast,
                threshold: d(threshold),
            }]
            .into_iter()
            .collect(),
            conclusion: match kind {
                RuleKind::Certain => Conclusion::Union {
                    kind: UnionKind::Downward,
                    class: 0,
                },
                RuleKind::Approximate => Conclusion::Disjunction(vec![0, 1]),
            },
            covered: IdSet::new(),
            support: Support { covered: 0, target: 1 },
        }
    }

    fn rulebase(rules: Vec<DecisionRule>) -> RuleBase {
        RuleBase {
            attributes: vec!["Season".into(), "Sitting".into()],
            classes: vec!["O".into(), "N".into()],
            rules,
            default_class: 1,
        }
    }

    #[test]
    fn matching() {
        let empty = DecisionRule {
            conditions: ConditionSet::new(),
            ..sitting_rule(RuleKind::Certain, "0")
        };
        assert!(matches(&empty, &[d("1"), d("0")]).unwrap());
        let r = sitting_rule(RuleKind::Certain, "0.50");
        assert!(matches(&r, &[d("1"), d("0.5")]).unwrap());
        assert!(!matches(&r, &[d("1"), d("0.44")]).unwrap());
        assert!(matches!(matches(&r, &[d("1")]), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn classification_order() {
        let rb = rulebase(vec![
            sitting_rule(RuleKind::Certain, "0.5"),
            sitting_rule(RuleKind::Approximate, "0.3"),
        ]);
        let p = classify(&rb, 1, &[d("1"), d("0.6")]).unwrap();
        assert_eq!(p.outcome, Outcome::Class(0));
        assert_eq!(p.fired, Fired::Rule(1));
        let p = classify(&rb, 2, &[d("1"), d("0.4")]).unwrap();
        assert_eq!(p.outcome, Outcome::Uncertain(vec![0, 1]));
        assert_eq!(p.fired, Fired::Rule(2));
        let p = classify(&rb, 3, &[d("1"), d("0.1")]).unwrap();
        assert_eq!(p.outcome, Outcome::Class(1));
        assert_eq!(p.fired, Fired::Default);
        assert!(classify(&rb, 4, &[d("1")]).is_err());

        let preds: Vec<Prediction> = [d("0.6"), d("0.4"), d("0.1")]
            .iter()
            .enumerate()
            .map(|(i, s)| classify(&rb, i + 1, &[d("1"), *s]).unwrap())
            .collect();
        assert_eq!(
            render_predictions_text(&rb, &preds),
            "1\tO\t1\n2\tUNCERTAIN\t2\n3\tN\t3\n"
        );
        let json: serde_json::Value = serde_json::from_str(&render_predictions_json(&rb, &preds)).unwrap();
        assert_eq!(json[1]["classes"], serde_json::json!(["O", "N"]));
        assert_eq!(json[2]["default"], true);
    }
}
