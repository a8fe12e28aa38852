//! Schemas, attribute normalization, and decision-table ingestion.
//!
//! The canonical on-disk format is the pre-normalized comma-separated layout
//! of the UCI fertility file: one object per line, one numeric field per
//! condition attribute followed by a class token, no header.

use std::collections::HashSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::decimal::{Decimal, PRECISION};
use crate::error::{Error, Result};

/// Direction of preference on a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    /// Higher values are better.
    Gain,
    /// Lower values are better.
    Cost,
}

fn default_norm_hi() -> Decimal {
    Decimal::ONE
}

fn default_decimals() -> u32 {
    PRECISION
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AttributeKind {
    /// Raw interval `[lo, hi]` mapped linearly onto `[norm_lo, norm_hi]`,
    /// rounded to `decimals` fractional digits.
    NumericInterval {
        lo: Decimal,
        hi: Decimal,
        #[serde(default)]
        norm_lo: Decimal,
        #[serde(default = "default_norm_hi")]
        norm_hi: Decimal,
        #[serde(default = "default_decimals")]
        decimals: u32,
    },
    /// Listed raw labels mapped positionally onto numeric codes.
    OrderedCategorical {
        labels: Vec<String>,
        codes: Vec<Decimal>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: AttributeKind,
    pub preference: Preference,
}

impl AttributeSpec {
    pub fn numeric(name: &str, lo: i64, hi: i64, decimals: u32, preference: Preference) -> Self {
        AttributeSpec {
            name: name.to_string(),
            kind: AttributeKind::NumericInterval {
                lo: Decimal::from_int(lo),
                hi: Decimal::from_int(hi),
                norm_lo: Decimal::ZERO,
                norm_hi: Decimal::ONE,
                decimals,
            },
            preference,
        }
    }

    pub fn categorical(name: &str, labels: &[&str], codes: &[&str], preference: Preference) -> Self {
        AttributeSpec {
            name: name.to_string(),
            kind: AttributeKind::OrderedCategorical {
                labels: labels.iter().map(|s| s.to_string()).collect(),
                codes: codes
                    .iter()
                    .map(|c| c.parse().expect("literal code"))
                    .collect(),
            },
            preference,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSchema(format!("attribute {}: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::InvalidSchema("attribute with empty name".into()));
        }
        match &self.kind {
            AttributeKind::NumericInterval {
                lo,
                hi,
                norm_lo,
                norm_hi,
                decimals,
            } => {
                if lo >= hi {
                    return bad(format!("interval [{lo}, {hi}] is empty"));
                }
                if norm_lo == norm_hi {
                    return bad("normalized interval is degenerate".into());
                }
                if *decimals > PRECISION {
                    return bad(format!("at most {PRECISION} decimals are supported"));
                }
            }
            AttributeKind::OrderedCategorical { labels, codes } => {
                if labels.is_empty() {
                    return bad("no labels".into());
                }
                if labels.len() != codes.len() {
                    return bad(format!("{} labels but {} codes", labels.len(), codes.len()));
                }
                let distinct_labels: HashSet<_> = labels.iter().collect();
                let distinct_codes: HashSet<_> = codes.iter().collect();
                if distinct_labels.len() != labels.len() || distinct_codes.len() != codes.len() {
                    return bad("labels and codes must be distinct".into());
                }
            }
        }
        Ok(())
    }

    /// Smallest and largest normalized value.
    pub fn normalized_bounds(&self) -> (Decimal, Decimal) {
        match &self.kind {
            AttributeKind::NumericInterval {
                norm_lo, norm_hi, ..
            } => (*norm_lo.min(norm_hi), *norm_lo.max(norm_hi)),
            AttributeKind::OrderedCategorical { codes, .. } => (
                *codes.iter().min().expect("validated"),
                *codes.iter().max().expect("validated"),
            ),
        }
    }

    pub fn in_normalized_domain(&self, value: Decimal) -> bool {
        match &self.kind {
            AttributeKind::NumericInterval { .. } => {
                let (lo, hi) = self.normalized_bounds();
                lo <= value && value <= hi
            }
            AttributeKind::OrderedCategorical { codes, .. } => codes.contains(&value),
        }
    }
}

/// Maps a raw value (an interval number or a listed label) onto the
/// attribute's normalized scale.
pub fn normalize_value(attr: &AttributeSpec, raw: &str) -> Result<Decimal> {
    let raw = raw.trim();
    let out_of_domain = || Error::OutOfDomain {
        attribute: attr.name.clone(),
        value: raw.to_string(),
    };
    if raw.is_empty() || raw == "?" {
        return Err(Error::MissingValue {
            attribute: attr.name.clone(),
        });
    }
    match &attr.kind {
        AttributeKind::NumericInterval {
            lo,
            hi,
            norm_lo,
            norm_hi,
            decimals,
        } => {
            let x: Decimal = raw.parse().map_err(|_| out_of_domain())?;
            if x < *lo || x > *hi {
                return Err(out_of_domain());
            }
            let span = i128::from(hi.scaled() - lo.scaled());
            let numerator = i128::from(norm_lo.scaled()) * span
                + i128::from(x.scaled() - lo.scaled()) * i128::from(norm_hi.scaled() - norm_lo.scaled());
            Ok(Decimal::round_quotient(numerator, span, *decimals))
        }
        AttributeKind::OrderedCategorical { labels, codes } => labels
            .iter()
            .position(|l| l.eq_ignore_ascii_case(raw))
            .map(|i| codes[i])
            .ok_or_else(out_of_domain),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassLabel {
    /// Token used in data files (`N`, `O`).
    pub token: String,
    /// Human-readable name.
    #[serde(default)]
    pub name: String,
}

/// Decision classes ordered from worst to best.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassOrder(Vec<ClassLabel>);

impl ClassOrder {
    pub fn new(classes: Vec<ClassLabel>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::InvalidSchema("at least two classes are required".into()));
        }
        let tokens: HashSet<_> = classes.iter().map(|c| c.token.as_str()).collect();
        if tokens.len() != classes.len() || tokens.iter().any(|t| t.trim().is_empty()) {
            return Err(Error::InvalidSchema("class tokens must be distinct and non-empty".into()));
        }
        Ok(ClassOrder(classes))
    }

    /// Rank of a class token, 0 being the worst class.
    pub fn rank(&self, token: &str) -> Option<usize> {
        self.0.iter().position(|c| c.token == token)
    }

    pub fn rank_of(&self, token: &str) -> Result<usize> {
        self.rank(token).ok_or_else(|| Error::UnknownClass(token.to_string()))
    }

    pub fn token(&self, rank: usize) -> &str {
        &self.0[rank].token
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.0
    }

    pub fn worst(&self) -> usize {
        0
    }

    pub fn best(&self) -> usize {
        self.0.len() - 1
    }
}

/// Condition attributes plus the decision class order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    #[serde(default)]
    pub name: String,
    pub attributes: Vec<AttributeSpec>,
    pub classes: ClassOrder,
}

impl Schema {
    pub fn new(name: &str, attributes: Vec<AttributeSpec>, classes: ClassOrder) -> Result<Self> {
        let schema = Schema {
            name: name.to_string(),
            attributes,
            classes,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(Error::InvalidSchema("no condition attributes".into()));
        }
        let mut names = HashSet::new();
        for a in &self.attributes {
            a.validate()?;
            if !names.insert(a.name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate attribute {}", a.name)));
            }
        }
        ClassOrder::new(self.classes.0.clone()).map(|_| ())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema: Schema =
            serde_json::from_str(text).map_err(|e| Error::InvalidSchema(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    /// The UCI fertility diagnosis attributes, normalized codes, and preference directions.
    pub fn fertility() -> Self {
        use Preference::{Cost, Gain};
        let yes_no = ["Yes", "No"];
        let zero_one = ["0", "1"];
        let attributes = vec![
            AttributeSpec::categorical(
                "Season",
                &["Winter", "Spring", "Summer", "Fall"],
                &["-1", "-0.33", "0.33", "1"],
                Gain,
            ),
            AttributeSpec::numeric("Age", 18, 36, 2, Cost),
            AttributeSpec::categorical("Disease", &yes_no, &zero_one, Gain),
            AttributeSpec::categorical("Trauma", &yes_no, &zero_one, Gain),
            AttributeSpec::categorical("Surgery", &yes_no, &zero_one, Gain),
            AttributeSpec::categorical(
                "Fever",
                &[
                    "Less than three months ago",
                    "More than three months ago",
                    "No",
                ],
                &["-1", "0", "1"],
                Gain,
            ),
            AttributeSpec::categorical(
                "Alcohol",
                &[
                    "Several times a day",
                    "Every day",
                    "Several times a week",
                    "Once a week",
                    "Hardly ever or never",
                ],
                &["0.2", "0.4", "0.6", "0.8", "1"],
                Gain,
            ),
            AttributeSpec::categorical(
                "Smoking",
                &["Never", "Occasionally", "Daily"],
                &["-1", "0", "1"],
                Cost,
            ),
            AttributeSpec::numeric("Sitting", 0, 16, 2, Cost),
        ];
        let classes = ClassOrder::new(vec![
            ClassLabel {
                token: "O".into(),
                name: "Altered".into(),
            },
            ClassLabel {
                token: "N".into(),
                name: "Normal".into(),
            },
        ])
        .expect("two classes");
        Schema::new("fertility", attributes, classes).expect("preset is valid")
    }

    /// Looks up a built-in schema by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "fertility" => Some(Schema::fertility()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectRecord {
    /// 1-based row index.
    pub id: usize,
    pub values: Vec<Decimal>,
    /// Class rank in the schema's class order.
    pub label: usize,
}

/// Normalizes one raw record: one raw value per attribute followed by a class
/// token.
pub fn normalize_record<S: AsRef<str>>(schema: &Schema, id: usize, raw: &[S]) -> Result<ObjectRecord> {
    let arity = schema.arity();
    if raw.len() > arity + 1 {
        return Err(Error::SchemaMismatch(format!(
            "expected {} fields, found {}",
            arity + 1,
            raw.len()
        )));
    }
    let mut values = Vec::with_capacity(arity);
    for (i, attr) in schema.attributes.iter().enumerate() {
        let field = raw.get(i).ok_or_else(|| Error::MissingValue {
            attribute: attr.name.clone(),
        })?;
        values.push(normalize_value(attr, field.as_ref())?);
    }
    let token = raw
        .get(arity)
        .map(|s| s.as_ref().trim())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::MissingValue {
            attribute: "class".into(),
        })?;
    let label = schema.classes.rank_of(token)?;
    Ok(ObjectRecord { id, values, label })
}

/// A parsed line that may or may not carry a class token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub id: usize,
    pub values: Vec<Decimal>,
    pub label: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Accept lines without a class token.
    pub allow_unlabeled: bool,
    /// Accept an input with no data lines.
    pub allow_empty: bool,
}

/// Parses pre-normalized lines, checking every value against its attribute's
/// normalized domain. Blank lines are skipped but still counted for line
/// numbers; ids are assigned consecutively from 1.
pub fn parse_observations<R: BufRead>(
    reader: R,
    schema: &Schema,
    options: ParseOptions,
) -> Result<Vec<Observation>> {
    let arity = schema.arity();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            column: 0,
            cause: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |column: usize, cause: String| Error::Parse {
            line: line_no,
            column,
            cause,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let labeled = match fields.len() {
            n if n == arity + 1 => true,
            n if n == arity && options.allow_unlabeled => false,
            n => {
                return Err(parse_err(
                    n.min(arity + 1),
                    format!("expected {} fields, found {n}", arity + 1),
                ))
            }
        };
        let mut values = Vec::with_capacity(arity);
        for (col, (field, attr)) in fields.iter().zip(&schema.attributes).enumerate() {
            if field.is_empty() || *field == "?" {
                return Err(parse_err(col + 1, format!("missing value for {}", attr.name)));
            }
            let v: Decimal = field
                .parse()
                .map_err(|e: crate::decimal::ParseDecimalError| parse_err(col + 1, e.to_string()))?;
            if !attr.in_normalized_domain(v) {
                return Err(parse_err(
                    col + 1,
                    format!("{v} is outside the normalized domain of {}", attr.name),
                ));
            }
            values.push(v);
        }
        let label = if labeled {
            let token = fields[arity];
            Some(
                schema
                    .classes
                    .rank(token)
                    .ok_or_else(|| parse_err(arity + 1, format!("unknown class token {token:?}")))?,
            )
        } else {
            None
        };
        out.push(Observation {
            id: out.len() + 1,
            values,
            label,
        });
    }
    if out.is_empty() && !options.allow_empty {
        return Err(Error::EmptyTable);
    }
    Ok(out)
}

/// Objects of a labeled decision table, immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTable {
    schema: Schema,
    objects: Vec<ObjectRecord>,
}

impl DecisionTable {
    pub fn new(schema: Schema, objects: Vec<ObjectRecord>) -> Result<Self> {
        schema.validate()?;
        for (i, o) in objects.iter().enumerate() {
            if o.id != i + 1 {
                return Err(Error::SchemaMismatch(format!(
                    "object ids must be contiguous from 1; position {} has id {}",
                    i + 1,
                    o.id
                )));
            }
            if o.values.len() != schema.arity() {
                return Err(Error::SchemaMismatch(format!(
                    "object {} has {} values, schema has {} attributes",
                    o.id,
                    o.values.len(),
                    schema.arity()
                )));
            }
            for (v, a) in o.values.iter().zip(&schema.attributes) {
                if !a.in_normalized_domain(*v) {
                    return Err(Error::OutOfDomain {
                        attribute: a.name.clone(),
                        value: v.to_string(),
                    });
                }
            }
            if o.label >= schema.classes.len() {
                return Err(Error::UnknownClass(o.label.to_string()));
            }
        }
        Ok(DecisionTable { schema, objects })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn objects(&self) -> &[ObjectRecord] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Object by 1-based id.
    pub fn get(&self, id: usize) -> Option<&ObjectRecord> {
        id.checked_sub(1).and_then(|i| self.objects.get(i))
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.objects.iter().map(|o| o.id)
    }

    /// Number of objects per class rank.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.classes.len()];
        for o in &self.objects {
            counts[o.label] += 1;
        }
        counts
    }

    /// Renders the table in the canonical comma-separated format.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for o in &self.objects {
            for v in &o.values {
                out.push_str(&v.to_string());
                out.push(',');
            }
            out.push_str(self.schema.classes.token(o.label));
            out.push('\n');
        }
        out
    }
}

/// Parses a labeled, pre-normalized dataset into a validated table.
pub fn parse_normalized_dataset<R: BufRead>(reader: R, schema: &Schema) -> Result<DecisionTable> {
    parse_dataset_with(reader, schema, false)
}

pub fn parse_dataset_with<R: BufRead>(reader: R, schema: &Schema, allow_empty: bool) -> Result<DecisionTable> {
    let observations = parse_observations(
        reader,
        schema,
        ParseOptions {
            allow_unlabeled: false,
            allow_empty,
        },
    )?;
    let objects = observations
        .into_iter()
        .map(|o| ObjectRecord {
            id: o.id,
            values: o.values,
            label: o.label.expect("labels required"),
        })
        .collect();
    DecisionTable::new(schema.clone(), objects)
}
