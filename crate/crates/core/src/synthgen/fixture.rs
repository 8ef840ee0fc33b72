use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{Column, ColumnKind, ColumnSpec, DatasetSchema, Origin, ProtectedSpec, TabularDataset};
use crate::error::Result;
use crate::seed;

const CONTINUOUS: [&str; 8] = [
    "age",
    "education_num",
    "hours_per_week",
    "capital_gain",
    "capital_loss",
    "balance",
    "duration",
    "campaign",
];
const CATEGORICAL: [&str; 7] = [
    "workclass",
    "education",
    "marital",
    "occupation",
    "race",
    "sex",
    "income",
];

/// Schema of [`demo_population`]: eight integer-valued continuous columns
/// and seven categorical ones, target `income`, protected `sex`
/// (privileged `Male`).
pub fn demo_schema() -> DatasetSchema {
    let columns = CONTINUOUS
        .iter()
        .map(|n| (n, ColumnKind::Continuous))
        .chain(CATEGORICAL.iter().map(|n| (n, ColumnKind::Categorical)))
        .map(|(n, kind)| ColumnSpec {
            name: n.to_string(),
            kind,
        })
        .collect();
    DatasetSchema::new(
        columns,
        "income",
        ProtectedSpec {
            column: "sex".into(),
            privileged_value: "Male".into(),
        },
        vec![],
    )
    .expect("demo schema is valid")
}

fn pick<'a, R: Rng>(rng: &mut R, options: &[&'a str], weights: &[f64]) -> &'a str {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (o, w) in options.iter().zip(weights) {
        if u < *w {
            return o;
        }
        u -= w;
    }
    options[options.len() - 1]
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Census-like population with known dependence: latent factors drive age,
/// education, hours and occupation, and a logistic model of them (plus
/// `sex`) drives the binary `income` target.
pub fn demo_population(n: usize, seed: u64) -> Result<TabularDataset> {
    let mut rng = seed::rng(seed::derive(seed, &[seed::tag("demo")]));
    let mut cont: Vec<Vec<f64>> = vec![Vec::with_capacity(n); CONTINUOUS.len()];
    let mut cat: Vec<Vec<String>> = vec![Vec::with_capacity(n); CATEGORICAL.len()];
    for _ in 0..n {
        let mut z = || rng.sample::<f64, _>(StandardNormal);
        let (a, b, c, e1, e2, e3, e4) = (z(), z(), z(), z(), z(), z(), z());
        let male = rng.random::<f64>() < sigmoid(0.3 + 0.6 * c);
        let age = (40.0 + 11.0 * (0.6 * a + 0.8 * e1)).clamp(17.0, 90.0).round();
        let edu = (10.0 + 2.5 * b).clamp(1.0, 16.0).round();
        let hours = (40.0 + 9.0 * (0.5 * c + 0.3 * b + 0.6 * e2) + if male { 3.0 } else { 0.0 })
            .clamp(1.0, 99.0)
            .round();
        let gain = if rng.random::<f64>() < sigmoid(-2.5 + 0.8 * b) {
            (7.0 + 0.8 * b + 0.5 * e3).exp().round()
        } else {
            0.0
        };
        let loss = if rng.random::<f64>() < 0.05 {
            (7.3 + 0.3 * e4).exp().round()
        } else {
            0.0
        };
        let balance = (900.0 * (0.5 * a + 0.4 * b + 0.6 * e3).exp()).round();
        let duration = (180.0 * (0.6 * e4).exp()).round();
        let campaign = 1.0 + (0.7 * e2.abs() * 2.0).floor();

        let workclass = pick(
            &mut rng,
            &["Gov", "Other", "Private", "Self-emp"],
            &[1.0, 0.3, 4.0 - c, 1.0 + 0.5 * a.max(0.0)],
        );
        let education = match edu as i64 {
            ..=8 => "Primary",
            9..=10 => "HS",
            11..=12 => "Some-college",
            13..=14 => "Bachelors",
            _ => "Graduate",
        };
        let marital = if age < 26.0 {
            pick(&mut rng, &["Divorced", "Married", "Single"], &[0.05, 0.25, 0.7])
        } else {
            pick(&mut rng, &["Divorced", "Married", "Single"], &[0.15, 0.6, 0.25])
        };
        let occupation = pick(
            &mut rng,
            &["Admin", "Craft", "Exec", "Prof", "Sales", "Service"],
            &[
                1.0,
                1.5 - 0.5 * b,
                0.8 + 0.6 * b.max(0.0),
                0.6 + 0.8 * b.max(0.0),
                1.0,
                1.2 - 0.4 * b,
            ],
        );
        let race = pick(&mut rng, &["A", "B", "C"], &[0.7, 0.2, 0.1]);
        let logit = -1.3
            + 1.0 * b
            + 0.5 * a
            + 0.4 * c
            + 0.5 * (male as u8 as f64)
            + 0.8 * ((gain > 0.0) as u8 as f64)
            + 0.5 * ((marital == "Married") as u8 as f64);
        let income = if rng.random::<f64>() < sigmoid(logit) {
            ">50K"
        } else {
            "<=50K"
        };

        for (col, v) in cont
            .iter_mut()
            .zip([age, edu, hours, gain, loss, balance, duration, campaign])
        {
            col.push(v);
        }
        for (col, v) in cat.iter_mut().zip([
            workclass,
            education,
            marital,
            occupation,
            race,
            if male { "Male" } else { "Female" },
            income,
        ]) {
            col.push(v.to_string());
        }
    }
    let columns = cont
        .into_iter()
        .map(Column::Continuous)
        .chain(cat.into_iter().map(Column::Categorical))
        .collect();
    TabularDataset::from_columns(demo_schema(), columns, Origin::Real)
}
