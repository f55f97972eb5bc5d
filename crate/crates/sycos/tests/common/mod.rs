//! Helpers shared by the integration tests.
#![allow(dead_code)]

use sycos::datagen::{RelationKind, ScenarioSpec};
use sycos::{ResultSet, TimeSeriesPair, Window};

/// Jaccard similarity of the sample sets covered by two result lists.
/// Both empty counts as perfect agreement.
pub fn coverage_jaccard(a: &ResultSet, b: &ResultSet, n: usize) -> f64 {
    let cover = |rs: &ResultSet| {
        let mut mask = vec![false; n];
        for cw in rs.iter() {
            for i in cw.window.start..cw.window.end {
                mask[i] = true;
            }
        }
        mask
    };
    let (ma, mb) = (cover(a), cover(b));
    let mut inter = 0usize;
    let mut union = 0usize;
    for i in 0..n {
        if ma[i] && mb[i] {
            inter += 1;
        }
        if ma[i] || mb[i] {
            union += 1;
        }
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Jaccard similarity between one found window set and a ground-truth set.
pub fn truth_jaccard(found: &ResultSet, truth: &[Window], n: usize) -> f64 {
    let mut truth_set = ResultSet::default();
    for &w in truth {
        truth_set
            .insert_disjoint(sycos::CorrelatedWindow {
                window: w,
                mi: 0.0,
                normalized_mi: 1.0,
                method_tag: sycos::MethodTag::TD,
            })
            .unwrap();
    }
    coverage_jaccard(found, &truth_set, n)
}

/// Scenario with evenly spaced linear blocks in an independent background.
pub fn block_fixture(
    total: usize,
    n_blocks: usize,
    block_len: usize,
    noise: f64,
    seed: u64,
) -> (TimeSeriesPair, Vec<Window>) {
    let spec = ScenarioSpec::evenly_spaced(
        total,
        n_blocks,
        block_len,
        RelationKind::Linear,
        noise,
        seed,
    );
    sycos::datagen::generate_scenario(&spec).unwrap()
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64]) -> f64 {
    let mu = mean(values);
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= rel * scale
}
