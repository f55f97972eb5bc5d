//! Seeded synthetic fixtures: ten relation families between two series, plus
//! scenario builders that splice correlated blocks into independent noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::types::{TimeSeriesPair, Window};

/// Functional families relating the two series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Independent,
    Linear,
    Exponential,
    Quadratic,
    Diamond,
    Circle,
    Sine,
    Cross,
    Quartic,
    Sqrt,
}

impl RelationKind {
    pub const ALL: [RelationKind; 10] = [
        RelationKind::Independent,
        RelationKind::Linear,
        RelationKind::Exponential,
        RelationKind::Quadratic,
        RelationKind::Diamond,
        RelationKind::Circle,
        RelationKind::Sine,
        RelationKind::Cross,
        RelationKind::Quartic,
        RelationKind::Sqrt,
    ];

    /// The x interval each family is defined over.
    pub fn canonical_range(self) -> (f64, f64) {
        match self {
            // Independent draws x from a fixed normal; range unused.
            RelationKind::Independent => (0.0, 1.0),
            RelationKind::Linear => (0.0, 10.0),
            RelationKind::Exponential => (-10.0, 10.0),
            RelationKind::Quadratic => (-4.0, 4.0),
            RelationKind::Diamond => (4.0, 8.0),
            RelationKind::Circle => (-3.0, 3.0),
            RelationKind::Sine => (0.0, 10.0),
            RelationKind::Cross => (-5.0, 5.0),
            RelationKind::Quartic => (-1.0, 3.0),
            RelationKind::Sqrt => (0.0, 25.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Independent => "independent",
            RelationKind::Linear => "linear",
            RelationKind::Exponential => "exponential",
            RelationKind::Quadratic => "quadratic",
            RelationKind::Diamond => "diamond",
            RelationKind::Circle => "circle",
            RelationKind::Sine => "sine",
            RelationKind::Cross => "cross",
            RelationKind::Quartic => "quartic",
            RelationKind::Sqrt => "sqrt",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown relation family '{s}'")))
    }
}

/// One synthetic pair: `n` samples of `y = f(x) + noise * u`, `u ~ U(0,1)`,
/// x uniform over `x_range` and sorted ascending.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct RelationSpec {
    pub kind: RelationKind,
    pub x_range: (f64, f64),
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
}

impl RelationSpec {
    /// Spec over the family's canonical x interval.
    pub fn canonical(kind: RelationKind, n: usize, noise: f64, seed: u64) -> Self {
        Self { kind, x_range: kind.canonical_range(), n, noise, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("need at least 2 samples, got {}", self.n)));
        }
        let (lo, hi) = self.x_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("invalid x range [{lo}, {hi}]")));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::Config(format!("noise amplitude must be >= 0, got {}", self.noise)));
        }
        match self.kind {
            RelationKind::Sqrt if lo < 0.0 => {
                Err(Error::Domain(format!("sqrt family needs x >= 0, range starts at {lo}")))
            }
            RelationKind::Circle if lo < -3.0 || hi > 3.0 => {
                Err(Error::Domain(format!("circle family needs x in [-3, 3], got [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }
}

/// Generates one pair per `spec`. Branch families (diamond, circle, cross)
/// pick a branch uniformly per sample.
pub fn generate_relation(spec: &RelationSpec) -> Result<TimeSeriesPair> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.x_range;

    if spec.kind == RelationKind::Independent {
        let nx = Normal::new(3.0, 5.0).unwrap();
        let ny = Normal::new(0.0, 1.0).unwrap();
        let mut xs: Vec<f64> = (0..spec.n).map(|_| nx.sample(&mut rng)).collect();
        let ys: Vec<f64> = (0..spec.n).map(|_| ny.sample(&mut rng)).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        return TimeSeriesPair::new(xs, ys);
    }

    let mut xs: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(lo..hi)).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let u = spec.noise * rng.gen::<f64>();
            match spec.kind {
                RelationKind::Independent => unreachable!(),
                RelationKind::Linear => 2.0 * x + u,
                RelationKind::Exponential => 0.01f64.powf(x + u),
                RelationKind::Quadratic => x * x + u,
                RelationKind::Diamond => match rng.gen_range(0..4u8) {
                    0 => x + u,
                    1 => 8.0 - x + u,
                    2 => -4.0 + x + u,
                    _ => 12.0 - x + u,
                },
                RelationKind::Circle => {
                    let mag = (9.0 - x * x + u).max(0.0).sqrt();
                    if rng.gen::<bool>() {
                        mag
                    } else {
                        -mag
                    }
                }
                RelationKind::Sine => 2.0 * x.sin() + u,
                RelationKind::Cross => {
                    if rng.gen::<bool>() {
                        x + u
                    } else {
                        -x + u
                    }
                }
                RelationKind::Quartic => {
                    x.powi(4) - 4.0 * x.powi(3) + 4.0 * x.powi(2) + x + u
                }
                RelationKind::Sqrt => x.sqrt() + u,
            }
        })
        .collect();
    TimeSeriesPair::new(xs, ys)
}

/// Bivariate Gaussian pair with correlation `rho`; test and example fodder.
pub fn gaussian_pair(n: usize, rho: f64, seed: u64) -> Result<TimeSeriesPair> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Config(format!("correlation must be in [-1, 1], got {rho}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = Normal::new(0.0, 1.0).unwrap();
    let resid = (1.0 - rho * rho).sqrt();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = std.sample(&mut rng);
        let e: f64 = std.sample(&mut rng);
        xs.push(x);
        ys.push(rho * x + resid * e);
    }
    TimeSeriesPair::new(xs, ys)
}

/// One correlated block spliced into a scenario.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BlockSpec {
    pub position: usize,
    pub length: usize,
    pub relation: RelationSpec,
}

/// Independent background with correlated blocks at fixed positions.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ScenarioSpec {
    pub total_length: usize,
    pub blocks: Vec<BlockSpec>,
    pub noise: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Evenly spaced blocks of one size and family; covers the dense / sparse
    /// / moderate layouts used throughout the tests.
    pub fn evenly_spaced(
        total_length: usize,
        n_blocks: usize,
        block_length: usize,
        kind: RelationKind,
        noise: f64,
        seed: u64,
    ) -> Self {
        let mut blocks = Vec::with_capacity(n_blocks);
        if n_blocks > 0 {
            let stride = total_length / n_blocks;
            let margin = stride.saturating_sub(block_length) / 2;
            for i in 0..n_blocks {
                blocks.push(BlockSpec {
                    position: i * stride + margin,
                    length: block_length,
                    relation: RelationSpec::canonical(
                        kind,
                        block_length,
                        noise,
                        seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1)),
                    ),
                });
            }
        }
        Self { total_length, blocks, noise, seed }
    }

    fn validate(&self) -> Result<()> {
        let mut prev_end = 0usize;
        let mut sorted: Vec<&BlockSpec> = self.blocks.iter().collect();
        sorted.sort_by_key(|b| b.position);
        for b in sorted {
            let end = b.position + b.length;
            if b.position < prev_end {
                return Err(Error::Config(format!(
                    "block at {} overlaps the previous block ending at {prev_end}",
                    b.position
                )));
            }
            if end > self.total_length {
                return Err(Error::Config(format!(
                    "block [{}, {end}) exceeds scenario length {}",
                    b.position, self.total_length
                )));
            }
            if b.length != b.relation.n {
                return Err(Error::Config(format!(
                    "block length {} disagrees with its relation sample count {}",
                    b.length, b.relation.n
                )));
            }
            prev_end = end;
        }
        Ok(())
    }
}

/// Builds the scenario pair plus the ground-truth block windows.
///
/// Spliced blocks are rescaled to the background's per-axis mean and spread,
/// so detection must come from dependence, not amplitude.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<(TimeSeriesPair, Vec<Window>)> {
    spec.validate()?;
    let background = generate_relation(&RelationSpec {
        kind: RelationKind::Independent,
        x_range: (0.0, 1.0),
        n: spec.total_length.max(2),
        noise: spec.noise,
        seed: spec.seed,
    })?;
    let mut xs = background.xs().to_vec();
    let mut ys = background.ys().to_vec();
    // Splicing must not inherit the background's sorted-x sweep: shuffle the
    // background x so it is genuinely unordered noise.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5343_454e_4152_494f);
    for i in (1..xs.len()).rev() {
        xs.swap(i, rng.gen_range(0..=i));
    }
    let (bx_mean, bx_std) = mean_std(&xs);
    let (by_mean, by_std) = mean_std(&ys);

    let mut truth = Vec::with_capacity(spec.blocks.len());
    for block in &spec.blocks {
        let pair = generate_relation(&block.relation)?;
        let (mx, sx) = mean_std(pair.xs());
        let (my, sy) = mean_std(pair.ys());
        for (offset, (&x, &y)) in pair.xs().iter().zip(pair.ys()).enumerate() {
            let i = block.position + offset;
            xs[i] = bx_mean + (x - mx) / sx.max(1e-12) * bx_std;
            ys[i] = by_mean + (y - my) / sy.max(1e-12) * by_std;
        }
        truth.push(Window::new(block.position, block.position + block.length));
    }
    truth.sort_by_key(|w| w.start);
    Ok((TimeSeriesPair::new(xs, ys)?, truth))
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_without_noise_is_exact() {
        let spec = RelationSpec::canonical(RelationKind::Linear, 100, 0.0, 7);
        let pair = generate_relation(&spec).unwrap();
        for (&x, &y) in pair.xs().iter().zip(pair.ys()) {
            assert_eq!(y, 2.0 * x);
        }
    }

    #[test]
    fn x_is_sorted_and_in_range() {
        for kind in RelationKind::ALL {
            let spec = RelationSpec::canonical(kind, 200, 0.3, 3);
            let pair = generate_relation(&spec).unwrap();
            let xs = pair.xs();
            assert!(xs.windows(2).all(|w| w[0] <= w[1]), "{kind:?} x not sorted");
            if kind != RelationKind::Independent {
                let (lo, hi) = spec.x_range;
                assert!(xs.iter().all(|&x| (lo..hi).contains(&x)));
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = RelationSpec::canonical(RelationKind::Diamond, 50, 0.5, 99);
        let a = generate_relation(&spec).unwrap();
        let b = generate_relation(&spec).unwrap();
        assert_eq!(a.xs(), b.xs());
        assert_eq!(a.ys(), b.ys());
    }

    #[test]
    fn domain_errors() {
        let mut spec = RelationSpec::canonical(RelationKind::Sqrt, 10, 0.0, 1);
        spec.x_range = (-1.0, 4.0);
        assert!(matches!(generate_relation(&spec), Err(Error::Domain(_))));
        let mut spec = RelationSpec::canonical(RelationKind::Circle, 10, 0.0, 1);
        spec.x_range = (-5.0, 5.0);
        assert!(matches!(generate_relation(&spec), Err(Error::Domain(_))));
    }

    #[test]
    fn scenario_rejects_overlap() {
        let rel = RelationSpec::canonical(RelationKind::Linear, 50, 0.1, 1);
        let spec = ScenarioSpec {
            total_length: 200,
            blocks: vec![
                BlockSpec { position: 10, length: 50, relation: rel },
                BlockSpec { position: 40, length: 50, relation: rel },
            ],
            noise: 0.1,
            seed: 1,
        };
        assert!(generate_scenario(&spec).is_err());
    }

    #[test]
    fn scenario_blocks_match_background_amplitude() {
        let spec = ScenarioSpec::evenly_spaced(2000, 3, 300, RelationKind::Sine, 0.2, 5);
        let (pair, truth) = generate_scenario(&spec).unwrap();
        assert_eq!(truth.len(), 3);
        let (_, bg_sx) = mean_std(&pair.xs()[..truth[0].start]);
        let block = truth[0];
        let (_, bl_sx) = mean_std(&pair.xs()[block.start..block.end]);
        assert!((bl_sx / bg_sx - 1.0).abs() < 0.35, "block x spread {bl_sx} vs bg {bg_sx}");
    }

    #[test]
    fn empty_scenario_is_pure_background() {
        let spec = ScenarioSpec { total_length: 500, blocks: vec![], noise: 0.0, seed: 2 };
        let (pair, truth) = generate_scenario(&spec).unwrap();
        assert!(truth.is_empty());
        assert_eq!(pair.len(), 500);
    }

    #[test]
    fn gaussian_pair_correlation_tracks_rho() {
        let pair = gaussian_pair(4000, 0.9, 17).unwrap();
        let (mx, sx) = mean_std(pair.xs());
        let (my, sy) = mean_std(pair.ys());
        let r: f64 = pair
            .xs()
            .iter()
            .zip(pair.ys())
            .map(|(&x, &y)| (x - mx) * (y - my))
            .sum::<f64>()
            / (4000.0 * sx * sy);
        assert!((r - 0.9).abs() < 0.05, "sample correlation {r}");
    }
}
