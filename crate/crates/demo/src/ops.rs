use ofdma_alloc::generate::{random_instance, GeneratorConfig};
use ofdma_alloc::io::PartitionFile;
use ofdma_alloc::{solve_sumrate, verify_reduction, waterfill_capped, ChannelVector, Partition};
use serde::{Deserialize, Serialize};

const MAX_CHANNELS: usize = 64;
const MAX_POINTS: usize = 2_000;
const MAX_CELLS: usize = 20_000;
const MAX_GROUPS: usize = 3;

fn parse<'a, T: Deserialize<'a>>(input: &'a str) -> Result<T, String> {
    serde_json::from_str(input).map_err(|e| format!("bad input: {e}"))
}

fn render<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaterfillInput {
    pub gains: Vec<f64>,
    pub caps: Vec<f64>,
    pub budget: f64,
    /// Samples on the curve over `(0, 2 * budget]`.
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    100
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WaterfillOutput {
    pub powers: Vec<f64>,
    /// `1/g` per channel; `null` for zero gain.
    pub floors: Vec<Option<f64>>,
    pub water_level: f64,
    pub value: f64,
    pub total_power: f64,
    /// `[budget, rate]` pairs.
    pub curve: Vec<[f64; 2]>,
}

pub fn waterfill(input: &str) -> Result<String, String> {
    let input: WaterfillInput = parse(input)?;
    if input.gains.len() > MAX_CHANNELS {
        return Err(format!("at most {MAX_CHANNELS} channels"));
    }
    let points = input.points.clamp(2, MAX_POINTS);
    let channel = ChannelVector::new(input.gains, input.caps).map_err(|e| e.to_string())?;
    let result = waterfill_capped(&channel, input.budget).map_err(|e| e.to_string())?;
    let curve = (1..=points)
        .map(|i| {
            let b = 2.0 * input.budget * i as f64 / points as f64;
            waterfill_capped(&channel, b).map(|r| [b, r.value])
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    render(&WaterfillOutput {
        floors: channel
            .gains()
            .iter()
            .map(|&g| (g > 0.0).then(|| g.recip()))
            .collect(),
        powers: result.powers,
        water_level: result.water_level,
        value: result.value,
        total_power: result.total_power,
        curve,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomInput {
    pub receivers: usize,
    pub subcarriers: usize,
    pub seed: u64,
    pub budget: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RandomOutput {
    /// `K` rows of gain-to-noise ratios.
    pub gains: Vec<Vec<f64>>,
    pub cap: f64,
    pub serving_receiver: Vec<usize>,
    pub powers: Vec<f64>,
    pub rates: Vec<f64>,
    /// Mean rate.
    pub value: f64,
    pub total_power: f64,
}

pub fn solve_random(input: &str) -> Result<String, String> {
    let input: RandomInput = parse(input)?;
    if input.receivers.saturating_mul(input.subcarriers) > MAX_CELLS {
        return Err(format!("K x N is limited to {MAX_CELLS} in the demo"));
    }
    let config = GeneratorConfig::new(input.receivers, input.subcarriers, input.seed)
        .with_budget(input.budget);
    let instance = random_instance(&config).map_err(|e| e.to_string())?;
    let report = solve_sumrate(&instance).map_err(|e| e.to_string())?;
    let serving = report.assignment.serving_receiver.clone();
    let powers = serving
        .iter()
        .enumerate()
        .map(|(n, &k)| report.allocation.get(k, n))
        .collect();
    render(&RandomOutput {
        gains: instance.gains.to_rows(),
        cap: instance.subcarrier_caps.first().copied().unwrap_or(0.0),
        serving_receiver: serving,
        powers,
        rates: report.rates.rates,
        value: report.value,
        total_power: report.total_power,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PartitionOutput {
    pub partition_yes: bool,
    pub allocation_feasible: bool,
    pub agree: bool,
    pub certificate: Option<Vec<Vec<usize>>>,
    pub decoded: Option<Vec<Vec<usize>>>,
    pub minimum_power: Option<f64>,
    pub sumrate_value: f64,
    pub sumrate_power: f64,
    pub bound_ok: bool,
    pub full_power_ok: bool,
}

pub fn verify_partition(input: &str) -> Result<String, String> {
    let file: PartitionFile = parse(input)?;
    if file.groups > MAX_GROUPS {
        return Err(format!("the demo verifies up to {MAX_GROUPS} groups"));
    }
    let tpi = file.to_instance().map_err(|e| e.to_string())?;
    let r = verify_reduction(&tpi).map_err(|e| e.to_string())?;
    let groups = |p: &Option<Partition>| p.as_ref().map(|p| p.groups().to_vec());
    render(&PartitionOutput {
        partition_yes: r.partition_yes,
        allocation_feasible: r.allocation_feasible,
        agree: r.agree,
        certificate: groups(&r.partition_certificate),
        decoded: groups(&r.decoded_certificate),
        minimum_power: r.minimum_power,
        sumrate_value: r.sumrate_value,
        sumrate_power: r.sumrate_power,
        bound_ok: r.bound_ok,
        full_power_ok: r.full_power_ok,
    })
}
