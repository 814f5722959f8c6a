//! Feed-forward policy networks, the normalized observation vector and the
//! discrete action semantics.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CarState, Constants};

/// Cars in a full observation.
pub const MAX_CARS: usize = 5;
/// Features per car.
pub const FEATURES_PER_CAR: usize = 5;
/// Input width of the full network.
pub const FULL_INPUT: usize = MAX_CARS * FEATURES_PER_CAR;
/// Input width of a network that only sees the ego and the front car.
pub const DUO_INPUT: usize = 2 * FEATURES_PER_CAR;

/// The three discrete actions, ordered by resulting speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Brake,
    Idle,
    Accelerate,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Brake, Action::Idle, Action::Accelerate];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Brake => "brake",
            Action::Idle => "idle",
            Action::Accelerate => "accel",
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brake" => Ok(Action::Brake),
            "idle" => Ok(Action::Idle),
            "accel" | "accelerate" => Ok(Action::Accelerate),
            _ => Err(Error::Argument(format!("unknown action `{s}`"))),
        }
    }
}

/// Raw network outputs for brake, idle and accelerate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActionScores {
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

impl ActionScores {
    pub const fn new(y1: f64, y2: f64, y3: f64) -> Self {
        Self { y1, y2, y3 }
    }

    pub fn score(&self, act: Action) -> f64 {
        match act {
            Action::Brake => self.y1,
            Action::Idle => self.y2,
            Action::Accelerate => self.y3,
        }
    }

    /// Actions by descending score; equal scores keep the slower action first.
    pub fn ranked(&self) -> [Action; 3] {
        let mut acts = Action::ALL;
        acts.sort_by(|a, b| self.score(*b).total_cmp(&self.score(*a)).then(a.cmp(b)));
        acts
    }
}

/// Argmax with ties resolved towards the lowest speed:
/// brake iff `y1 ≥ y2 ∧ y1 ≥ y3`, idle iff `y2 > y1 ∧ y2 ≥ y3`,
/// accelerate iff `y3 > y1 ∧ y3 > y2`.
pub fn select_action(s: &ActionScores) -> Action {
    if s.y1 >= s.y2 && s.y1 >= s.y3 {
        Action::Brake
    } else if s.y2 > s.y1 && s.y2 >= s.y3 {
        Action::Idle
    } else {
        Action::Accelerate
    }
}

/// Acceleration an action commands: brake → `Bmin`, idle → 0,
/// accelerate → `Amax`.
pub fn action_to_accel(act: Action, c: &Constants) -> f64 {
    action_to_accel_with(act, c, c.b_min)
}

/// Like [`action_to_accel`] with an explicit brake deceleration, which must
/// lie in `[Bmax, Bmin]`.
pub fn action_to_accel_with(act: Action, c: &Constants, brake: f64) -> f64 {
    debug_assert!(c.b_max <= brake && brake <= c.b_min);
    match act {
        Action::Brake => brake,
        Action::Idle => 0.0,
        Action::Accelerate => c.a_max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Linear,
}

/// One affine layer followed by an activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Row-major, `out × in`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn inputs(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn outputs(&self) -> usize {
        self.weights.len()
    }

    fn check(&self, index: usize) -> Result<()> {
        let dim = |msg: String| Error::Dimension { layer: index, msg };
        if self.weights.is_empty() || self.inputs() == 0 {
            return Err(dim("empty weight matrix".into()));
        }
        if let Some((r, row)) = self
            .weights
            .iter()
            .enumerate()
            .find(|(_, row)| row.len() != self.inputs())
        {
            return Err(dim(format!(
                "row {r} has {} entries, expected {}",
                row.len(),
                self.inputs()
            )));
        }
        if self.bias.len() != self.outputs() {
            return Err(dim(format!(
                "bias has {} entries for {} outputs",
                self.bias.len(),
                self.outputs()
            )));
        }
        Ok(())
    }

    fn apply(&self, input: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| {
                let z = row.iter().zip(input).fold(0.0, |acc, (w, x)| acc + w * x) + b;
                match self.activation {
                    Activation::Relu => z.max(0.0),
                    Activation::Linear => z,
                }
            })
            .collect()
    }
}

/// A feed-forward network: dense layers with ReLU or linear activations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
}

#[derive(Deserialize)]
struct RawNet {
    layers: Vec<serde_json::Value>,
}

impl Mlp {
    /// Builds a network, checking that adjacent layer dimensions chain.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Dimension {
                layer: 0,
                msg: "network has no layers".into(),
            });
        }
        for (i, layer) in layers.iter().enumerate() {
            layer.check(i)?;
            if i > 0 && layers[i - 1].outputs() != layer.inputs() {
                return Err(Error::Dimension {
                    layer: i,
                    msg: format!(
                        "expects {} inputs but layer {} produces {}",
                        layer.inputs(),
                        i - 1,
                        layers[i - 1].outputs()
                    ),
                });
            }
        }
        Ok(Self { layers })
    }

    /// Checks the policy shape: 10 or 25 inputs and 3 outputs.
    pub fn validate_policy(&self) -> Result<()> {
        let last = self.layers.len() - 1;
        if self.output_dim() != 3 {
            return Err(Error::Dimension {
                layer: last,
                msg: format!("policy needs 3 outputs, got {}", self.output_dim()),
            });
        }
        if self.input_dim() != FULL_INPUT && self.input_dim() != DUO_INPUT {
            return Err(Error::Dimension {
                layer: 0,
                msg: format!(
                    "policy needs {DUO_INPUT} or {FULL_INPUT} inputs, got {}",
                    self.input_dim()
                ),
            });
        }
        Ok(())
    }

    /// Parses the JSON weight format
    /// `{"layers": [{"weights": [[..]], "bias": [..], "activation": "relu"|"linear"}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawNet =
            serde_json::from_str(text).map_err(|e| Error::WeightParse(e.to_string()))?;
        let layers = raw
            .layers
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                serde_json::from_value::<Layer>(v)
                    .map_err(|e| Error::WeightParse(format!("layer {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    /// Plain forward pass on a raw input vector.
    pub fn eval(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_dim() {
            return Err(Error::Dimension {
                layer: 0,
                msg: format!("input has {} entries, expected {}", input.len(), self.input_dim()),
            });
        }
        Ok(self
            .layers
            .iter()
            .fold(input.to_vec(), |acc, layer| layer.apply(&acc)))
    }

    /// A network whose outputs are the constant `scores` for every input.
    pub fn constant(scores: [f64; 3], input_dim: usize) -> Self {
        Self {
            layers: vec![Layer {
                weights: vec![vec![0.0; input_dim]; 3],
                bias: scores.to_vec(),
                activation: Activation::Linear,
            }],
        }
    }

    /// Random ReLU network with the given layer widths (first entry is the
    /// input width) and a linear head, weights uniform in `±sqrt(6/fan_in)`.
    pub fn random(widths: &[usize], seed: u64) -> Self {
        assert!(widths.len() >= 2, "need input and output width");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = widths.len() - 1;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let bound = (6.0 / w[0] as f64).sqrt();
                Layer {
                    weights: (0..w[1])
                        .map(|_| (0..w[0]).map(|_| rng.gen_range(-bound..bound)).collect())
                        .collect(),
                    bias: (0..w[1]).map(|_| rng.gen_range(-0.1..0.1)).collect(),
                    activation: if i + 1 == n {
                        Activation::Linear
                    } else {
                        Activation::Relu
                    },
                }
            })
            .collect();
        Self { layers }
    }
}

/// Names accepted by [`builtin_network`].
pub const BUILTIN_NETWORKS: [&str; 5] = ["brake", "idle", "accel", "gap", "random[:SEED]"];

/// Small networks that need no weight file.
///
/// * `brake`, `idle`, `accel`: constant scores preferring that action.
/// * `gap`: linear in the gap to the car in front, braking below 30 m and
///   accelerating beyond 70 m whatever the speeds.
/// * `random` or `random:SEED`: a random `input_dim → 16 → 16 → 3` network.
pub fn builtin_network(name: &str, input_dim: usize, order: FeatureOrder) -> Result<Mlp> {
    if input_dim != DUO_INPUT && input_dim != FULL_INPUT {
        return Err(Error::Argument(format!(
            "input width must be {DUO_INPUT} or {FULL_INPUT}, got {input_dim}"
        )));
    }
    let m = match name {
        "brake" => Mlp::constant([1.0, 0.0, 0.0], input_dim),
        "idle" => Mlp::constant([0.0, 1.0, 0.0], input_dim),
        "accel" => Mlp::constant([0.0, 0.0, 1.0], input_dim),
        "gap" => {
            // the front car's relative position, in units of 5V
            let dx = FEATURES_PER_CAR + order.x_slot();
            let row = |w: f64| {
                let mut r = vec![0.0; input_dim];
                r[dx] = w;
                r
            };
            Mlp::new(vec![Layer {
                weights: vec![row(-1.0), row(0.0), row(1.0)],
                bias: vec![0.15, 0.0, -0.35],
                activation: Activation::Linear,
            }])?
        }
        _ => {
            let seed = match name.strip_prefix("random") {
                Some("") => 0,
                Some(rest) => rest
                    .strip_prefix(':')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Argument(format!("bad seed in `{name}`")))?,
                None => {
                    return Err(Error::Argument(format!(
                        "unknown network `{name}`, expected one of {}",
                        BUILTIN_NETWORKS.join(", ")
                    )))
                }
            };
            Mlp::random(&[input_dim, 16, 16, 3], seed)
        }
    };
    Ok(m)
}

/// Reads and validates a policy network from a JSON weight file.
pub fn load_mlp(path: impl AsRef<Path>) -> Result<Mlp> {
    let text = std::fs::read_to_string(path)?;
    let m = Mlp::from_json(&text)?;
    m.validate_policy()?;
    Ok(m)
}

/// Scores of `m` on an observation. Networks with 10 inputs see the first two
/// cars only.
pub fn forward(m: &Mlp, o: &ObsVector) -> Result<ActionScores> {
    let input = o.input(m.input_dim())?;
    let y = m.eval(input)?;
    match y.as_slice() {
        [y1, y2, y3] => Ok(ActionScores::new(*y1, *y2, *y3)),
        _ => Err(Error::Dimension {
            layer: m.layers.len() - 1,
            msg: format!("policy needs 3 outputs, got {}", y.len()),
        }),
    }
}

/// Position of each semantic feature inside a car's block of five inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureOrder {
    /// presence, x, y, vx, vy
    #[default]
    Pxyvw,
    /// presence, x, vx, y, vy
    Pxvyw,
}

impl FeatureOrder {
    /// Slots of (presence, x, y, vx, vy).
    fn slots(self) -> [usize; 5] {
        match self {
            FeatureOrder::Pxyvw => [0, 1, 2, 3, 4],
            FeatureOrder::Pxvyw => [0, 1, 3, 2, 4],
        }
    }

    pub(crate) fn x_slot(self) -> usize {
        self.slots()[1]
    }

    pub(crate) fn v_slot(self) -> usize {
        self.slots()[3]
    }
}

impl std::str::FromStr for FeatureOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pxyvw" => Ok(Self::Pxyvw),
            "pxvyw" => Ok(Self::Pxvyw),
            _ => Err(Error::Argument(format!("unknown feature order `{s}`"))),
        }
    }
}

/// Normalized observation of up to five cars, five features each.
///
/// Car 1 is the ego with `x/(5V)` and `v/(2V)`; cars 2..5 are relative to
/// the ego: `(x_i - x_E)/(5V)` and `(v_i - v_E)/(2V)`. Lateral features are
/// always 0 and absent cars are all-zero. Values are not clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObsVector {
    pub features: [f64; FULL_INPUT],
    pub order: FeatureOrder,
}

impl ObsVector {
    /// The first `dim` features, `dim` being 10 or 25.
    pub fn input(&self, dim: usize) -> Result<&[f64]> {
        if dim == DUO_INPUT || dim == FULL_INPUT {
            Ok(&self.features[..dim])
        } else {
            Err(Error::Dimension {
                layer: 0,
                msg: format!("policy needs {DUO_INPUT} or {FULL_INPUT} inputs, got {dim}"),
            })
        }
    }

    pub fn presence(&self, car: usize) -> bool {
        self.features[car * FEATURES_PER_CAR] == 1.0
    }

    /// Number of present cars (presence is prefix-closed).
    pub fn present(&self) -> usize {
        (0..MAX_CARS).take_while(|&i| self.presence(i)).count()
    }

    /// Physical states of the present cars, accelerations set to 0.
    pub fn denormalize(&self, c: &Constants) -> Vec<CarState> {
        let (xs, vs) = (self.order.x_slot(), self.order.v_slot());
        let f = |car: usize, slot: usize| self.features[car * FEATURES_PER_CAR + slot];
        let ego = CarState::new(f(0, xs) * 5.0 * c.v, f(0, vs) * 2.0 * c.v, 0.0);
        std::iter::once(ego)
            .chain((1..self.present()).map(|i| {
                CarState::new(
                    ego.x + f(i, xs) * 5.0 * c.v,
                    ego.v + f(i, vs) * 2.0 * c.v,
                    0.0,
                )
            }))
            .collect()
    }
}

/// Builds the normalized observation of `cars`: ego first, then the cars
/// ahead by increasing position, at most five in total.
pub fn observe(cars: &[CarState], c: &Constants, order: FeatureOrder) -> Result<ObsVector> {
    if cars.is_empty() || cars.len() > MAX_CARS {
        return Err(Error::Argument(format!(
            "observation needs 1 to {MAX_CARS} cars, got {}",
            cars.len()
        )));
    }
    if let Some(i) = (1..cars.len()).find(|&i| cars[i].x < cars[i - 1].x) {
        return Err(Error::Argument(format!(
            "cars must be ordered by position: car {} at {} is behind car {} at {}",
            i + 1,
            cars[i].x,
            i,
            cars[i - 1].x
        )));
    }
    let [p, xs, _, vs, _] = order.slots();
    let ego = cars[0];
    let mut features = [0.0; FULL_INPUT];
    for (i, car) in cars.iter().enumerate() {
        let base = i * FEATURES_PER_CAR;
        features[base + p] = 1.0;
        if i == 0 {
            features[base + xs] = ego.x / (5.0 * c.v);
            features[base + vs] = ego.v / (2.0 * c.v);
        } else {
            features[base + xs] = (car.x - ego.x) / (5.0 * c.v);
            features[base + vs] = (car.v - ego.v) / (2.0 * c.v);
        }
    }
    Ok(ObsVector { features, order })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> Constants {
        Constants::highway(-3.0)
    }

    #[test]
    fn select_action_ties() {
        assert_eq!(select_action(&ActionScores::new(1.0, 1.0, 1.0)), Action::Brake);
        assert_eq!(select_action(&ActionScores::new(0.0, 5.0, 5.0)), Action::Idle);
        assert_eq!(select_action(&ActionScores::new(0.0, 1.0, 2.0)), Action::Accelerate);
        assert_eq!(select_action(&ActionScores::new(2.0, 1.0, 2.0)), Action::Brake);
    }

    #[test]
    fn ranking_follows_scores_then_speed() {
        assert_eq!(
            ActionScores::new(0.0, 1.0, 2.0).ranked(),
            [Action::Accelerate, Action::Idle, Action::Brake]
        );
        assert_eq!(
            ActionScores::new(1.0, 1.0, 1.0).ranked(),
            [Action::Brake, Action::Idle, Action::Accelerate]
        );
        for s in [
            ActionScores::new(3.0, 3.0, 0.0),
            ActionScores::new(0.0, 2.0, 2.0),
            ActionScores::new(-1.0, 4.0, 0.5),
        ] {
            assert_eq!(s.ranked()[0], select_action(&s));
        }
    }

    #[test]
    fn action_accelerations() {
        let c = c();
        assert_eq!(action_to_accel(Action::Brake, &c), -3.0);
        assert_eq!(action_to_accel(Action::Idle, &c), 0.0);
        assert_eq!(action_to_accel(Action::Accelerate, &c), 5.0);
        assert_eq!(action_to_accel_with(Action::Brake, &c, c.b_max), -5.0);
    }

    #[test]
    fn action_names_round_trip() {
        for a in Action::ALL {
            assert_eq!(a.name().parse::<Action>().unwrap(), a);
        }
        assert!("coast".parse::<Action>().is_err());
    }

    #[test]
    fn builtin_networks() {
        let c = c();
        let order = FeatureOrder::default();
        let cars = |gap: f64| [CarState::new(0.0, 20.0, 0.0), CarState::new(gap, 20.0, 0.0)];
        let pick = |m: &Mlp, gap: f64| {
            select_action(&forward(m, &observe(&cars(gap), &c, order).unwrap()).unwrap())
        };
        for (name, act) in [("brake", Action::Brake), ("idle", Action::Idle), ("accel", Action::Accelerate)] {
            let m = builtin_network(name, FULL_INPUT, order).unwrap();
            assert_eq!(pick(&m, 50.0), act);
        }
        for order in [FeatureOrder::Pxyvw, FeatureOrder::Pxvyw] {
            let gap = builtin_network("gap", DUO_INPUT, order).unwrap();
            let pick = |g: f64| {
                select_action(&forward(&gap, &observe(&cars(g), &c, order).unwrap()).unwrap())
            };
            assert_eq!(pick(20.0), Action::Brake);
            assert_eq!(pick(50.0), Action::Idle);
            assert_eq!(pick(80.0), Action::Accelerate);
        }
        let r1 = builtin_network("random:3", FULL_INPUT, order).unwrap();
        assert_eq!(r1, Mlp::random(&[FULL_INPUT, 16, 16, 3], 3));
        assert_eq!(builtin_network("random", DUO_INPUT, order).unwrap().input_dim(), DUO_INPUT);
        assert!(builtin_network("random:x", FULL_INPUT, order).is_err());
        assert!(builtin_network("turbo", FULL_INPUT, order).is_err());
        assert!(builtin_network("brake", 7, order).is_err());
    }

    #[test]
    fn loads_two_hidden_layer_file() {
        let m = Mlp::random(&[FULL_INPUT, 16, 16, 3], 7);
        let back = Mlp::from_json(&m.to_json()).unwrap();
        assert_eq!(back.layers().len(), 3);
        back.validate_policy().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn dimension_mismatch_names_layer() {
        let json = r#"{"layers": [
            {"weights": [[1.0, 0.0]], "bias": [0.0], "activation": "relu"},
            {"weights": [[1.0, 1.0]], "bias": [0.0], "activation": "linear"}
        ]}"#;
        match Mlp::from_json(json) {
            Err(Error::Dimension { layer, .. }) => assert_eq!(layer, 1),
            other => panic!("{other:?}"),
        }
        // 16 outputs feeding a 17-wide layer
        let mut m = Mlp::random(&[FULL_INPUT, 16, 3], 1);
        m.layers[1].weights.iter_mut().for_each(|r| r.push(0.0));
        assert!(matches!(
            Mlp::new(m.layers).unwrap_err(),
            Error::Dimension { layer: 1, .. }
        ));
    }

    #[test]
    fn parse_error_names_layer() {
        let json = r#"{"layers": [{"weights": [[1.0]], "bias": [0.0], "activation": "tanh"}]}"#;
        let err = Mlp::from_json(json).unwrap_err().to_string();
        assert!(err.contains("layer 0"), "{err}");
        assert!(Mlp::from_json("{\"layer\": []}").is_err());
    }

    #[test]
    fn identity_head_is_valid() {
        let mut weights = vec![vec![0.0; FULL_INPUT]; 3];
        for (i, row) in weights.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let m = Mlp::new(vec![Layer {
            weights,
            bias: vec![0.0; 3],
            activation: Activation::Linear,
        }])
        .unwrap();
        m.validate_policy().unwrap();
    }

    #[test]
    fn forward_examples() {
        let c = c();
        let obs = observe(
            &[CarState::new(80.0, 12.0, 0.0), CarState::new(120.0, 10.0, 0.0)],
            &c,
            FeatureOrder::Pxyvw,
        )
        .unwrap();
        let m = Mlp::constant([1.0, 0.0, 0.0], FULL_INPUT);
        assert_eq!(forward(&m, &obs).unwrap(), ActionScores::new(1.0, 0.0, 0.0));

        let mut weights = vec![vec![0.0; FULL_INPUT]; 3];
        weights[2][1] = 1.0;
        let pick = Mlp::new(vec![Layer {
            weights,
            bias: vec![0.0; 3],
            activation: Activation::Linear,
        }])
        .unwrap();
        assert_eq!(forward(&pick, &obs).unwrap().y3, 80.0 / 200.0);

        let small = Mlp::constant([0.0, 0.0, 1.0], 4);
        assert!(forward(&small, &obs).is_err());
    }

    #[test]
    fn observe_example() {
        let c = c();
        let obs = observe(
            &[CarState::new(0.0, 12.0, 0.0), CarState::new(40.0, 10.0, 0.0)],
            &c,
            FeatureOrder::Pxyvw,
        )
        .unwrap();
        let mut expected = [0.0; FULL_INPUT];
        expected[..10].copy_from_slice(&[1.0, 0.0, 0.0, 0.15, 0.0, 1.0, 0.2, 0.0, -0.025, 0.0]);
        assert_eq!(obs.features, expected);
        assert_eq!(obs.present(), 2);
    }

    #[test]
    fn observe_boundaries_and_absence() {
        let c = c();
        let obs = observe(&[CarState::new(200.0, 0.0, 0.0)], &c, FeatureOrder::Pxyvw).unwrap();
        assert_eq!(obs.features[1], 1.0);
        let cars = [
            CarState::new(0.0, 10.0, 0.0),
            CarState::new(30.0, 10.0, 0.0),
        ];
        let obs = observe(&cars, &c, FeatureOrder::Pxyvw).unwrap();
        assert!(obs.features[10..].iter().all(|&f| f == 0.0));
        assert!(!obs.presence(2) && !obs.presence(3) && !obs.presence(4));
    }

    #[test]
    fn observe_rejects_unordered_cars() {
        let cars = [CarState::new(50.0, 0.0, 0.0), CarState::new(10.0, 0.0, 0.0)];
        assert!(matches!(
            observe(&cars, &c(), FeatureOrder::Pxyvw),
            Err(Error::Argument(_))
        ));
        assert!(observe(&[], &c(), FeatureOrder::Pxyvw).is_err());
    }

    #[test]
    fn alternative_feature_order() {
        let c = c();
        let cars = [CarState::new(0.0, 12.0, 0.0), CarState::new(40.0, 10.0, 0.0)];
        let obs = observe(&cars, &c, FeatureOrder::Pxvyw).unwrap();
        assert_eq!(&obs.features[..5], &[1.0, 0.0, 0.15, 0.0, 0.0]);
        let back = obs.denormalize(&c);
        assert!((back[1].x - 40.0).abs() < 1e-12 && (back[1].v - 10.0).abs() < 1e-12);
    }
}
