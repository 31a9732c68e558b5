//! Decision models: from option PATs to gains to choice probabilities.
//!
//! Every decision in the simulation runs through the same pipeline. The PATs
//! of the options are turned into non-negative gains (advantage over the best
//! alternative, padded by the delay tolerance), options with zero gain are
//! eliminated, and one of four models distributes probability mass over the
//! survivors. All of it is pure and deterministic; randomness enters only
//! through the caller-supplied uniform draw in [`decide`].

use crate::pat::Pat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecisionModel {
    /// Mass grows linearly with the gain, boosted for near-best options.
    Linear,
    /// Multinomial logit: softmax of `beta * gain`.
    Logit,
    /// Power law `gain^beta`, akin to current splitting across resistors.
    Kirchhoff,
    /// Deterministic best choice, ties broken by lowest option index.
    Optimal,
}

impl std::str::FromStr for DecisionModel {
    type Err = ChoiceError;

    fn from_str(s: &str) -> Result<DecisionModel, ChoiceError> {
        match s {
            "linear" => Ok(DecisionModel::Linear),
            "logit" => Ok(DecisionModel::Logit),
            "kirchhoff" => Ok(DecisionModel::Kirchhoff),
            "optimal" => Ok(DecisionModel::Optimal),
            other => Err(ChoiceError::UnknownModel(other.to_string())),
        }
    }
}

impl std::fmt::Display for DecisionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecisionModel::Linear => "linear",
            DecisionModel::Logit => "logit",
            DecisionModel::Kirchhoff => "kirchhoff",
            DecisionModel::Optimal => "optimal",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ModelConfig {
    pub model: DecisionModel,
    /// Tuning exponent for logit and kirchhoff; ignored by the others.
    pub beta: f64,
}

impl ModelConfig {
    pub fn new(model: DecisionModel, beta: f64) -> Result<ModelConfig, ChoiceError> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(ChoiceError::InvalidBeta(beta));
        }
        Ok(ModelConfig { model, beta })
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum ChoiceError {
    #[error("choice set is empty")]
    EmptyChoiceSet,
    #[error("every option in the choice set is unreachable")]
    AllUnreachable,
    #[error("all options were eliminated (every gain is zero)")]
    NoPositiveGain,
    #[error("beta must be finite and non-negative, got {0}")]
    InvalidBeta(f64),
    #[error("unknown decision model '{0}' (expected linear, logit, kirchhoff, or optimal)")]
    UnknownModel(String),
}

/// Turns option PATs into gains: how much worse the best alternative is,
/// padded by the delay tolerance and clamped at zero. Unreachable options get
/// gain zero. An option whose every alternative is unreachable gains
/// unbounded advantage, represented as an infinite gain.
pub fn compute_gains(pats: &[Pat], delay_tolerance: Pat) -> Result<Vec<Pat>, ChoiceError> {
    if pats.is_empty() {
        return Err(ChoiceError::EmptyChoiceSet);
    }
    if pats.iter().all(|p| !p.is_finite()) {
        return Err(ChoiceError::AllUnreachable);
    }

    let mut best = Pat::INFINITY;
    let mut best_count = 0usize;
    let mut second = Pat::INFINITY;
    for &p in pats {
        if p < best {
            second = best;
            best = p;
            best_count = 1;
        } else if p == best {
            best_count += 1;
        } else if p < second {
            second = p;
        }
    }

    Ok(pats
        .iter()
        .map(|&p| {
            if !p.is_finite() {
                return Pat::ZERO;
            }
            let alternatives = if p == best && best_count == 1 {
                second
            } else {
                best
            };
            if !alternatives.is_finite() {
                return Pat::INFINITY;
            }
            let advantage = alternatives
                .millis()
                .checked_sub(p.millis())
                .and_then(|d| d.checked_add(delay_tolerance.millis()))
                .expect("PAT overflow");
            Pat::from_millis(advantage.max(0))
        })
        .collect())
}

/// Distributes probability mass over the options according to the model.
/// Zero-gain options are eliminated first and receive exactly 0.0; a sole
/// survivor receives exactly 1.0 without touching the model formula.
pub fn probabilities(gains: &[Pat], config: &ModelConfig) -> Result<Vec<f64>, ChoiceError> {
    if gains.is_empty() {
        return Err(ChoiceError::EmptyChoiceSet);
    }
    let survivors: Vec<usize> = (0..gains.len())
        .filter(|&i| gains[i] > Pat::ZERO)
        .collect();
    let mut probs = vec![0.0; gains.len()];
    match survivors.len() {
        0 => return Err(ChoiceError::NoPositiveGain),
        1 => {
            probs[survivors[0]] = 1.0;
            return Ok(probs);
        }
        _ => {}
    }
    // An unbounded gain means every alternative was unreachable; it wins
    // outright no matter the model.
    if let Some(&i) = survivors.iter().find(|&&i| !gains[i].is_finite()) {
        probs[i] = 1.0;
        return Ok(probs);
    }

    let g: Vec<f64> = survivors.iter().map(|&i| gains[i].as_seconds_f64()).collect();
    let weights: Vec<f64> = match config.model {
        DecisionModel::Logit => {
            let shift = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            g.iter().map(|&x| (config.beta * (x - shift)).exp()).collect()
        }
        DecisionModel::Kirchhoff => g.iter().map(|&x| x.powf(config.beta)).collect(),
        DecisionModel::Linear => {
            let mut top = f64::NEG_INFINITY;
            let mut runner_up = f64::NEG_INFINITY;
            for &x in &g {
                if x > top {
                    runner_up = top;
                    top = x;
                } else if x > runner_up {
                    runner_up = x;
                }
            }
            let gap = top - runner_up;
            g.iter().map(|&x| x.max(2.0 * x - top + gap)).collect()
        }
        DecisionModel::Optimal => {
            let best = g
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .unwrap();
            probs[survivors[best]] = 1.0;
            return Ok(probs);
        }
    };
    let total: f64 = weights.iter().sum();
    debug_assert!(total.is_finite() && total > 0.0);
    for (&i, w) in survivors.iter().zip(&weights) {
        probs[i] = w / total;
    }
    Ok(probs)
}

/// Runs the full pipeline for one decision and picks an option using the
/// uniform draw in `[0, 1)`. A single-option set short-circuits to that
/// option without evaluating any formula.
pub fn decide(
    pats: &[Pat],
    config: &ModelConfig,
    delay_tolerance: Pat,
    draw: f64,
) -> Result<usize, ChoiceError> {
    debug_assert!((0.0..1.0).contains(&draw));
    if pats.len() == 1 {
        if !pats[0].is_finite() {
            return Err(ChoiceError::AllUnreachable);
        }
        return Ok(0);
    }
    let gains = compute_gains(pats, delay_tolerance)?;
    let probs = probabilities(&gains, config)?;
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_positive = Some(i);
        cumulative += p;
        if draw < cumulative {
            return Ok(i);
        }
    }
    // Floating-point shortfall: the cumulative sum landed below 1.
    Ok(last_positive.expect("at least one positive probability"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn minutes(m: i64) -> Pat {
        Pat::from_millis(m * 60_000)
    }

    fn config(model: DecisionModel, beta: f64) -> ModelConfig {
        ModelConfig::new(model, beta).unwrap()
    }

    #[test]
    fn gains_reward_only_near_best_options() {
        let pats = [minutes(100), minutes(110), minutes(200)];
        let gains = compute_gains(&pats, minutes(5)).unwrap();
        assert_eq!(gains, vec![minutes(15), minutes(0), minutes(0)]);
    }

    #[test]
    fn equal_pats_share_the_tolerance_gain() {
        let pats = [minutes(50), minutes(50)];
        let gains = compute_gains(&pats, minutes(5)).unwrap();
        assert_eq!(gains, vec![minutes(5), minutes(5)]);
    }

    #[test]
    fn unreachable_options_gain_nothing() {
        let pats = [minutes(30), Pat::INFINITY];
        let gains = compute_gains(&pats, minutes(5)).unwrap();
        assert_eq!(gains[1], Pat::ZERO);
        assert!(!gains[0].is_finite(), "sole reachable option wins outright");
        let probs = probabilities(&gains, &config(DecisionModel::Logit, 1.0)).unwrap();
        assert_eq!(probs, vec![1.0, 0.0]);
    }

    #[test]
    fn all_unreachable_is_an_error() {
        assert_eq!(
            compute_gains(&[Pat::INFINITY, Pat::INFINITY], minutes(5)),
            Err(ChoiceError::AllUnreachable)
        );
        assert_eq!(
            compute_gains(&[], minutes(5)),
            Err(ChoiceError::EmptyChoiceSet)
        );
    }

    #[test]
    fn eliminated_options_get_exactly_zero() {
        let gains = [minutes(15), minutes(0), minutes(0)];
        for model in [
            DecisionModel::Linear,
            DecisionModel::Logit,
            DecisionModel::Kirchhoff,
            DecisionModel::Optimal,
        ] {
            let probs = probabilities(&gains, &config(model, 1.0)).unwrap();
            assert_eq!(probs, vec![1.0, 0.0, 0.0], "{model}");
        }
    }

    #[test]
    fn all_zero_gains_is_an_error() {
        assert_eq!(
            probabilities(&[Pat::ZERO, Pat::ZERO], &config(DecisionModel::Logit, 1.0)),
            Err(ChoiceError::NoPositiveGain)
        );
    }

    #[test]
    fn logit_splits_equal_gains_evenly() {
        for beta in [0.0, 0.5, 3.0] {
            let probs = probabilities(
                &[minutes(7), minutes(7)],
                &config(DecisionModel::Logit, beta),
            )
            .unwrap();
            assert_eq!(probs, vec![0.5, 0.5]);
        }
    }

    #[test]
    fn kirchhoff_follows_the_power_law() {
        let probs = probabilities(
            &[minutes(1), minutes(2)],
            &config(DecisionModel::Kirchhoff, 2.0),
        )
        .unwrap();
        assert!((probs[0] - 0.2).abs() < 1e-12);
        assert!((probs[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn linear_boosts_the_front_runner() {
        let probs = probabilities(
            &[minutes(10), minutes(5)],
            &config(DecisionModel::Linear, 0.0),
        )
        .unwrap();
        assert!((probs[0] - 0.75).abs() < 1e-12);
        assert!((probs[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn optimal_breaks_ties_towards_the_lowest_index() {
        let probs = probabilities(
            &[minutes(3), minutes(7), minutes(7)],
            &config(DecisionModel::Optimal, 0.0),
        )
        .unwrap();
        assert_eq!(probs, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn decide_short_circuits_single_options() {
        let cfg = config(DecisionModel::Logit, 1.0);
        assert_eq!(decide(&[minutes(10)], &cfg, minutes(5), 0.99).unwrap(), 0);
        assert_eq!(
            decide(&[Pat::INFINITY], &cfg, minutes(5), 0.0),
            Err(ChoiceError::AllUnreachable)
        );
    }

    #[test]
    fn decide_partitions_the_unit_interval() {
        let cfg = config(DecisionModel::Kirchhoff, 1.0);
        let pats = [minutes(10), minutes(10)];
        // Equal PATs, tolerance 10: gains [10, 10], probabilities [0.5, 0.5].
        assert_eq!(decide(&pats, &cfg, minutes(10), 0.25).unwrap(), 0);
        assert_eq!(decide(&pats, &cfg, minutes(10), 0.5).unwrap(), 1);
        assert_eq!(decide(&pats, &cfg, minutes(10), 0.9999).unwrap(), 1);
    }

    fn any_model() -> impl Strategy<Value = ModelConfig> {
        (0usize..4, 0.0f64..4.0).prop_map(|(m, beta)| {
            let model = [
                DecisionModel::Linear,
                DecisionModel::Logit,
                DecisionModel::Kirchhoff,
                DecisionModel::Optimal,
            ][m];
            ModelConfig::new(model, beta).unwrap()
        })
    }

    fn gain_vectors() -> impl Strategy<Value = Vec<Pat>> {
        proptest::collection::vec(0u32..10_000, 1..8)
            .prop_filter("needs a survivor", |v| v.iter().any(|&g| g > 0))
            .prop_map(|v| v.into_iter().map(Pat::from_seconds).collect())
    }

    proptest! {
        #[test]
        fn probabilities_form_a_distribution(gains in gain_vectors(), cfg in any_model()) {
            let probs = probabilities(&gains, &cfg).unwrap();
            let total: f64 = probs.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            for (&g, &p) in gains.iter().zip(&probs) {
                prop_assert!((0.0..=1.0).contains(&p));
                if g == Pat::ZERO {
                    prop_assert_eq!(p, 0.0);
                }
            }
        }

        #[test]
        fn logit_is_shift_invariant(
            gains in proptest::collection::vec(1u32..5_000, 2..8),
            shift in 1u32..5_000,
            beta in 0.0f64..3.0,
        ) {
            let cfg = config(DecisionModel::Logit, beta);
            let base: Vec<Pat> = gains.iter().map(|&g| Pat::from_seconds(g)).collect();
            let shifted: Vec<Pat> = gains.iter().map(|&g| Pat::from_seconds(g + shift)).collect();
            let p1 = probabilities(&base, &cfg).unwrap();
            let p2 = probabilities(&shifted, &cfg).unwrap();
            for (a, b) in p1.iter().zip(&p2) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn kirchhoff_is_scale_invariant(
            gains in proptest::collection::vec(1u32..5_000, 2..8),
            scale in 2u32..20,
            beta in 0.0f64..3.0,
        ) {
            let cfg = config(DecisionModel::Kirchhoff, beta);
            let base: Vec<Pat> = gains.iter().map(|&g| Pat::from_seconds(g)).collect();
            let scaled: Vec<Pat> = gains.iter().map(|&g| Pat::from_seconds(g * scale)).collect();
            let p1 = probabilities(&base, &cfg).unwrap();
            let p2 = probabilities(&scaled, &cfg).unwrap();
            for (a, b) in p1.iter().zip(&p2) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn zero_beta_is_uniform_over_survivors(
            gains in gain_vectors(),
            m in 0usize..2,
        ) {
            let model = [DecisionModel::Logit, DecisionModel::Kirchhoff][m];
            let probs = probabilities(&gains, &config(model, 0.0)).unwrap();
            let survivors = gains.iter().filter(|&&g| g > Pat::ZERO).count();
            let expected = 1.0 / survivors as f64;
            for (&g, &p) in gains.iter().zip(&probs) {
                if g > Pat::ZERO {
                    prop_assert!((p - expected).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn permuting_options_permutes_probabilities(
            (gains, order) in gain_vectors().prop_flat_map(|g| {
                let n = g.len();
                (Just(g), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
            }),
            cfg in any_model(),
        ) {
            // The optimal model's tie-break is index-based by design, so its
            // equivariance only holds for distinct gains.
            let distinct = {
                let mut sorted = gains.clone();
                sorted.sort();
                sorted.windows(2).all(|w| w[0] != w[1])
            };
            prop_assume!(cfg.model != DecisionModel::Optimal || distinct);
            let permuted: Vec<Pat> = order.iter().map(|&i| gains[i]).collect();
            let p1 = probabilities(&gains, &cfg).unwrap();
            let p2 = probabilities(&permuted, &cfg).unwrap();
            for (k, &i) in order.iter().enumerate() {
                prop_assert!((p2[k] - p1[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn gains_are_non_negative_and_tolerance_bounded(
            pats in proptest::collection::vec(0u32..100_000, 1..8),
            tolerance in 1u32..3_600,
        ) {
            let pats: Vec<Pat> = pats.into_iter().map(Pat::from_seconds).collect();
            let tol = Pat::from_seconds(tolerance);
            let gains = compute_gains(&pats, tol).unwrap();
            let best = *pats.iter().min().unwrap();
            for (&p, &g) in pats.iter().zip(&gains) {
                prop_assert!(g >= Pat::ZERO);
                if p > best.checked_add(tol) {
                    prop_assert_eq!(g, Pat::ZERO, "far-off option must be eliminated");
                }
                if p == best {
                    prop_assert!(g >= tol, "best option keeps at least the tolerance");
                }
            }
        }
    }
}
