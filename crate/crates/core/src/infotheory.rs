//! Information quantities for beta-Bernoulli beliefs, in nats.

use rand::Rng;
use rand_distr::Distribution;
use statrs::function::gamma::ln_gamma;

use crate::belief::{aligned_reward, Action, BeliefState, BetaPosterior};
use crate::error::{Error, Result};

/// Arguments below this are pushed up by the recurrence before the asymptotic
/// series is applied. At 6 the first omitted series term is below 2e-13.
const DIGAMMA_SERIES_THRESHOLD: f64 = 6.0;

/// Digamma function `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument(x));
    }
    Ok(digamma_positive(x))
}

fn digamma_positive(mut x: f64) -> f64 {
    // psi(x) = psi(x + 1) - 1/x
    let mut shift = 0.0;
    while x < DIGAMMA_SERIES_THRESHOLD {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln x - 1/(2x) - sum_k B_2k / (2k x^2k), through k = 7.
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    shift + x.ln() - 0.5 * inv - tail
}

/// Mutual information `I(X; p)` between `p ~ beta(alpha, beta)` and one
/// `X ~ Bernoulli(p)`:
///
/// ```text
/// 1/s + ln s - psi(s) + (alpha/s)(psi(alpha) - ln alpha) + (beta/s)(psi(beta) - ln beta),   s = alpha + beta
/// ```
///
/// Symmetric in its arguments bit for bit.
pub fn beta_bernoulli_mi(alpha: f64, beta: f64) -> Result<f64> {
    BetaPosterior::new(alpha, beta)?;
    Ok(mi_unchecked(alpha, beta))
}

fn mi_unchecked(alpha: f64, beta: f64) -> f64 {
    let (a, b) = if alpha <= beta { (alpha, beta) } else { (beta, alpha) };
    let s = a + b;
    let psi_gap = |x: f64| digamma_positive(x) - x.ln();
    1.0 / s - psi_gap(s) + (a / s) * psi_gap(a) + (b / s) * psi_gap(b)
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Reference value of [`beta_bernoulli_mi`] by numerical integration:
/// `h_b(E[p]) - E[h_b(p)]`, with the expectation under `beta(alpha, beta)`
/// evaluated by adaptive Gauss-Kronrod quadrature. Shares no code with the
/// closed form (the normalizer uses `statrs`' log-gamma).
pub fn beta_bernoulli_mi_quadrature(alpha: f64, beta: f64) -> Result<f64> {
    BetaPosterior::new(alpha, beta)?;
    let ln_norm = ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta);
    let integrand = |p: f64| {
        let ln_density = ln_norm + (alpha - 1.0) * p.ln() + (beta - 1.0) * (-p).ln_1p();
        binary_entropy(p) * ln_density.exp()
    };
    let expected_entropy = integrate(integrand, 0.0, 1.0, 1e-13, 4000)?;
    Ok(binary_entropy(alpha / (alpha + beta)) - expected_entropy)
}

// 15-point Kronrod nodes on [-1, 1] (non-negative half) with the embedded
// 7-point Gauss rule on the odd-indexed nodes.
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Gauss-Kronrod 7/15 estimate of the integral over `[lo, hi]` and its error bound `|K15 - G7|`.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for (j, (&x, &w)) in KRONROD_NODES[..7].iter().zip(&KRONROD_WEIGHTS[..7]).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += GAUSS_WEIGHTS[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive quadrature: repeatedly bisects the interval with the
/// largest error estimate until the summed estimate drops below `tol`.
fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, max_intervals: usize) -> Result<f64> {
    let (value, error) = gauss_kronrod(&f, lo, hi);
    let mut pieces = vec![(lo, hi, value, error)];
    loop {
        let total_error: f64 = pieces.iter().map(|p| p.3).sum();
        if total_error <= tol {
            break;
        }
        if pieces.len() >= max_intervals {
            return Err(Error::Quadrature { estimate: total_error });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (a, b, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (lv, le) = gauss_kronrod(&f, a, mid);
        let (rv, re) = gauss_kronrod(&f, mid, b);
        pieces.push((a, mid, lv, le));
        pieces.push((mid, b, rv, re));
    }
    // Sum in position order so the result does not depend on refinement history.
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pieces.iter().map(|p| p.2).sum())
}

/// Expected information about `(theta, phi)` from taking `action` once.
///
/// Posteriors are independent across coordinates, so this is the beta-Bernoulli
/// mutual information of the one posterior the action informs.
pub fn info_gain(belief: &BeliefState, action: Action) -> f64 {
    let p = belief.posterior(action);
    mi_unchecked(p.alpha(), p.beta())
}

/// Information gain of every action, in ordinal order (arms, then queries).
pub fn info_gains(belief: &BeliefState) -> Vec<f64> {
    (0..belief.num_actions())
        .map(|ord| info_gain(belief, Action::from_ordinal(ord, belief.arms())))
        .collect()
}

/// Monte-Carlo estimate of `E[max_a r_a | belief]`, where
/// `r_a = phi_a theta_a + (1 - phi_a)(1 - theta_a)`.
///
/// Draws `samples` joint posterior samples of all `2N` unknowns and averages
/// the per-sample best arm reward.
pub fn estimate_optimal_reward<R: Rng + ?Sized>(belief: &BeliefState, samples: usize, rng: &mut R) -> Result<f64> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let mut best = vec![f64::NEG_INFINITY; samples];
    for (env, pref) in belief.env().iter().zip(belief.pref()) {
        let phi = env.sampler();
        let theta = pref.sampler();
        for slot in best.iter_mut() {
            let r = aligned_reward(phi.sample(rng), theta.sample(rng));
            if r > *slot {
                *slot = r;
            }
        }
    }
    Ok(best.iter().sum::<f64>() / samples as f64)
}

/// Expected one-step shortfall of each action against `r_star_hat`, in ordinal order.
///
/// Arm entries are clamped at zero; analytically `E[r*]` dominates every
/// arm's posterior reward, so negative values are Monte-Carlo noise.
pub fn expected_shortfalls(belief: &BeliefState, r_star_hat: f64) -> Vec<f64> {
    let arms = belief.arms();
    let mut out = Vec::with_capacity(2 * arms);
    out.extend((0..arms).map(|i| (r_star_hat - belief.expected_reward(i)).max(0.0)));
    out.extend(std::iter::repeat_n(r_star_hat + 1.0, arms));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::Observation;
    use crate::rng::{stream_rng, Stream};
    use proptest::prelude::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

    #[test]
    fn digamma_reference_values() {
        let cases = [
            (1.0, -EULER_GAMMA),
            (2.0, 1.0 - EULER_GAMMA),
            (0.5, -EULER_GAMMA - 2.0 * std::f64::consts::LN_2),
            // psi(n) = H_{n-1} - gamma
            (10.0, (1..10).map(|k| 1.0 / k as f64).sum::<f64>() - EULER_GAMMA),
            (5.0, 1.506_117_668_431_800_5),
            (0.2, -5.289_039_896_592_188),
            (123.4, 4.811_373_775_116_277_5),
        ];
        for (x, want) in cases {
            let got = digamma(x).unwrap();
            assert!((got - want).abs() < 1e-10, "psi({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn digamma_rejects_non_positive() {
        assert_eq!(digamma(0.0), Err(Error::NonPositiveArgument(0.0)));
        assert!(digamma(-1.5).is_err());
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn digamma_recurrence_across_threshold() {
        for i in 1..400 {
            let x = i as f64 * 0.037;
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() < 1e-10 * (1.0 + 1.0 / x), "x = {x}");
        }
    }

    #[test]
    fn mi_closed_form_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert!((beta_bernoulli_mi(1.0, 1.0).unwrap() - (ln2 - 0.5)).abs() < 1e-12);
        assert!((beta_bernoulli_mi(1.0, 1.0).unwrap() - 0.193_147_180_6).abs() < 1e-10);
        assert!((beta_bernoulli_mi(2.0, 2.0).unwrap() - 0.109_813_8).abs() < 1e-7);
        let m = beta_bernoulli_mi(1.0, 1.0).unwrap();
        assert!((0.125..=0.25).contains(&m));
        assert!(beta_bernoulli_mi(0.0, 1.0).is_err());
        assert!(beta_bernoulli_mi(1.0, -1.0).is_err());
    }

    #[test]
    fn mi_exact_for_uniform_prior_by_direct_integral() {
        // E[h_b(p)] under beta(1,1) is 2 * int_0^1 -p ln p dp = 1/2.
        let q = beta_bernoulli_mi_quadrature(1.0, 1.0).unwrap();
        assert!((q - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for (a, b) in [
            (1.0, 1.0),
            (5.0, 3.0),
            (50.0, 50.0),
            (0.5, 0.5),
            (0.6, 97.0),
            (64.0, 1.0),
        ] {
            let closed = beta_bernoulli_mi(a, b).unwrap();
            let quad = beta_bernoulli_mi_quadrature(a, b).unwrap();
            assert!((closed - quad).abs() < 1e-8, "({a},{b}): {closed} vs {quad}");
        }
        let m = beta_bernoulli_mi_quadrature(50.0, 50.0).unwrap();
        assert!((1.0 / 400.0..=1.0 / 200.0).contains(&m));
    }

    #[test]
    fn mi_is_symmetric() {
        for (a, b) in [(1.0, 2.0), (3.5, 0.7), (17.0, 4.0)] {
            assert_eq!(beta_bernoulli_mi(a, b), beta_bernoulli_mi(b, a));
        }
    }

    #[test]
    fn info_gain_examples() {
        let prior = BeliefState::prior(3).unwrap();
        for ord in 0..6 {
            let g = info_gain(&prior, Action::from_ordinal(ord, 3));
            assert!((g - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-12);
        }
        let mut b = prior.clone();
        b.set_env(1, BetaPosterior::new(2.0, 2.0).unwrap());
        assert!((info_gain(&b, Action::env(1)) - 0.109_813_8).abs() < 1e-7);
        assert_eq!(info_gains(&b).len(), 6);
    }

    #[test]
    fn first_observation_lowers_gain() {
        let prior = BeliefState::prior(1).unwrap();
        let before = info_gain(&prior, Action::env(0));
        for o in [Observation::Zero, Observation::One] {
            let after = info_gain(&prior.clone().applied(Action::env(0), o), Action::env(0));
            assert!(after < before);
        }
    }

    #[test]
    fn optimal_reward_single_arm_prior() {
        let b = BeliefState::prior(1).unwrap();
        let m = 4096;
        let est = estimate_optimal_reward(&b, m, &mut stream_rng(1, Stream::Agent)).unwrap();
        assert!((est - 0.5).abs() < 2.0 / (m as f64).sqrt(), "{est}");
        assert_eq!(
            estimate_optimal_reward(&b, 0, &mut stream_rng(1, Stream::Agent)),
            Err(Error::NoSamples)
        );
    }

    #[test]
    fn optimal_reward_concentrated_arm() {
        let mut b = BeliefState::prior(4).unwrap();
        let sure = BetaPosterior::new(1e6, 1.0).unwrap();
        b.set_env(0, sure);
        b.set_pref(0, sure);
        let est = estimate_optimal_reward(&b, 512, &mut stream_rng(2, Stream::Agent)).unwrap();
        assert!((est - 1.0).abs() < 0.01, "{est}");
    }

    #[test]
    fn optimal_reward_is_reproducible() {
        let b = BeliefState::prior(16).unwrap();
        let x = estimate_optimal_reward(&b, 64, &mut stream_rng(3, Stream::Agent)).unwrap();
        let y = estimate_optimal_reward(&b, 64, &mut stream_rng(3, Stream::Agent)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn improving_an_arm_does_not_lower_the_estimate() {
        let base = BeliefState::prior(4).unwrap();
        let mut better = base.clone();
        better.set_env(0, BetaPosterior::new(50.0, 1.0).unwrap());
        better.set_pref(0, BetaPosterior::new(50.0, 1.0).unwrap());
        let m = 20_000;
        let lo = estimate_optimal_reward(&base, m, &mut stream_rng(4, Stream::Agent)).unwrap();
        let hi = estimate_optimal_reward(&better, m, &mut stream_rng(4, Stream::Agent)).unwrap();
        assert!(hi >= lo - 3.0 / (m as f64).sqrt(), "{hi} < {lo}");
    }

    #[test]
    fn shortfall_examples() {
        let b = BeliefState::prior(1).unwrap();
        assert_eq!(expected_shortfalls(&b, 0.5), vec![0.0, 1.5]);
        // Arm reward equal to r_star_hat gives zero; noise below it clamps to zero.
        assert_eq!(expected_shortfalls(&b, 0.49)[0], 0.0);
        let s = expected_shortfalls(&BeliefState::prior(4).unwrap(), 0.7);
        assert!(s[..4].iter().all(|&d| (0.0..=1.0).contains(&d)));
        assert!(s[4..].iter().all(|&d| (1.0..=2.0).contains(&d)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mi_within_bounds(a in 1u32..=200, b in 1u32..=200) {
            let (a, b) = (a as f64, b as f64);
            let m = beta_bernoulli_mi(a, b).unwrap();
            prop_assert!(m >= 1.0 / (4.0 * (a + b)));
            prop_assert!(m <= 1.0 / (2.0 * (a + b)));
        }

        #[test]
        fn mi_positive_for_real_parameters(a in 0.05f64..500.0, b in 0.05f64..500.0) {
            prop_assert!(beta_bernoulli_mi(a, b).unwrap() > 0.0);
        }
    }
}
