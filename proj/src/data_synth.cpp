#include "mlproxy/data_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlproxy/error.hpp"
#include "mlproxy/random.hpp"

namespace mlproxy {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, field + ": " + why);
}

RealVec random_unit(Rng& rng, std::size_t dim) {
  RealVec v(dim);
  do {
    for (double& x : v) x = rng.normal();
  } while (l2_norm(v) < 1e-6);
  return l2_normalize(v).unit;
}

// Probability of every non-empty label bitmask under the log-linear pattern
// model, with per-class factors fitted by iterative proportional scaling so
// that P(y_j = 1) matches target[j].
std::vector<double> fit_pattern_distribution(const std::vector<double>& target,
                                             const std::vector<std::vector<double>>& boost) {
  const std::size_t c = target.size();
  const std::size_t n_patterns = std::size_t{1} << c;
  std::vector<double> log_theta(c);
  for (std::size_t j = 0; j < c; ++j) log_theta[j] = std::log(target[j] / (1.0 - target[j]));

  // Pairwise part is fixed; precompute it.
  std::vector<double> log_pair(n_patterns, 0.0);
  for (std::size_t s = 1; s < n_patterns; ++s) {
    for (std::size_t j = 0; j < c; ++j) {
      if (!((s >> j) & 1U)) continue;
      for (std::size_t k = j + 1; k < c; ++k) {
        if ((s >> k) & 1U) log_pair[s] += std::log(boost[j][k]);
      }
    }
  }

  std::vector<double> prob(n_patterns, 0.0);
  auto recompute = [&] {
    double peak = -INFINITY;
    for (std::size_t s = 1; s < n_patterns; ++s) {
      double lw = log_pair[s];
      for (std::size_t j = 0; j < c; ++j) {
        if ((s >> j) & 1U) lw += log_theta[j];
      }
      prob[s] = lw;
      peak = std::max(peak, lw);
    }
    double total = 0.0;
    prob[0] = 0.0;
    for (std::size_t s = 1; s < n_patterns; ++s) total += (prob[s] = std::exp(prob[s] - peak));
    for (std::size_t s = 1; s < n_patterns; ++s) prob[s] /= total;
  };
  auto marginal = [&](std::size_t j) {
    double m = 0.0;
    for (std::size_t s = 1; s < n_patterns; ++s) {
      if ((s >> j) & 1U) m += prob[s];
    }
    return m;
  };

  constexpr int kMaxSweeps = 20000;
  constexpr double kTolerance = 1e-13;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    recompute();
    double worst = 0.0;
    for (std::size_t j = 0; j < c; ++j) worst = std::max(worst, std::abs(marginal(j) - target[j]));
    if (worst < kTolerance) return prob;
    for (std::size_t j = 0; j < c; ++j) {
      recompute();
      const double m = marginal(j);
      log_theta[j] += std::log(target[j] / (1.0 - target[j])) - std::log(m / (1.0 - m));
    }
  }
  invalid("prevalence", "could not fit label model to the requested prevalences and boosts");
}

std::size_t draw_pattern(Rng& rng, const std::vector<double>& cdf) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto s = static_cast<std::size_t>(it - cdf.begin());
  return std::min(s, cdf.size() - 1);
}

std::string sample_id(std::size_t index, std::size_t n) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::max<std::size_t>(6, std::to_string(n).size());
  return "s" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

SynthConfig SynthConfig::resolved() const {
  SynthConfig out = *this;
  const std::size_t c = n_classes;
  if (out.prevalence.empty()) {
    out.prevalence.resize(c);
    for (std::size_t j = 0; j < c; ++j) {
      out.prevalence[j] = c == 1 ? 0.3 : 0.30 - 0.15 * static_cast<double>(j) / static_cast<double>(c - 1);
    }
  }
  if (out.cooccurrence_boost.empty()) {
    out.cooccurrence_boost.assign(c, std::vector<double>(c, 1.0));
    if (c >= 2) out.cooccurrence_boost[0][1] = out.cooccurrence_boost[1][0] = 3.0;
  }
  return out;
}

void SynthConfig::validate() const {
  const SynthConfig cfg = resolved();
  if (cfg.n_classes == 0) invalid("n_classes", "must be at least 1");
  if (cfg.n_classes > kMaxSynthClasses) {
    invalid("n_classes", "at most " + std::to_string(kMaxSynthClasses) + " classes supported");
  }
  if (cfg.input_dim == 0) invalid("input_dim", "must be at least 1");
  if (cfg.modes_per_class == 0) invalid("modes_per_class", "must be at least 1");
  if (!(cfg.noise_std > 0.0) || !std::isfinite(cfg.noise_std)) invalid("noise_std", "must be positive");
  if (!(cfg.negative_fraction >= 0.0 && cfg.negative_fraction < 1.0)) {
    invalid("negative_fraction", "must lie in [0, 1)");
  }
  if (!(cfg.uncertain_fraction >= 0.0 && cfg.uncertain_fraction < 1.0)) {
    invalid("uncertain_fraction", "must lie in [0, 1)");
  }
  if (cfg.prevalence.size() != cfg.n_classes) invalid("prevalence", "length must equal n_classes");
  double conditional_sum = 0.0;
  for (std::size_t j = 0; j < cfg.n_classes; ++j) {
    const double p = cfg.prevalence[j];
    if (!(p > 0.0 && p < 1.0)) {
      invalid("prevalence", "entry " + std::to_string(j) + " = " + std::to_string(p) +
                                " is outside (0, 1)");
    }
    const double q = p / (1.0 - cfg.negative_fraction);
    if (!(q < 1.0)) {
      invalid("prevalence", "entry " + std::to_string(j) + " must be below 1 - negative_fraction");
    }
    conditional_sum += q;
  }
  if (!(conditional_sum > 1.0)) {
    invalid("prevalence",
            "sum of prevalences must exceed 1 - negative_fraction so that every non-negative "
            "sample can carry a positive label");
  }
  if (cfg.cooccurrence_boost.size() != cfg.n_classes) {
    invalid("cooccurrence_boost", "must be n_classes x n_classes");
  }
  for (std::size_t j = 0; j < cfg.n_classes; ++j) {
    if (cfg.cooccurrence_boost[j].size() != cfg.n_classes) {
      invalid("cooccurrence_boost", "must be n_classes x n_classes");
    }
    for (std::size_t k = 0; k < cfg.n_classes; ++k) {
      const double b = cfg.cooccurrence_boost[j][k];
      if (!(b > 0.0) || !std::isfinite(b)) invalid("cooccurrence_boost", "entries must be positive");
      if (j != k && b != cfg.cooccurrence_boost[k][j]) {
        invalid("cooccurrence_boost", "matrix must be symmetric");
      }
    }
  }
}

SynthOutput generate_with_truth(const SynthConfig& raw_config) {
  raw_config.validate();
  const SynthConfig cfg = raw_config.resolved();
  const std::size_t c = cfg.n_classes;

  std::vector<double> conditional(c);
  for (std::size_t j = 0; j < c; ++j) conditional[j] = cfg.prevalence[j] / (1.0 - cfg.negative_fraction);

  SynthOutput out;
  out.truth.pattern_probability = fit_pattern_distribution(conditional, cfg.cooccurrence_boost);
  std::vector<double> cdf(out.truth.pattern_probability.size());
  std::partial_sum(out.truth.pattern_probability.begin(), out.truth.pattern_probability.end(), cdf.begin());

  Rng proto_rng(derive_seed(cfg.seed, 0));
  out.truth.prototypes.resize(c);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t k = 0; k < cfg.modes_per_class; ++k) {
      out.truth.prototypes[j].push_back(random_unit(proto_rng, cfg.input_dim));
    }
  }
  out.truth.healthy = random_unit(proto_rng, cfg.input_dim);

  Rng rng(derive_seed(cfg.seed, 1));
  Dataset& data = out.data;
  data.n_classes = c;
  data.input_dim = cfg.input_dim;
  data.rows.reserve(cfg.n_samples);
  for (std::size_t n = 0; n < cfg.n_samples; ++n) {
    Sample sample;
    sample.id = sample_id(n, cfg.n_samples);
    std::vector<LabelState> states(c, LabelState::Negative);
    RealVec features(cfg.input_dim, 0.0);
    if (rng.bernoulli(cfg.negative_fraction)) {
      features = out.truth.healthy;
    } else {
      const std::size_t pattern = draw_pattern(rng, cdf);
      for (std::size_t j = 0; j < c; ++j) {
        if (!((pattern >> j) & 1U)) continue;
        states[j] = rng.bernoulli(cfg.uncertain_fraction) ? LabelState::Uncertain : LabelState::Positive;
        const RealVec& proto = out.truth.prototypes[j][rng.index(cfg.modes_per_class)];
        for (std::size_t k = 0; k < cfg.input_dim; ++k) features[k] += proto[k];
      }
    }
    for (double& x : features) x += cfg.noise_std * rng.normal();
    sample.features = std::move(features);
    sample.labels = LabelVector(std::move(states));
    data.rows.push_back(std::move(sample));
  }
  return out;
}

Dataset generate(const SynthConfig& config) { return generate_with_truth(config).data; }

}  // namespace mlproxy
