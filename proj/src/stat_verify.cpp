#include "flashsample/stat_verify.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "flashsample/errors.hpp"

namespace flashsample::stats {

namespace {

constexpr int kMaxIterations = 1000;
constexpr double kEps = 1e-16;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by modified Lentz.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_p needs a > 0");
  if (x < 0.0 || std::isnan(x)) throw DomainError("gamma_p needs x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double chi2_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi-squared dof must be positive");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probability must be in (0, 1)");
  if (!(dof > 0.0)) throw DomainError("chi-squared dof must be positive");
  double lo = 0.0;
  double hi = std::max(1.0, dof);
  while (chi2_cdf(hi, dof) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void to_json(nlohmann::json& j, const GofReport& r) {
  j = nlohmann::json{{"statistic", r.statistic},   {"dof", r.dof},
                     {"threshold", r.threshold},   {"alpha", r.alpha},
                     {"pass", r.pass},             {"merged_bins", r.merged_bins},
                     {"samples", r.samples},       {"support_violations", r.support_violations}};
}

GofReport chi_squared_gof(std::span<const std::uint64_t> counts, std::span<const double> probs, double alpha) {
  if (counts.size() != probs.size()) {
    throw ShapeError("counts has " + std::to_string(counts.size()) + " bins, probs has " +
                     std::to_string(probs.size()));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("alpha must be in (0, 1)");
  const std::uint64_t n = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (n == 0) throw ContractError("no observations");
  double mass = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ContractError("negative or NaN probability");
    mass += p;
  }
  if (std::fabs(mass - 1.0) > 1e-9) throw ContractError("probabilities sum to " + std::to_string(mass));

  GofReport report;
  report.alpha = alpha;
  report.samples = n;

  struct Bin {
    double observed = 0.0;
    double expected = 0.0;
  };
  std::vector<Bin> bins;
  Bin open;
  std::size_t open_members = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] == 0.0) {
      report.support_violations += counts[i];
      continue;
    }
    ++used;
    open.observed += static_cast<double>(counts[i]);
    open.expected += probs[i] * static_cast<double>(n);
    ++open_members;
    if (open.expected >= kMinExpectedCount) {
      bins.push_back(open);
      open = {};
      open_members = 0;
    }
  }
  if (open_members > 0) {
    if (bins.empty()) {
      bins.push_back(open);
    } else {
      bins.back().observed += open.observed;
      bins.back().expected += open.expected;
    }
  }
  report.merged_bins = used - bins.size();

  if (report.support_violations > 0) {
    report.statistic = std::numeric_limits<double>::infinity();
    report.dof = bins.size() > 0 ? bins.size() - 1 : 0;
    report.threshold = report.dof > 0 ? chi2_quantile(1.0 - alpha, static_cast<double>(report.dof)) : 0.0;
    report.pass = false;
    return report;
  }

  for (const Bin& b : bins) {
    const double diff = b.observed - b.expected;
    report.statistic += diff * diff / b.expected;
  }
  report.dof = bins.size() - 1;
  if (report.dof == 0) {
    // One bin after merging carries no information.
    report.statistic = 0.0;
    report.threshold = 0.0;
    report.pass = true;
    return report;
  }
  report.threshold = chi2_quantile(1.0 - alpha, static_cast<double>(report.dof));
  report.pass = report.statistic <= report.threshold;
  return report;
}

GofReport empirical_check(const SamplerFn& sampler, const LogitsRow& row, const TransformSpec& t, std::size_t n,
                          double alpha, RngKey key) {
  if (n < 1000) throw ContractError("empirical_check needs at least 1000 samples, got " + std::to_string(n));
  const std::vector<double> probs = exact_probabilities(apply_transform(row, t));
  const std::vector<std::size_t> draws = sampler(row, t, key, n);
  if (draws.size() != n) throw ContractError("sampler returned " + std::to_string(draws.size()) + " draws");

  std::vector<std::uint64_t> counts(row.size(), 0);
  std::uint64_t out_of_range = 0;
  for (std::size_t z : draws) {
    if (z >= row.size()) {
      ++out_of_range;
    } else {
      ++counts[z];
    }
  }
  if (out_of_range > 0) {
    GofReport r;
    r.alpha = alpha;
    r.samples = n;
    r.statistic = std::numeric_limits<double>::infinity();
    r.support_violations = out_of_range;
    r.pass = false;
    return r;
  }
  return chi_squared_gof(counts, probs, alpha);
}

RngKey independent_key(RngKey key) noexcept {
  // splitmix64 finalizer
  std::uint64_t z = key.seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return RngKey{z ^ (z >> 31)};
}

std::string describe(const PathwiseDivergence& d) {
  std::ostringstream os;
  os.precision(17);
  os << "row " << d.row << " tiling(vocab=" << d.tiling.vocab_tile << ", batch=" << d.tiling.batch_tile
     << ", k=" << d.tiling.k_tile << "): fused " << d.fused_index << " (score " << d.fused_score << ") vs oracle "
     << d.oracle_index << " (score " << d.oracle_score << ")";
  return os.str();
}

PathwiseReport pathwise_equivalence_check(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t,
                                          RngKey key, std::span<const TilingConfig> tilings, const Stage2Fn& stage2) {
  if (tilings.empty()) throw ContractError("pathwise check needs at least one tiling");
  const Matrix<double> logits = naive_logits(h, w);
  std::vector<std::size_t> oracle(h.batch());
  for (std::size_t b = 0; b < h.batch(); ++b) {
    oracle[b] = streaming_gumbel_max(logits.row(b), t, key, static_cast<std::uint32_t>(b)).index;
  }
  auto score = [&](std::size_t b, std::size_t i) {
    return t.apply(logits(b, i), i) + token_gumbel(key, static_cast<std::uint32_t>(b), i);
  };

  PathwiseReport report;
  for (const TilingConfig& cfg : tilings) {
    std::vector<std::size_t> fused(h.batch());
    if (stage2) {
      const Stage1Output s1 = stage1_tile_candidates(h, w, t, key, cfg, FusedOptions{});
      for (std::size_t b = 0; b < h.batch(); ++b) {
        const auto r = stage2(s1.candidates.row(b));
        if (!r) throw UndefinedDistributionError("stage 2 found no candidate");
        fused[b] = r->index;
      }
    } else {
      const FusedOutput out = fused_matmul_sample(h, w, t, key, cfg);
      for (std::size_t b = 0; b < h.batch(); ++b) fused[b] = out.samples[b].index;
    }
    for (std::size_t b = 0; b < h.batch(); ++b) {
      ++report.comparisons;
      if (fused[b] == oracle[b]) continue;
      if (report.equivalent) {
        report.first_divergence =
            PathwiseDivergence{b, cfg, fused[b], oracle[b], score(b, fused[b]), score(b, oracle[b])};
      }
      report.equivalent = false;
    }
  }
  return report;
}

void to_json(nlohmann::json& j, const MaxStabilityReport& r) {
  j = nlohmann::json{{"log_mass", r.log_mass},
                     {"trials", r.trials},
                     {"mean", r.mean},
                     {"variance", r.variance},
                     {"expected_mean", r.expected_mean},
                     {"expected_variance", kGumbelVariance},
                     {"mean_tolerance", r.mean_tolerance},
                     {"variance_tolerance", r.variance_tolerance},
                     {"mean_pass", r.mean_pass},
                     {"variance_pass", r.variance_pass},
                     {"pass", r.pass}};
}

MaxStabilityReport max_stability_check(std::span<const double> group_logits, RngKey key, std::size_t trials) {
  if (trials < 10000) throw ContractError("max-stability needs at least 10^4 trials");
  if (trials > std::numeric_limits<std::uint32_t>::max()) throw ContractError("too many trials");
  MaxStabilityReport r;
  r.log_mass = logsumexp(group_logits);
  if (r.log_mass == kNegInf) throw ContractError("group has no finite logit");
  r.trials = trials;

  // Welford
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < trials; ++j) {
    double best = kNegInf;
    for (std::size_t i = 0; i < group_logits.size(); ++i) {
      if (group_logits[i] == kNegInf) continue;
      best = std::max(best, group_logits[i] + token_gumbel(key, static_cast<std::uint32_t>(j), i));
    }
    const double delta = best - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (best - mean);
  }
  const double n = static_cast<double>(trials);
  r.mean = mean;
  r.variance = m2 / (n - 1.0);
  r.expected_mean = r.log_mass + kEulerGamma;
  r.mean_tolerance = 3.0 * std::sqrt(kGumbelVariance / n);
  r.variance_tolerance = 3.0 * kGumbelVariance * std::sqrt((kGumbelKurtosis - 1.0) / n);
  r.mean_pass = std::fabs(r.mean - r.expected_mean) <= r.mean_tolerance;
  r.variance_pass = std::fabs(r.variance - kGumbelVariance) <= r.variance_tolerance;
  r.pass = r.mean_pass && r.variance_pass;
  return r;
}

}  // namespace flashsample::stats
