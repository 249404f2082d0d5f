#include "flashsample/workload.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "flashsample/errors.hpp"
#include "flashsample/grouped.hpp"

namespace flashsample {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::pair<std::string_view, Enum> (&table)[N], const char* what) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  std::string options;
  for (const auto& [name, value] : table) options += (options.empty() ? "" : ", ") + std::string(name);
  throw ContractError("unknown " + std::string(what) + " '" + std::string(text) + "' (expected one of " + options + ")");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::pair<std::string_view, LogitPattern> kPatterns[] = {{"uniform", LogitPattern::Uniform},
                                                                   {"gaussian", LogitPattern::Gaussian},
                                                                   {"ramp", LogitPattern::Ramp},
                                                                   {"one-dominant", LogitPattern::OneDominant}};

constexpr std::pair<std::string_view, SamplerKind> kSamplers[] = {
    {"baseline", SamplerKind::Baseline},
    {"streaming", SamplerKind::Streaming},
    {"fused", SamplerKind::Fused},
    {"grouped-parallel", SamplerKind::GroupedParallel},
    {"grouped-online", SamplerKind::GroupedOnline},
    {"distributed", SamplerKind::Distributed}};

constexpr std::pair<std::string_view, ReduceMode> kReduce[] = {{"gather", ReduceMode::Gather},
                                                               {"tree", ReduceMode::Tree}};

constexpr std::pair<std::string_view, ExchangeMode> kExchange[] = {{"summaries", ExchangeMode::Summaries},
                                                                   {"naive", ExchangeMode::NaiveLogits}};

// Box-Muller on mt19937_64 so the stream is the same on every standard library.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}
  double operator()() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = unit();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

 private:
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace

std::string_view to_string(LogitPattern p) { return enum_name(p, kPatterns); }
LogitPattern parse_logit_pattern(std::string_view text) { return parse_enum(text, kPatterns, "logit pattern"); }
std::string_view to_string(SamplerKind k) { return enum_name(k, kSamplers); }
SamplerKind parse_sampler_kind(std::string_view text) { return parse_enum(text, kSamplers, "sampler"); }
std::string_view to_string(ReduceMode m) { return enum_name(m, kReduce); }
ReduceMode parse_reduce_mode(std::string_view text) { return parse_enum(text, kReduce, "reduce mode"); }
std::string_view to_string(ExchangeMode m) { return enum_name(m, kExchange); }
ExchangeMode parse_exchange_mode(std::string_view text) { return parse_enum(text, kExchange, "exchange mode"); }

void WorkloadConfig::validate() const {
  if (batch == 0 || vocab == 0 || dim == 0) throw ContractError("B, V and D must be >= 1");
  if (vocab > std::numeric_limits<std::uint32_t>::max()) throw ContractError("V must fit in 32 bits");
  tiling.validate();
  if (group_size == 0) throw ContractError("group size must be >= 1");
  if (world_size == 0) throw ContractError("world size must be >= 1");
  for (std::size_t i : banned) {
    if (i >= vocab) throw ContractError("banned index " + std::to_string(i) + " >= V");
  }
  (void)transform();  // temperature check
}

TransformSpec WorkloadConfig::transform() const {
  TransformSpec t;
  t.with_temperature(temperature);
  if (bias_scale != 0.0) {
    std::vector<double> bias(vocab);
    for (std::size_t i = 0; i < vocab; ++i) bias[i] = bias_scale * std::sin(static_cast<double>(i));
    t.with_bias(std::move(bias));
  }
  if (!banned.empty()) t.with_banned(banned);
  return t;
}

void apply_preset(WorkloadConfig& cfg, std::string_view preset) {
  if (preset == "qwen3-small") {
    cfg.vocab = 151936;
    cfg.dim = 4096;
  } else if (preset == "large") {
    cfg.vocab = 131072;
    cfg.dim = 8192;
  } else {
    throw ContractError("unknown preset '" + std::string(preset) + "' (expected qwen3-small or large)");
  }
}

void apply_json_config(WorkloadConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ContractError("config must be a JSON object");
  // preset first so explicit shapes override it
  if (j.contains("preset")) apply_preset(cfg, j.at("preset").get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    if (key == "B") cfg.batch = value.get<std::size_t>();
    else if (key == "V") cfg.vocab = value.get<std::size_t>();
    else if (key == "D") cfg.dim = value.get<std::size_t>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "pattern") cfg.pattern = parse_logit_pattern(value.get<std::string>());
    else if (key == "precision") cfg.precision = parse_precision(value.get<std::string>());
    else if (key == "temperature") cfg.temperature = value.get<double>();
    else if (key == "bias_scale") cfg.bias_scale = value.get<double>();
    else if (key == "banned") cfg.banned = value.get<std::vector<std::size_t>>();
    else if (key == "sampler") cfg.sampler = parse_sampler_kind(value.get<std::string>());
    else if (key == "vocab_tile") cfg.tiling.vocab_tile = value.get<std::size_t>();
    else if (key == "batch_tile") cfg.tiling.batch_tile = value.get<std::size_t>();
    else if (key == "k_tile") cfg.tiling.k_tile = value.get<std::size_t>();
    else if (key == "group_size") cfg.group_size = value.get<std::size_t>();
    else if (key == "world_size") cfg.world_size = value.get<std::size_t>();
    else if (key == "reduce") cfg.reduce = parse_reduce_mode(value.get<std::string>());
    else if (key == "exchange") cfg.exchange = parse_exchange_mode(value.get<std::string>());
    else if (key == "gumbel_mode") cfg.gumbel_mode = parse_gumbel_mode(value.get<std::string>());
    else if (key == "threads") cfg.threads = value.get<unsigned>();
    else throw ContractError("unknown config key '" + key + "'");
  }
}

nlohmann::json to_json(const WorkloadConfig& cfg) {
  return nlohmann::json{{"B", cfg.batch},
                        {"V", cfg.vocab},
                        {"D", cfg.dim},
                        {"seed", cfg.seed},
                        {"pattern", to_string(cfg.pattern)},
                        {"precision", to_string(cfg.precision)},
                        {"temperature", cfg.temperature},
                        {"bias_scale", cfg.bias_scale},
                        {"banned", cfg.banned},
                        {"sampler", to_string(cfg.sampler)},
                        {"vocab_tile", cfg.tiling.vocab_tile},
                        {"batch_tile", cfg.tiling.batch_tile},
                        {"k_tile", cfg.tiling.k_tile},
                        {"group_size", cfg.group_size},
                        {"world_size", cfg.world_size},
                        {"reduce", to_string(cfg.reduce)},
                        {"exchange", to_string(cfg.exchange)},
                        {"gumbel_mode", to_string(cfg.gumbel_mode)}};
}

std::vector<double> pattern_logits(LogitPattern p, std::size_t vocab) {
  std::vector<double> out(vocab, 0.0);
  switch (p) {
    case LogitPattern::Uniform:
    case LogitPattern::Gaussian:
      break;
    case LogitPattern::Ramp:
      // 0 .. 4 across the row
      for (std::size_t i = 0; i < vocab; ++i) {
        out[i] = vocab > 1 ? 4.0 * static_cast<double>(i) / static_cast<double>(vocab - 1) : 0.0;
      }
      break;
    case LogitPattern::OneDominant:
      out[0] = 5.0;
      break;
  }
  return out;
}

Workload generate_synthetic(const WorkloadConfig& cfg) {
  cfg.validate();
  Gaussian rng(cfg.seed);
  Matrix<float> h(cfg.batch, cfg.dim);
  for (float& x : h.data()) x = static_cast<float>(rng());
  Matrix<float> w(cfg.vocab, cfg.dim);
  if (cfg.pattern == LogitPattern::Gaussian) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
    for (float& x : w.data()) x = static_cast<float>(rng() * scale);
  } else {
    const std::vector<double> row = pattern_logits(cfg.pattern, cfg.vocab);
    for (std::size_t b = 0; b < cfg.batch; ++b) h(b, 0) = 1.0f;
    for (std::size_t i = 0; i < cfg.vocab; ++i) w(i, 0) = static_cast<float>(row[i]);
  }
  return {HiddenStates(std::move(h)), LmHeadWeights(std::move(w), cfg.precision)};
}

SamplerRun run_sampler(const WorkloadConfig& cfg, const Workload& work, RngKey key) {
  cfg.validate();
  const HiddenStates& h = work.h;
  const LmHeadWeights& w = work.w;
  if (w.vocab() != cfg.vocab || h.batch() != cfg.batch || h.dim() != cfg.dim) {
    throw ShapeError("workload does not match its config");
  }
  const TransformSpec t = cfg.transform();
  SamplerRun run;

  switch (cfg.sampler) {
    case SamplerKind::Baseline: {
      FusedOutput out = baseline_matmul_sample(h, w, t, key);
      run.samples = std::move(out.samples);
      run.ledger = out.ledger;
      return run;
    }
    case SamplerKind::Fused: {
      FusedOptions opts;
      opts.with_log_normalizer = true;
      opts.gumbel_mode = cfg.gumbel_mode;
      opts.threads = cfg.threads;
      FusedOutput out = fused_matmul_sample(h, w, t, key, cfg.tiling, opts);
      run.samples = std::move(out.samples);
      run.ledger = out.ledger;
      return run;
    }
    case SamplerKind::Distributed: {
      DistributedOptions opts;
      opts.tiling = cfg.tiling;
      opts.reduce = cfg.reduce;
      opts.exchange = cfg.exchange;
      opts.threads = cfg.threads;
      DistributedOutput out = run_distributed_sample(h, w, t, key, cfg.world_size, opts);
      run.samples = std::move(out.samples);
      run.ledger = out.ledger;
      run.transport = std::move(out.transport);
      return run;
    }
    case SamplerKind::Streaming:
    case SamplerKind::GroupedParallel:
    case SamplerKind::GroupedOnline:
      break;
  }

  const Matrix<double> logits = naive_logits(h, w);
  const std::uint64_t eb = w.element_bytes();
  const std::uint64_t bv = static_cast<std::uint64_t>(cfg.batch) * cfg.vocab * eb;
  run.ledger.w_read_bytes = static_cast<std::uint64_t>(cfg.vocab) * cfg.dim * eb;
  run.ledger.h_read_bytes = static_cast<std::uint64_t>(cfg.batch) * cfg.dim * eb;
  run.ledger.logits_write_bytes = bv;
  run.ledger.logits_read_bytes = bv;
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    const auto row = logits.row(b);
    const auto rb = static_cast<std::uint32_t>(b);
    if (cfg.sampler == SamplerKind::Streaming) {
      run.samples.push_back(streaming_gumbel_max(row, t, key, rb, {true, cfg.gumbel_mode}));
    } else if (cfg.sampler == SamplerKind::GroupedParallel) {
      run.samples.push_back(parallel_group_sample(row, t, key, cfg.group_size, rb, cfg.threads));
    } else {
      run.samples.push_back(online_group_sample(row, t, key, cfg.group_size, rb));
    }
  }
  return run;
}

}  // namespace flashsample
