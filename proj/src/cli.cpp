#include "flashsample/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "flashsample/bench.hpp"
#include "flashsample/cost_model.hpp"
#include "flashsample/distributed.hpp"
#include "flashsample/errors.hpp"
#include "flashsample/matrix_io.hpp"
#include "flashsample/stat_verify.hpp"
#include "flashsample/suites.hpp"
#include "flashsample/workload.hpp"

namespace flashsample {

namespace {

enum class Format { Human, Json, Csv };

struct Globals {
  std::string format = "human";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string config_path;
  std::string output_path;
};

// String mirrors of the enum fields so CLI11 can bind them.
struct WorkloadFlags {
  std::string pattern;
  std::string precision;
  std::string sampler;
  std::string reduce;
  std::string exchange;
  std::string gumbel_mode;
  std::string preset;
  std::string weights_path;
  std::string save_weights_path;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// Config file is read before the flags are declared so its values become the
// flag defaults and explicit flags still win.
std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

void add_workload_flags(CLI::App* cmd, WorkloadConfig& cfg, WorkloadFlags& flags) {
  cmd->add_option("--B", cfg.batch, "batch size")->capture_default_str();
  cmd->add_option("--V", cfg.vocab, "vocabulary size")->capture_default_str();
  cmd->add_option("--D", cfg.dim, "hidden dimension")->capture_default_str();
  cmd->add_option("--preset", flags.preset, "shape preset: qwen3-small | large");
  cmd->add_option("--pattern", flags.pattern, "uniform | gaussian | ramp | one-dominant")->capture_default_str();
  cmd->add_option("--precision", flags.precision, "bf16 | fp32")->capture_default_str();
  cmd->add_option("--temperature", cfg.temperature, "temperature > 0")->capture_default_str();
  cmd->add_option("--bias-scale", cfg.bias_scale, "bias_i = scale * sin(i); 0 disables")->capture_default_str();
  cmd->add_option("--ban", cfg.banned, "banned token indices")->delimiter(',');
  cmd->add_option("--sampler", flags.sampler,
                  "baseline | streaming | fused | grouped-parallel | grouped-online | distributed")
      ->capture_default_str();
  cmd->add_option("--vocab-tile", cfg.tiling.vocab_tile, "vocabulary tile")->capture_default_str();
  cmd->add_option("--batch-tile", cfg.tiling.batch_tile, "batch tile")->capture_default_str();
  cmd->add_option("--k-tile", cfg.tiling.k_tile, "inner-dimension chunk")->capture_default_str();
  cmd->add_option("--group-size", cfg.group_size, "group size for grouped samplers")->capture_default_str();
  cmd->add_option("--world-size,--n", cfg.world_size, "ranks for the distributed sampler")->capture_default_str();
  cmd->add_option("--reduce", flags.reduce, "gather | tree")->capture_default_str();
  cmd->add_option("--exchange", flags.exchange, "summaries | naive")->capture_default_str();
  cmd->add_option("--weights", flags.weights_path, "load W from a binary matrix file (sets V and D)");
  cmd->add_option("--save-weights", flags.save_weights_path, "write the W used to a binary matrix file");
}

void finish_workload(WorkloadConfig& cfg, const WorkloadFlags& flags, const Globals& g) {
  if (!flags.preset.empty()) apply_preset(cfg, flags.preset);
  cfg.pattern = parse_logit_pattern(flags.pattern);
  cfg.precision = parse_precision(flags.precision);
  cfg.sampler = parse_sampler_kind(flags.sampler);
  cfg.reduce = parse_reduce_mode(flags.reduce);
  cfg.exchange = parse_exchange_mode(flags.exchange);
  cfg.gumbel_mode = parse_gumbel_mode(flags.gumbel_mode);
  cfg.seed = g.seed;
  cfg.threads = g.threads;
}

Workload load_workload(WorkloadConfig& cfg, const WorkloadFlags& flags) {
  std::optional<Matrix<float>> loaded;
  if (!flags.weights_path.empty()) {
    loaded = io::read_matrix_bin(std::filesystem::path(flags.weights_path));
    cfg.vocab = loaded->rows();
    cfg.dim = loaded->cols();
  }
  Workload work = generate_synthetic(cfg);
  if (loaded) work.w = LmHeadWeights(std::move(*loaded), cfg.precision);
  if (!flags.save_weights_path.empty()) {
    io::write_matrix_bin(std::filesystem::path(flags.save_weights_path), work.w.values());
  }
  return work;
}

nlohmann::json transport_json(const TransportStats& s, std::size_t rows) {
  return {{"messages", s.messages_sent},
          {"total_bytes", s.total_bytes},
          {"bytes_per_row", rows > 0 ? s.total_bytes / rows : 0},
          {"per_rank_bytes", s.per_rank_bytes}};
}

void print_ledger(std::ostream& os, const TrafficLedger& l) {
  os << "  W read            " << l.w_read_bytes << " B\n"
     << "  H read            " << l.h_read_bytes << " B\n"
     << "  candidates write  " << l.candidate_write_bytes << " B\n"
     << "  candidates read   " << l.candidate_read_bytes << " B\n"
     << "  [B,V] logits write " << l.logits_write_bytes << " B\n"
     << "  [B,V] logits read  " << l.logits_read_bytes << " B\n"
     << "  total             " << l.total_bytes() << " B\n";
}

int cmd_sample(const WorkloadConfig& cfg_in, const WorkloadFlags& flags, Format format, std::ostream& os) {
  WorkloadConfig cfg = cfg_in;
  const Workload work = load_workload(cfg, flags);
  const SamplerRun run = run_sampler(cfg, work, RngKey{cfg.seed});

  if (format == Format::Json) {
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t b = 0; b < run.samples.size(); ++b) {
      nlohmann::json s{{"row", b}, {"index", run.samples[b].index}};
      s["log_normalizer"] = run.samples[b].log_normalizer ? nlohmann::json(*run.samples[b].log_normalizer)
                                                          : nlohmann::json(nullptr);
      samples.push_back(std::move(s));
    }
    nlohmann::json doc{{"config", to_json(cfg)}, {"samples", samples}, {"ledger", run.ledger}};
    if (run.transport) doc["transport"] = transport_json(*run.transport, cfg.batch);
    os << doc.dump(2) << "\n";
  } else if (format == Format::Csv) {
    os << "row,index,log_normalizer\n";
    for (std::size_t b = 0; b < run.samples.size(); ++b) {
      os << b << "," << run.samples[b].index << ",";
      if (run.samples[b].log_normalizer) os << fmt("%.17g", *run.samples[b].log_normalizer);
      os << "\n";
    }
  } else {
    os << "sampler " << to_string(cfg.sampler) << ", B=" << cfg.batch << " V=" << cfg.vocab << " D=" << cfg.dim
       << " seed=" << cfg.seed << "\n";
    for (std::size_t b = 0; b < run.samples.size(); ++b) {
      os << "  row " << b << ": token " << run.samples[b].index;
      if (run.samples[b].log_normalizer) os << "  (log Z = " << fmt("%.6f", *run.samples[b].log_normalizer) << ")";
      os << "\n";
    }
    os << "traffic ledger:\n";
    print_ledger(os, run.ledger);
    if (run.transport) {
      os << "transport: " << run.transport->messages_sent << " messages, " << run.transport->total_bytes
         << " bytes\n";
    }
  }
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& names, const Globals& g, std::size_t samples, double alpha,
               Format format, std::ostream& os) {
  std::vector<std::string> to_run;
  for (const std::string& n : names) {
    if (n == "all") {
      to_run.assign(std::begin(suites::kSuiteNames), std::end(suites::kSuiteNames));
    } else {
      to_run.push_back(n);
    }
  }
  bool pass = true;
  nlohmann::json doc = nlohmann::json::object();
  if (format == Format::Csv) os << "suite,pass\n";
  for (const std::string& name : to_run) {
    const suites::SuiteResult r = suites::run_suite(name, g.seed, g.threads, samples, alpha);
    pass = pass && r.pass;
    if (format == Format::Json) {
      doc[name] = {{"pass", r.pass}, {"details", r.details}};
    } else if (format == Format::Csv) {
      os << name << "," << (r.pass ? "true" : "false") << "\n";
    } else {
      os << (r.pass ? "PASS " : "FAIL ") << name << "\n";
      for (const std::string& line : r.lines) os << "  " << line << "\n";
    }
  }
  if (format == Format::Json) {
    doc["pass"] = pass;
    os << doc.dump(2) << "\n";
  }
  return pass ? kExitOk : kExitVerifyFailed;
}

int cmd_bench(const WorkloadConfig& cfg_in, const WorkloadFlags& flags, std::size_t iterations, std::size_t warmup,
              Format format, std::ostream& os) {
  WorkloadConfig cfg = cfg_in;
  const Workload work = load_workload(cfg, flags);
  const BenchReport r = bench_run(cfg, work, RngKey{cfg.seed}, iterations, warmup);
  if (format == Format::Json) {
    os << nlohmann::json{{"config", to_json(cfg)}, {"report", r}}.dump(2) << "\n";
  } else if (format == Format::Csv) {
    os << "sampler,B,V,D,warmup,iterations,median_s,p10_s,p90_s,samples_per_s,w_read,h_read,cand_write,cand_read,"
          "logits_write,logits_read\n";
    const TrafficLedger& l = r.ledger_per_iteration;
    os << to_string(cfg.sampler) << "," << cfg.batch << "," << cfg.vocab << "," << cfg.dim << "," << r.warmup << ","
       << r.iterations << "," << fmt("%.9g", r.median_seconds) << "," << fmt("%.9g", r.p10_seconds) << ","
       << fmt("%.9g", r.p90_seconds) << "," << fmt("%.6g", r.samples_per_second) << "," << l.w_read_bytes << ","
       << l.h_read_bytes << "," << l.candidate_write_bytes << "," << l.candidate_read_bytes << ","
       << l.logits_write_bytes << "," << l.logits_read_bytes << "\n";
  } else {
    os << "bench " << to_string(cfg.sampler) << " B=" << cfg.batch << " V=" << cfg.vocab << " D=" << cfg.dim
       << " (" << r.warmup << " warmup, " << r.iterations << " timed)\n"
       << "  median " << fmt("%.4g", r.median_seconds * 1e3) << " ms, p10 " << fmt("%.4g", r.p10_seconds * 1e3)
       << " ms, p90 " << fmt("%.4g", r.p90_seconds * 1e3) << " ms, " << fmt("%.4g", r.samples_per_second)
       << " samples/s\n"
       << "traffic per iteration:\n";
    print_ledger(os, r.ledger_per_iteration);
  }
  return kExitOk;
}

struct CostFlags {
  std::vector<std::uint64_t> batches{1, 64, 128};
  std::uint64_t vocab = 151936;
  std::uint64_t dim = 4096;
  std::uint64_t bytes_per_element = 2;
  double passes = 1.0;
  double bandwidth_tbps = 8.0;
  std::string gpu_specs;
  bool curve = false;
};

int cmd_costmodel(const CostFlags& f, Format format, std::ostream& os) {
  const auto gpus = f.gpu_specs.empty() ? cost::load_gpu_specs(cost::default_gpu_spec_path())
                                        : cost::load_gpu_specs(std::filesystem::path(f.gpu_specs));
  if (gpus.empty()) throw ContractError("GPU spec file lists no GPUs");
  const auto rows = cost::cost_table(f.vocab, f.dim, f.batches, gpus, f.bandwidth_tbps * 1e12, f.bytes_per_element,
                                     f.passes);
  std::vector<double> curve_points;
  for (int e = -2; e <= 12; ++e) curve_points.push_back(std::ldexp(1.0, e));

  if (format == Format::Json) {
    nlohmann::json doc;
    doc["inputs"] = {{"V", f.vocab},
                     {"D", f.dim},
                     {"bytes_per_element", f.bytes_per_element},
                     {"logits_passes", f.passes},
                     {"roundtrip_bandwidth_tbps", f.bandwidth_tbps}};
    for (const auto& g : gpus) {
      doc["gpus"].push_back({{"name", g.name},
                             {"hbm_bandwidth_tbps", g.hbm_bandwidth_tbps},
                             {"peak_tflops", g.peak_tflops},
                             {"ops_byte_ratio", g.ops_byte_ratio()}});
    }
    for (const auto& r : rows) {
      nlohmann::json row{{"B", r.batch},
                         {"I_mat", r.intensity_materialized},
                         {"I_fused", r.intensity_fused},
                         {"extra_fraction", r.extra_fraction},
                         {"extra_percent", cost::format_percent(r.extra_fraction)},
                         {"roundtrip_bytes", r.roundtrip.bytes},
                         {"roundtrip_time_ms", r.roundtrip.seconds * 1e3}};
      for (std::size_t i = 0; i < gpus.size(); ++i) {
        row["attainable_tflops"][gpus[i].name] = {{"materialized", r.attainable_materialized[i]},
                                                  {"fused", r.attainable_fused[i]}};
      }
      doc["table"].push_back(std::move(row));
    }
    for (double x : curve_points) {
      nlohmann::json p{{"intensity", x}};
      for (const auto& g : gpus) p[g.name] = cost::roofline_point(g, x);
      doc["roofline"].push_back(std::move(p));
    }
    os << doc.dump(2) << "\n";
  } else if (format == Format::Csv) {
    if (f.curve) {
      os << "intensity";
      for (const auto& g : gpus) os << "," << g.name;
      os << "\n";
      for (double x : curve_points) {
        os << fmt("%.17g", x);
        for (const auto& g : gpus) os << "," << fmt("%.17g", cost::roofline_point(g, x));
        os << "\n";
      }
    } else {
      os << "B,I_mat,I_fused,extra_fraction,roundtrip_bytes,roundtrip_time_ms";
      for (const auto& g : gpus) os << ",attainable_mat_" << g.name << ",attainable_fused_" << g.name;
      os << "\n";
      for (const auto& r : rows) {
        os << r.batch << "," << fmt("%.17g", r.intensity_materialized) << "," << fmt("%.17g", r.intensity_fused)
           << "," << fmt("%.17g", r.extra_fraction) << "," << r.roundtrip.bytes << ","
           << fmt("%.17g", r.roundtrip.seconds * 1e3);
        for (std::size_t i = 0; i < gpus.size(); ++i) {
          os << "," << fmt("%.17g", r.attainable_materialized[i]) << "," << fmt("%.17g", r.attainable_fused[i]);
        }
        os << "\n";
      }
    }
  } else {
    os << "V=" << f.vocab << " D=" << f.dim << " bytes/element=" << f.bytes_per_element
       << " logits passes=" << f.passes << "\n\n";
    os << std::left << std::setw(8) << "B" << std::setw(14) << "I_mat" << std::setw(14) << "I_fused"
       << std::setw(12) << "extra %" << std::setw(16) << "roundtrip B" << "roundtrip ms @" << f.bandwidth_tbps
       << "TB/s\n";
    for (const auto& r : rows) {
      os << std::left << std::setw(8) << r.batch << std::setw(14) << fmt("%.6g", r.intensity_materialized)
         << std::setw(14) << fmt("%.7g", r.intensity_fused) << std::setw(12)
         << (cost::format_percent(r.extra_fraction) + "%") << std::setw(16) << r.roundtrip.bytes
         << fmt("%.2g", r.roundtrip.seconds * 1e3) << "\n";
    }
    os << "\n" << std::left << std::setw(8) << "GPU" << std::setw(10) << "TB/s" << std::setw(10) << "TFLOP/s"
       << "ops:byte\n";
    for (const auto& g : gpus) {
      os << std::left << std::setw(8) << g.name << std::setw(10) << fmt("%g", g.hbm_bandwidth_tbps) << std::setw(10)
         << fmt("%g", g.peak_tflops) << fmt("%.0f", g.ops_byte_ratio()) << "\n";
    }
    os << "\nattainable TFLOP/s (materialized / fused):\n";
    for (const auto& r : rows) {
      os << "  B=" << r.batch << ":";
      for (std::size_t i = 0; i < gpus.size(); ++i) {
        os << "  " << gpus[i].name << " " << fmt("%.4g", r.attainable_materialized[i]) << " / "
           << fmt("%.4g", r.attainable_fused[i]);
      }
      os << "\n";
    }
  }
  return kExitOk;
}

struct DistFlags {
  std::size_t rows = 5000;
  std::string trace_path;
  double alpha = stats::kDefaultAlpha;
};

int cmd_distsim(const WorkloadConfig& cfg_in, const WorkloadFlags& flags, const DistFlags& df, Format format,
                std::ostream& os) {
  WorkloadConfig cfg = cfg_in;
  if (df.rows == 0 || df.rows > std::numeric_limits<std::uint32_t>::max()) throw ContractError("--rows out of range");
  cfg.batch = 1;
  const Workload base = load_workload(cfg, flags);
  const TransformSpec t = cfg.transform();

  // Every row shares one hidden vector so the rows are i.i.d. draws from a
  // single distribution.
  Matrix<float> h(df.rows, cfg.dim);
  for (std::size_t b = 0; b < df.rows; ++b) {
    std::copy(base.h.row(0).begin(), base.h.row(0).end(), h.row(b).begin());
  }
  const HiddenStates hs(std::move(h));
  const Matrix<double> logits = naive_logits(HiddenStates(base.h.values()), base.w);
  const std::vector<double> probs = exact_probabilities(apply_transform(logits.row(0), t));

  DistributedOptions opts;
  opts.tiling = cfg.tiling;
  opts.reduce = cfg.reduce;
  opts.exchange = cfg.exchange;
  opts.threads = cfg.threads;

  std::optional<TransportStats> first_transport;
  std::optional<Transport> first_trace;
  auto run = [&](RngKey key) {
    Transport transport(cfg.world_size);
    const DistributedOutput out = run_distributed_sample(hs, base.w, t, key, cfg.world_size, opts, &transport);
    std::vector<std::uint64_t> counts(cfg.vocab, 0);
    for (const SampleResult& s : out.samples) ++counts.at(s.index);
    if (!first_transport) {
      first_transport = out.transport;
      if (!df.trace_path.empty()) {
        std::ofstream trace(df.trace_path);
        if (!trace) throw Error("cannot open " + df.trace_path);
        transport.write_trace_jsonl(trace);
      }
    }
    return stats::chi_squared_gof(counts, probs, df.alpha);
  };
  const auto outcome = stats::with_retry<stats::GofReport>(run, RngKey{cfg.seed});
  const TransportStats& ts = *first_transport;
  const std::uint64_t per_row = ts.total_bytes / df.rows;
  const std::uint64_t naive_bf16 = static_cast<std::uint64_t>(cfg.vocab) * 2;

  if (format == Format::Json) {
    nlohmann::json doc{{"config", to_json(cfg)},
                       {"rows", df.rows},
                       {"gof", {{"first", outcome.first}, {"pass", outcome.pass}}},
                       {"transport", transport_json(ts, df.rows)},
                       {"naive_bf16_bytes_per_row", naive_bf16}};
    if (outcome.second) doc["gof"]["second"] = *outcome.second;
    os << doc.dump(2) << "\n";
  } else if (format == Format::Csv) {
    os << "V,n,rows,exchange,statistic,dof,threshold,pass,total_bytes,bytes_per_row,naive_bf16_bytes_per_row\n";
    const auto& last = outcome.second ? *outcome.second : outcome.first;
    os << cfg.vocab << "," << cfg.world_size << "," << df.rows << "," << to_string(cfg.exchange) << ","
       << fmt("%.6g", last.statistic) << "," << last.dof << "," << fmt("%.6g", last.threshold) << ","
       << (outcome.pass ? "true" : "false") << "," << ts.total_bytes << "," << per_row << "," << naive_bf16 << "\n";
  } else {
    os << "distsim V=" << cfg.vocab << " D=" << cfg.dim << " n=" << cfg.world_size << " rows=" << df.rows
       << " exchange=" << to_string(cfg.exchange) << " reduce=" << to_string(cfg.reduce) << "\n";
    auto gof_line = [&](const char* label, const stats::GofReport& r) {
      os << "  " << label << ": chi2 " << fmt("%.3f", r.statistic) << " (dof " << r.dof << ", threshold "
         << fmt("%.3f", r.threshold) << ") " << (r.pass ? "pass" : "fail") << "\n";
    };
    gof_line("GOF", outcome.first);
    if (outcome.second) gof_line("GOF retry", *outcome.second);
    os << "  transport: " << ts.messages_sent << " messages, " << ts.total_bytes << " bytes, " << per_row
       << " bytes/row\n";
    for (std::size_t r = 0; r < ts.per_rank_bytes.size(); ++r) {
      os << "    rank " << r << ": " << ts.per_rank_bytes[r] << " bytes\n";
    }
    os << "  a bf16 logits gather would move " << naive_bf16 << " bytes/row\n";
    os << (outcome.pass ? "PASS" : "FAIL") << "\n";
  }
  return outcome.pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  WorkloadConfig cfg;
  Globals g;
  try {
    if (const auto path = find_config_path(args)) {
      std::ifstream in(*path);
      if (!in) {
        err << "error: cannot open config file " << *path << "\n";
        return kExitUsage;
      }
      apply_json_config(cfg, nlohmann::json::parse(in));
      g.seed = cfg.seed;
      g.threads = cfg.threads;
    }
  } catch (const std::exception& e) {
    err << "error: bad config file: " << e.what() << "\n";
    return kExitUsage;
  }

  WorkloadFlags flags{std::string(to_string(cfg.pattern)),  std::string(to_string(cfg.precision)),
                      std::string(to_string(cfg.sampler)),  std::string(to_string(cfg.reduce)),
                      std::string(to_string(cfg.exchange)), std::string(to_string(cfg.gumbel_mode)),
                      {},                                   {},
                      {}};

  CLI::App app{"Exact categorical sampling from LM-head logits without materializing them", "flashsample"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", g.format, "human | json | csv")
      ->check(CLI::IsMember({"human", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "RNG key")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  app.add_option("--config", g.config_path, "JSON config file; flags override its values");
  app.add_option("--gumbel-mode", flags.gumbel_mode, "exact64 | exact32 | fast32")->capture_default_str();
  app.add_option("--output,-o", g.output_path, "write output to this file instead of stdout");

  auto* sample = app.add_subcommand("sample", "draw one token per row");
  add_workload_flags(sample, cfg, flags);

  std::vector<std::string> suite_names{"exactness"};
  std::size_t samples = 5000;
  double alpha = stats::kDefaultAlpha;
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suite_names, "suite name(s) or 'all'")
      ->delimiter(',')
      ->check(CLI::IsMember({"all", "exactness", "pathwise", "maxstability", "lognorm", "costmodel", "comm", "ledger",
                             "benchsmoke"}))
      ->capture_default_str();
  verify->add_option("--samples", samples, "samples per GOF check")->check(CLI::Range(1000ul, 100000000ul))
      ->capture_default_str();
  verify->add_option("--alpha", alpha, "significance level")->check(CLI::Range(1e-9, 0.5))->capture_default_str();

  std::size_t iterations = kDefaultIterations;
  std::size_t warmup = kDefaultWarmup;
  auto* bench = app.add_subcommand("bench", "time a sampler and report its traffic ledger");
  add_workload_flags(bench, cfg, flags);
  bench->add_option("--iterations", iterations, "timed iterations")->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--warmup", warmup, "untimed warmup iterations")->capture_default_str();

  CostFlags cf;
  auto* costmodel = app.add_subcommand("costmodel", "analytic traffic / roofline table");
  costmodel->add_option("--B", cf.batches, "batch sizes")->delimiter(',')->capture_default_str();
  costmodel->add_option("--V", cf.vocab, "vocabulary size")->capture_default_str();
  costmodel->add_option("--D", cf.dim, "hidden dimension")->capture_default_str();
  costmodel->add_option("--bytes-per-element", cf.bytes_per_element, "element size")->capture_default_str();
  costmodel->add_option("--passes", cf.passes, "passes over materialized logits (>= 1)")->capture_default_str();
  costmodel->add_option("--bandwidth", cf.bandwidth_tbps, "TB/s used for the round-trip time")
      ->capture_default_str();
  costmodel->add_option("--gpu-specs", cf.gpu_specs, "GPU spec JSON (default: shipped table)");
  costmodel->add_flag("--curve", cf.curve, "CSV: emit roofline curve samples instead of the table");

  DistFlags df;
  auto* distsim = app.add_subcommand("distsim", "vocabulary-parallel simulation with GOF and transport report");
  add_workload_flags(distsim, cfg, flags);
  distsim->add_option("--rows", df.rows, "samples (rows sharing one hidden vector)")->capture_default_str();
  distsim->add_option("--trace", df.trace_path, "write per-message JSONL transport trace");
  distsim->add_option("--alpha", df.alpha, "significance level")->capture_default_str();

  try {
    std::vector<const char*> argv{"flashsample"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  const Format format = g.format == "json" ? Format::Json : g.format == "csv" ? Format::Csv : Format::Human;
  std::ofstream file;
  if (!g.output_path.empty()) {
    file.open(g.output_path);
    if (!file) {
      err << "error: cannot open " << g.output_path << " for writing\n";
      return kExitUsage;
    }
  }
  std::ostream& os = g.output_path.empty() ? out : file;

  try {
    if (sample->parsed()) {
      finish_workload(cfg, flags, g);
      return cmd_sample(cfg, flags, format, os);
    }
    if (verify->parsed()) return cmd_verify(suite_names, g, samples, alpha, format, os);
    if (bench->parsed()) {
      finish_workload(cfg, flags, g);
      return cmd_bench(cfg, flags, iterations, warmup, format, os);
    }
    if (costmodel->parsed()) return cmd_costmodel(cf, format, os);
    if (distsim->parsed()) {
      finish_workload(cfg, flags, g);
      return cmd_distsim(cfg, flags, df, format, os);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace flashsample
