#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flashsample/cli.hpp"
#include "json.hpp"

using namespace flashsample;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("sample"), std::string::npos);
  EXPECT_NE(r.out.find("costmodel"), std::string::npos);
  EXPECT_EQ(run({"sample", "--help"}).code, kExitOk);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"sample", "--V", "abc"}).code, kExitUsage);
  EXPECT_EQ(run({"sample", "--sampler", "magic"}).code, kExitUsage);
  EXPECT_EQ(run({"sample", "--V", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"--format", "xml", "sample"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--suite", "nosuch"}).code, kExitUsage);
  EXPECT_EQ(run({"--config", "/nonexistent.json", "sample"}).code, kExitUsage);
  const auto r = run({"sample", "--ban", "99999", "--V", "100"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SampleJsonIsByteIdenticalForFixedSeed) {
  const std::vector<std::string> args{"--format", "json", "--seed", "42", "sample", "--B", "3", "--V",
                                      "500",      "--D",  "32",     "--sampler", "fused"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto doc = nlohmann::json::parse(a.out);
  EXPECT_EQ(doc.at("samples").size(), 3u);
  EXPECT_EQ(doc.at("ledger").at("logits_write_bytes"), 0);
  auto c = args;
  c[3] = "43";
  EXPECT_NE(run(c).out, a.out);
}

TEST(Cli, SamplersAgreeThroughCli) {
  std::vector<std::string> base{"--format", "csv", "--seed", "9", "sample", "--B", "4", "--V", "300", "--D", "8",
                                "--sampler"};
  auto fused = base;
  fused.push_back("fused");
  auto streaming = base;
  streaming.push_back("streaming");
  auto dist = base;
  dist.insert(dist.end(), {"distributed", "--n", "1"});
  const auto f = run(fused);
  ASSERT_EQ(f.code, kExitOk) << f.err;
  // index column only; streaming and fused share the Gumbel stream
  auto indices = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> out;
    while (std::getline(in, line)) out.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
    return out;
  };
  EXPECT_EQ(indices(f.out), indices(run(streaming).out));
  EXPECT_EQ(indices(f.out), indices(run(dist).out));
}

TEST(Cli, CostModelShowsPercentages) {
  const auto r = run({"costmodel"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("0.049%"), std::string::npos);
  EXPECT_NE(r.out.find("3.125%"), std::string::npos);
  EXPECT_NE(r.out.find("6.25%"), std::string::npos);
  EXPECT_NE(r.out.find("607744"), std::string::npos);
  const auto j = run({"--format", "json", "costmodel", "--B", "1"});
  ASSERT_EQ(j.code, kExitOk);
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc.at("table").at(0).at("extra_percent"), "0.049");
  EXPECT_EQ(run({"--format", "csv", "costmodel", "--curve"}).code, kExitOk);
  EXPECT_EQ(run({"costmodel", "--passes", "0.5"}).code, kExitUsage);
}

TEST(Cli, DistsimPasses) {
  const auto path = std::filesystem::temp_directory_path() / "flashsample_trace.jsonl";
  const auto r = run({"--format", "json", "distsim", "--V", "512", "--n", "4", "--rows", "5000", "--trace",
                      path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_TRUE(doc.at("gof").at("pass").get<bool>());
  EXPECT_EQ(doc.at("transport").at("bytes_per_row"), 64);
  std::ifstream trace(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(trace, line)) ++lines;
  EXPECT_EQ(lines, 4u * 5000u);
  std::filesystem::remove(path);
}

TEST(Cli, FailedCheckExitsOne) {
  // At alpha = 0.49 a correct sampler fails each attempt about half the time;
  // this seed fails both, which exercises the verification-failure exit path.
  const auto r = run({"--seed", "2", "distsim", "--V", "64", "--D", "8", "--n", "2", "--rows",
                      "2000", "--alpha", "0.49"});
  EXPECT_EQ(r.code, kExitVerifyFailed) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, ConfigFileSuppliesDefaults) {
  const auto path = std::filesystem::temp_directory_path() / "flashsample_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"B": 2, "V": 77, "D": 8, "seed": 5, "sampler": "grouped-online", "group_size": 10})";
  }
  const auto r = run({"--format", "json", "--config", path.string(), "sample"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("config").at("V"), 77);
  EXPECT_EQ(doc.at("config").at("sampler"), "grouped-online");
  EXPECT_EQ(doc.at("config").at("seed"), 5);
  // flags override the file
  const auto o = run({"--format", "json", "--config", path.string(), "sample", "--V", "90"});
  EXPECT_EQ(nlohmann::json::parse(o.out).at("config").at("V"), 90);
  {
    std::ofstream out(path);
    out << R"({"colour": "blue"})";
  }
  EXPECT_EQ(run({"--config", path.string(), "sample"}).code, kExitUsage);
  std::filesystem::remove(path);
}

TEST(Cli, OutputFileAndWeightsRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto weights = dir / "flashsample_w.bin";
  const auto out1 = dir / "flashsample_out1.json";
  ASSERT_EQ(run({"--format", "json", "-o", out1.string(), "sample", "--V", "64", "--D", "4", "--save-weights",
                 weights.string()})
                .code,
            kExitOk);
  const auto reloaded = run({"--format", "json", "sample", "--weights", weights.string()});
  ASSERT_EQ(reloaded.code, kExitOk) << reloaded.err;
  std::ifstream in(out1);
  const auto first = nlohmann::json::parse(in);
  const auto second = nlohmann::json::parse(reloaded.out);
  EXPECT_EQ(first.at("samples"), second.at("samples"));
  std::filesystem::remove(weights);
  std::filesystem::remove(out1);
}

TEST(Cli, BenchReportsLedger) {
  const auto r = run({"--format", "json", "bench", "--B", "2", "--V", "256", "--D", "8", "--iterations", "3",
                      "--warmup", "1", "--sampler", "baseline"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("report").at("iterations"), 3);
  EXPECT_GT(doc.at("report").at("ledger_per_iteration").at("logits_write_bytes").get<long>(), 0);
}

TEST(Cli, VerifyExactnessSuitePasses) {
  const auto r = run({"verify", "--suite", "exactness", "--samples", "2000"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_NE(r.out.find("PASS exactness"), std::string::npos);
  EXPECT_EQ(run({"verify", "--suite", "costmodel,comm"}).code, kExitOk);
}
