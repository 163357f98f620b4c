#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

using antbounds::cli::run_cli;
using antbounds::cli::Streams;
using Json = nlohmann::ordered_json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, Streams{out, err, false});
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("antbounds_test_" + name);
  std::ofstream(path) << body;
  return path.string();
}

const std::string kHand = "unit_id,y0,y1,d\na,1,3,1\nb,1,3,1\nc,0,1,0\nd,0,1,0\n";

}  // namespace

TEST(Cli, EstimateHandPanel) {
  const auto path = write_temp("hand.csv", kHand);
  auto r = run({"estimate", "--input", path, "--pi", "const:0.5", "--sign-mu", "pos",
                "--sign-tau", "neg", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["results"]["m_hat"].get<double>(), 1.0);
  EXPECT_NEAR(j["results"]["identified_set"]["lower"].get<double>(), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(j["results"]["identified_set"]["upper"].get<double>(), 1.0);
  EXPECT_EQ(j["manifest"]["input"]["rows"], 4);

  const auto ratio = run({"estimate", "--input", path, "--pi", "treatment-ratio", "--sign-mu",
                          "pos", "--sign-tau", "neg", "--format", "json"});
  ASSERT_EQ(ratio.code, 0);
  EXPECT_EQ(Json::parse(ratio.out)["results"]["identified_set"],
            j["results"]["identified_set"]);

  r = run({"estimate", "--input", path, "--pi", "const:0.5", "--sign-mu", "pos", "--sign-tau",
           "zero", "--format", "json"});
  j = Json::parse(r.out);
  EXPECT_EQ(j["results"]["identified_set"]["lower"].get<double>(), 1.0);
  EXPECT_EQ(j["results"]["identified_set"]["upper"].get<double>(), 1.0);

  r = run({"estimate", "--input", path, "--pi", "const:0.5", "--sign-mu", "pos", "--sign-tau",
           "neg"});
  EXPECT_NE(r.out.find("[0.666667, 1]"), std::string::npos) << r.out;
}

TEST(Cli, InferSummary) {
  auto r = run({"infer", "--summary", "m=0.013", "se=0.0046", "n=1", "--pi", "const:0.5",
                "--sign-mu", "pos", "--sign-tau", "neg", "--alpha", "0.95", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out)["results"];
  EXPECT_NEAR(j["confidence_set"]["lower"].get<double>(), 0.001, 5e-4);
  EXPECT_NEAR(j["confidence_set"]["upper"].get<double>(), 0.021, 5e-4);
  EXPECT_EQ(j["robust_null"], "not-robust");

  r = run({"infer", "--summary", "m=0.035", "se=0.01", "--pi", "const:0.5", "--sign-mu", "pos",
           "--sign-tau", "neg", "--format", "json"});
  EXPECT_EQ(Json::parse(r.out)["results"]["robust_null"], "robustly-rejected");

  r = run({"infer", "--summary", "m=0.2", "se=0.05", "--pi", "const:0", "--sign-mu", "pos",
           "--sign-tau", "neg", "--format", "json"});
  j = Json::parse(r.out)["results"];
  EXPECT_NEAR(j["confidence_set"]["lower"].get<double>(), 0.2 - 1.959964 * 0.05, 1e-6);
  EXPECT_NEAR(j["confidence_set"]["upper"].get<double>(), 0.2 + 1.959964 * 0.05, 1e-6);
}

TEST(Cli, SensitivityCsv) {
  const auto r = run({"sensitivity", "--summary", "m=0.013", "se=0.0046", "--pi-grid",
                      "0.1,0.25,0.5,0.57,0.75,0.9", "--sign-mu", "pos", "--sign-tau", "neg",
                      "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "pi,epsilon,set_l,set_u,cs_l,cs_u");
  EXPECT_NE(r.err.find("cutoff_pi=0.75"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("refined_cutoff_pi=0.694"), std::string::npos) << r.err;
  EXPECT_NE(r.out.find("0.5,,0.008666666666666666,0.013,"), std::string::npos) << r.out;
}

TEST(Cli, SensitivityGridZeroMatchesInfer) {
  const std::vector<std::string> common{"--summary", "m=0.02", "se=0.007", "--sign-mu", "pos",
                                        "--sign-tau", "neg", "--format", "json"};
  auto sargs = std::vector<std::string>{"sensitivity", "--pi-grid", "0"};
  sargs.insert(sargs.end(), common.begin(), common.end());
  auto iargs = std::vector<std::string>{"infer", "--pi", "const:0"};
  iargs.insert(iargs.end(), common.begin(), common.end());
  const auto s = Json::parse(run(sargs).out)["results"]["rows"][0];
  const auto i = Json::parse(run(iargs).out)["results"]["confidence_set"];
  EXPECT_EQ(s["cs_l"], i["lower"]);
  EXPECT_EQ(s["cs_u"], i["upper"]);
}

TEST(Cli, CicUnboundedAndIdenticalGroups) {
  const auto path = write_temp(
      "cic.csv",
      "unit_id,t,y,d\na,0,1,1\na,1,2,1\nb,0,3,1\nb,1,4,1\nc,0,1,0\nc,1,2,0\nd,0,3,0\nd,1,4,0\n");
  auto r = run({"cic", "--input", path, "--q", "0.3,0.5,0.9", "--pi", "const:0.5", "--sign-mu",
                "pos", "--sign-tau", "pos", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = Json::parse(r.out)["results"]["rows"];
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["phi_tilde_u"], "unbounded");
  for (const auto& row : rows) EXPECT_EQ(row["m_q"].get<double>(), 0.0);
  r = run({"cic", "--input", path, "--q", "0.3", "--pi", "const:0.5", "--sign-mu", "pos",
           "--sign-tau", "pos"});
  EXPECT_NE(r.out.find("unbounded"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const auto hand = write_temp("hand2.csv", kHand);
  const std::vector<std::string> signs{"--sign-mu", "pos", "--sign-tau", "neg"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), signs.begin(), signs.end());
    return run(a).code;
  };
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);
  EXPECT_EQ(with({"estimate", "--input", hand, "--pi", "const:1.5"}), 2);
  EXPECT_EQ(with({"estimate", "--input", "/nonexistent/x.csv", "--pi", "const:0.5"}), 2);
  EXPECT_EQ(with({"infer", "--summary", "m=abc", "se=0.1", "--pi", "const:0.5"}), 2);
  EXPECT_EQ(with({"infer", "--summary", "m=0.1", "se=-1", "--pi", "const:0.5"}), 2);
  EXPECT_EQ(run({"estimate", "--input", hand, "--pi", "const:0.5", "--sign-mu", "up",
                 "--sign-tau", "neg"})
                .code,
            2);
  const auto bad = write_temp("bad.csv", "unit_id,y0,y1,d\na,1,x,1\nb,0,1,0\n");
  const auto r = run({"estimate", "--input", bad, "--pi", "const:0.5", "--sign-mu", "pos",
                      "--sign-tau", "neg"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  // Finite inputs whose group means overflow.
  const auto huge = write_temp(
      "huge.csv", "unit_id,y0,y1,d\na,0,1.7e308,1\nb,0,1.7e308,1\nc,0,1,0\nd,0,1,0\n");
  EXPECT_EQ(with({"estimate", "--input", huge, "--pi", "const:0.5"}), 3);
  EXPECT_EQ(run({"simulate", "--scenario", "nope"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scenario", "benchmark", "--reps", "0"}).code, 2);
}

TEST(Cli, SimulateDeterministicAcrossRunsAndWorkers) {
  const std::vector<std::string> base{"simulate", "--scenario", "benchmark", "--n", "200",
                                      "--reps", "100", "--seed", "5", "--format", "json"};
  auto w = [&](const std::string& workers) {
    auto a = base;
    a.push_back("--workers");
    a.push_back(workers);
    return run(a);
  };
  const auto a = w("1"), b = w("1"), c = w("4");
  ASSERT_NE(a.code, 2) << a.err;
  EXPECT_EQ(a.out, b.out);
  // Worker count is an execution detail and is not part of the manifest.
  EXPECT_EQ(a.out, c.out);
  const auto j = Json::parse(a.out);
  EXPECT_EQ(j["manifest"]["seed"], 5);
}

TEST(Cli, SimulateFalsificationFlagged) {
  auto r = run({"simulate", "--scenario", "benchmark", "--n", "200", "--reps", "50",
                "--lambda", "0.8", "--pi", "0.1", "--format", "json"});
  EXPECT_EQ(r.code, 2) << "untagged violation must be rejected";
  r = run({"simulate", "--scenario", "benchmark", "--n", "200", "--reps", "50", "--lambda", "0.8",
           "--pi", "0.1", "--falsification", "--format", "json"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_TRUE(j["results"]["points"][0]["falsification"].get<bool>());
}
