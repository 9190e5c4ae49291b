#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gcs_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  Result run(const std::string& args) const {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string(GCS_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  static std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header = nullptr) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
      std::vector<double> row;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
      rows.push_back(row);
    }
    return rows;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ListModels) {
  const auto r = run("list-models");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  std::vector<std::string> names;
  for (const auto& m : j["models"]) names.push_back(m["name"]);
  for (const char* n : {"scalar_classK", "protein_synthesis", "phosphorelay", "rfm", "transcriptional",
                        "multi_transcriptional", "irreversible_binding", "piecewise_shift"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}

TEST_F(Cli, Fig1TraceAndReport) {
  const auto r = run("fig1 --out " + path("fig1.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = parse_csv(slurp(path("fig1.csv")), &header);
  EXPECT_EQ(header, "t,x1,x2");
  ASSERT_EQ(rows.size(), 3001u);
  EXPECT_DOUBLE_EQ(rows.back()[0], 30.0);
  EXPECT_NEAR(rows.back()[2], 3.0, 1e-3);
  // Samples are 0.01 apart, so t + 1 is 100 rows later.
  double residual = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k][0] < 25.0 - 1e-9 || rows[k][0] > 29.0 + 1e-9) continue;
    for (int i = 1; i <= 2; ++i) residual = std::max(residual, std::abs(rows[k + 100][i] - rows[k][i]));
  }
  EXPECT_LT(residual, 1e-4);
  const auto rep = json::parse(slurp(path("fig1.csv.entrainment.json")));
  EXPECT_EQ(rep["verdict"], "Pass");
  EXPECT_EQ(rep["period"], 1.0);
}

TEST_F(Cli, Fig1JsonFormat) {
  const auto r = run("fig1 --format json --samples 301");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["entrainment"]["verdict"], "Pass");
  EXPECT_EQ(j["t"].size(), 301u);
}

TEST_F(Cli, CertifyNeOnPiecewiseShiftPasses) {
  const auto r = run("--model piecewise_shift certify --kind ne");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["verdict"], "Pass");
}

TEST_F(Cli, CertifyStFailureExitsOne) {
  const auto r = run("--model piecewise_shift certify --kind st --tau 0.1 --format csv");
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_EQ(r.out.rfind("kind,norm,tau", 0), 0u);
  EXPECT_NE(r.out.find("ST,l1,"), std::string::npos);
}

TEST_F(Cli, MeasureOnProteinBoundaryRegimeFails) {
  const auto r = run("--model protein_synthesis --params '{\"alphas\":[0.5,0.5],\"k\":2}' measure --norm l1");
  EXPECT_EQ(r.code, 1) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_GE(j["grid_sup_mu"].get<double>(), 0.0);
  EXPECT_EQ(j["verdict"], "Fail");
}

TEST_F(Cli, MeasureScaledNormPassesAndCsvTable) {
  const auto ok = run("--model protein_synthesis measure --norm 'l1:diag(1,0.9)'");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NEAR(json::parse(ok.out)["grid_sup_mu"].get<double>(), -0.1, 1e-12);
  const auto csv = run("--model transcriptional --format csv measure --grid 3");
  EXPECT_EQ(csv.code, 1);
  std::string header;
  EXPECT_EQ(parse_csv(csv.out, &header).size(), 9u);
  EXPECT_EQ(header, "x1,x2,c_1,c_2,mu");
}

TEST_F(Cli, ScalingModes) {
  EXPECT_EQ(run("--model transcriptional scaling --mode partition-mu1 --s0 2 --sminus 1 --zmap 2:1").code, 0);
  EXPECT_EQ(run("--model transcriptional scaling --mode partition-mu1 --s0 1 --sminus 2 --zmap 1:2").code, 1);
  const auto c = run("--model multi_transcriptional scaling --mode construct --s0 2,3,4 --sminus 1 "
                     "--zmap 2:1,3:1,4:1 --grid 5");
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_LT(json::parse(c.out)["grid_sup_mu"].get<double>(), 0.0);
  // The coupling k2 x1 vanishes on the face x1 = 0, so only conditions 1 and 2 hold.
  const auto mi = run("--model irreversible_binding scaling --mode partition-muinf --s0 2 --sminus 1 --zmap 2:1 "
                      "--similarity '1,1;0,1'");
  EXPECT_EQ(mi.code, 1) << mi.err;
  const auto mj = json::parse(mi.out);
  EXPECT_TRUE(mj["condition1"].get<bool>());
  EXPECT_TRUE(mj["condition2"].get<bool>());
  EXPECT_FALSE(mj["condition3"].get<bool>());
  EXPECT_NEAR(mj["delta"].get<double>(), 2.0, 1e-12);
  const auto ic = run("--model irreversible_binding scaling --mode ic --norm 'linf:P(1,1;0,1)' --equilibrium true");
  ASSERT_EQ(ic.code, 0) << ic.err;
  EXPECT_NEAR(json::parse(ic.out)["equilibrium"]["e"][1].get<double>(), 3.0, 1e-6);
  const auto nested = run("--model protein_synthesis --params '{\"alphas\":[0.5,0.5]}' scaling --mode nested");
  EXPECT_EQ(nested.code, 0) << nested.err;
}

TEST_F(Cli, EntrainAndVariational) {
  const auto e = run("--model irreversible_binding --params '{\"u\":{\"offset\":2,\"amplitude\":1,\"period\":1}}' "
                     "entrain --x0 '2,0.25;0.5,2.5'");
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(json::parse(e.out)["residuals"].size(), 2u);
  const auto v = run("--model protein_synthesis variational --mode integrate --x0 0.5,0.5 --dx0 1,0 --format csv");
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(v.out.rfind("t,x1,x2,dx1,dx2,norm_dx", 0), 0u);
  EXPECT_EQ(run("--model protein_synthesis variational --mode finsler --a 0,0 --b 1,1").code, 0);
  EXPECT_EQ(run("--model piecewise_shift variational --mode finsler --a -1 --b 1 --tau 0.1").code, 1);
}

TEST_F(Cli, SimulateCsv) {
  const auto r = run("--model scalar_classK simulate --x0 1 --horizon 2 --samples 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[2][1], std::exp(-2.0), 1e-6);
}

TEST_F(Cli, ConfigFileAndOverrides) {
  write("run.json", R"({"model": "piecewise_shift", "command": "certify",
                        "options": {"kind": "st", "tau": 0.1, "pairs": 8}})");
  const auto fail = run("--config " + path("run.json"));
  EXPECT_EQ(fail.code, 1) << fail.err;
  const auto pass = run("--config " + path("run.json") + " certify --kind ne");
  EXPECT_EQ(pass.code, 0) << pass.err;
  EXPECT_EQ(json::parse(pass.out)["pairs_checked"].get<int>() > 0, true);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run("--model nope simulate").code, 2);
  EXPECT_EQ(run("certify --bogus 1").code, 2);
  EXPECT_EQ(run("--model piecewise_shift certify").code, 2);
  EXPECT_EQ(run("--model piecewise_shift certify --kind st --tau -1").code, 2);
  EXPECT_EQ(run("--model protein_synthesis --params '{\"k\":0.5}' measure").code, 2);
  EXPECT_EQ(run("--model protein_synthesis --params '{oops' measure").code, 2);
  EXPECT_EQ(run("--config " + path("missing.json")).code, 2);
  write("bad.json", "{ not json");
  EXPECT_EQ(run("--config " + path("bad.json")).code, 2);
  write("extra.json", R"({"model": "piecewise_shift", "command": "certify", "options": {"kind": "ne", "colour": 1}})");
  EXPECT_EQ(run("--config " + path("extra.json")).code, 2);
  write("key.json", R"({"model": "piecewise_shift", "command": "certify", "verbose": true})");
  EXPECT_EQ(run("--config " + path("key.json")).code, 2);
  EXPECT_EQ(run("--model protein_synthesis measure --norm l2").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, NumericalFailureExitsThree) {
  const auto r = run("--model linear --params '{\"A\":[[1.0]],\"lower\":[-1],\"upper\":[1]}' simulate --x0 0.5 "
                     "--horizon 3");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("left the domain"), std::string::npos);
}

TEST_F(Cli, DeterministicReports) {
  const std::string args = "--model rfm --seed 5 certify --kind sost --tau 0.5 --epsilon 0.2 --pairs 16";
  const auto a = run(args);
  const auto b = run(args);
  const auto c = run(args + " --jobs 3");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_EQ(json::parse(a.out)["seed"], 5);
}

TEST_F(Cli, EverySubcommandHonoursOutAndFormat) {
  const std::vector<std::string> commands = {
      "list-models",
      "--model piecewise_shift simulate --horizon 1 --samples 5",
      "--model transcriptional measure --grid 3",
      "--model piecewise_shift certify --kind ne --pairs 4",
      "--model piecewise_shift certify --kind swe --delta 0.5 --pairs 4",
      "--model transcriptional scaling --mode partition-mu1 --s0 2 --sminus 1 --zmap 2:1 --grid 3",
      "--model irreversible_binding --params '{\"u\":{\"offset\":2,\"amplitude\":1,\"period\":1}}' entrain "
      "--starts 2",
      "--model protein_synthesis variational --mode integrate --samples 5",
      "fig1 --horizon 6 --samples 61",
  };
  int k = 0;
  for (const auto& c : commands) {
    for (const char* fmt : {"json", "csv"}) {
      const std::string out = path("o" + std::to_string(k++));
      const auto r = run(c + " --seed 2 --format " + fmt + " --out " + out);
      EXPECT_TRUE(r.code == 0 || r.code == 1) << c << " " << fmt << ": " << r.err;
      EXPECT_TRUE(r.out.empty()) << c;
      const std::string body = slurp(out);
      ASSERT_FALSE(body.empty()) << c << " " << fmt;
      if (std::string(fmt) == "json") EXPECT_TRUE(json::accept(body)) << c;
      else EXPECT_NE(body.find(','), std::string::npos) << c;
    }
  }
}
