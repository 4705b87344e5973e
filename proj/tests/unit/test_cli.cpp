#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corrsense_cli/cli.hpp"
#include "corrsense_cli/table.hpp"

namespace fs = std::filesystem;
using corrsense::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

using Rows = std::vector<std::vector<std::string>>;

Rows parse_csv(const std::string& text) {
  Rows rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string cell(const Rows& rows, std::size_t row, const std::string& column) {
  const auto& header = rows.front();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return rows.at(row + 1).at(i);
  }
  ADD_FAILURE() << "no column " << column;
  return "";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_golden(const std::string& name, const std::string& actual) {
  const fs::path path = fs::path(CORRSENSE_GOLDEN_DIR) / name;
  if (std::getenv("CORRSENSE_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  ASSERT_TRUE(fs::exists(path)) << path;
  EXPECT_EQ(actual, read_file(path)) << name;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("corrsense_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, EvalWhiteSeparable) {
  const auto r = invoke({"eval", "--noise", "white", "--A", "1", "--N", "100", "--T", "1000", "--tau", "1",
                         "--family", "separable"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Rows rows = parse_csv(r.out);
  EXPECT_NEAR(std::stod(cell(rows, 0, "stddev")), std::sqrt(std::exp(1.0) / 1e5), 1e-12);
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  check_golden("eval_white.csv", r.out);
}

TEST(Cli, EvalFormatsAndGoldens) {
  const std::vector<std::string> base = {"eval", "--noise", "ohmic", "--sigma", "0.5", "--spatial", "gaussian",
                                         "--B", "0.8", "--family", "psi", "--kappa", "0.4", "--N", "64",
                                         "--T", "500", "--tau", "0.7"};
  auto csv = invoke(base);
  ASSERT_EQ(csv.code, 0) << csv.err;
  check_golden("eval_ohmic_psi.csv", csv.out);
  auto args = base;
  args.insert(args.end(), {"--format", "json"});
  auto json = invoke(args);
  ASSERT_EQ(json.code, 0) << json.err;
  check_golden("eval_ohmic_psi.json", json.out);
}

TEST(Cli, MarkovianMatchesFullUnderWhiteNoise) {
  const std::vector<std::string> base = {"eval", "--noise", "white", "--A", "0.3", "--N", "40", "--T", "300",
                                         "--tau", "2", "--family", "oat", "--chi-t", "0.05"};
  auto full = base, markov = base;
  full.insert(full.end(), {"--formula", "full"});
  markov.insert(markov.end(), {"--formula", "markovian"});
  const auto a = invoke(full), b = invoke(markov);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const double sa = std::stod(cell(parse_csv(a.out), 0, "stddev"));
  const double sb = std::stod(cell(parse_csv(b.out), 0, "stddev"));
  EXPECT_LT(std::abs(sa - sb) / sb, 1e-9);
}

TEST(Cli, ValidationErrorsNameTheField) {
  auto r = invoke({"eval", "--family", "psi", "--kappa", "1.5", "--tau", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("kappa"), std::string::npos);
  r = invoke({"eval", "--tau", "1", "--noise", "pink"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("pink"), std::string::npos);
  r = invoke({"eval", "--tau", "1", "--A", "-2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("strength A"), std::string::npos);
  EXPECT_EQ(invoke({"eval"}).code, 1);
  EXPECT_EQ(invoke({"figure", "fig5"}).code, 1);
  EXPECT_EQ(invoke({"eval", "--tau", "1", "--format", "xml"}).code, 1);
  EXPECT_EQ(invoke({}).code, 1);
}

TEST(Cli, NumericalFailureExitCode) {
  const auto r = invoke({"eval", "--A", "10", "--tau", "100", "--N", "10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("overflow"), std::string::npos);
}

TEST(Cli, ConfigFile) {
  const fs::path dir = scratch_dir("config");
  std::ofstream(dir / "good.toml") << "[eval]\nnoise = \"gaussian\"\nsigma = 0.5\nN = 12\ntau = 0.25\nT = 40\n";
  std::ofstream(dir / "bad.toml") << "[eval]\nN = 12\ntau = 0.25\nunknown_key = 3\n";
  auto r = invoke({"--config", (dir / "good.toml").string(), "eval", "--N", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Rows rows = parse_csv(r.out);
  EXPECT_EQ(cell(rows, 0, "N"), "16");
  EXPECT_EQ(cell(rows, 0, "tau"), "2.500000000e-01");
  r = invoke({"--config", (dir / "bad.toml").string(), "eval"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, BoundCommand) {
  auto r = invoke({"bound", "--noise", "white", "--A", "1", "--N", "100", "--T", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  Rows rows = parse_csv(r.out);
  EXPECT_NEAR(std::stod(cell(rows, 0, "bound")), std::sqrt(1e-5), 1e-12);
  EXPECT_NEAR(std::stod(cell(rows, 0, "ratio")), std::sqrt(std::exp(1.0)), 0.02);
  check_golden("bound_white.csv", r.out);
  r = invoke({"bound", "--noise", "ohmic", "--N", "100", "--T", "1000"});
  EXPECT_EQ(std::stod(cell(parse_csv(r.out), 0, "bound")), 0.0);
  r = invoke({"bound", "--noise", "gaussian", "--spatial", "linear", "--N", "100", "--T", "1000"});
  EXPECT_EQ(std::stod(cell(parse_csv(r.out), 0, "bound")), 0.0);
}

TEST(Cli, OptimizeGolden) {
  const auto r = invoke({"optimize", "--noise", "gaussian", "--sigma", "0.5", "--family", "psi", "--N", "20,60",
                         "--T", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Rows rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(std::stod(cell(rows, 1, "gain_r")), 1.0);
  check_golden("optimize_gaussian_psi.csv", r.out);
}

TEST(Cli, McValidateIsDeterministic) {
  const std::vector<std::string> args = {"mc-validate", "--trajectories", "300", "--seed", "11"};
  const auto a = invoke(args), b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  check_golden("mc_validate_white.csv", a.out);
  const auto c = invoke({"mc-validate", "--trajectories", "300", "--seed", "12"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, McValidateZeroNoise) {
  const auto r = invoke({"mc-validate", "--grid", "zero-noise", "--trajectories", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Rows rows = parse_csv(r.out);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) EXPECT_LE(std::abs(std::stod(cell(rows, i, "z"))), 4.0);
}

TEST(Cli, FigureWritesOnePanelPerFile) {
  const fs::path dir = scratch_dir("fig8");
  const auto r = invoke({"figure", "fig8", "--spectra", "ohmic", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir / "fig8.csv"));
  const Rows fits = parse_csv(read_file(dir / "fig8_fits.csv"));
  bool found = false;
  for (std::size_t i = 0; i + 1 < fits.size(); ++i) {
    if (cell(fits, i, "spectrum") == "ohmic" && cell(fits, i, "quantity") == "delta_b_sqrt_nt") {
      EXPECT_NEAR(std::stod(cell(fits, i, "exponent")), -0.25, 0.03);
      found = true;
    }
  }
  EXPECT_TRUE(found);

  const auto j = invoke({"figure", "fig8", "--spectra", "white", "--points", "6", "--format", "json",
                         "--out", dir.string()});
  ASSERT_EQ(j.code, 0) << j.err;
  EXPECT_TRUE(fs::exists(dir / "fig8.json"));
}

TEST(Cli, Fig7WhiteScaling) {
  const auto r = invoke({"figure", "fig7", "--spectra", "white"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string fits_text = r.out.substr(r.out.find("# fig7_fits"));
  const Rows fits = parse_csv(fits_text);
  EXPECT_NEAR(std::stod(cell(fits, 0, "exponent")), -0.5, 0.02);
}

TEST(Cli, Fig2GainApproachesCeiling) {
  const fs::path dir = scratch_dir("fig2");
  const auto r = invoke({"figure", "fig2", "--n-min", "1000", "--points", "6", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Rows rows = parse_csv(read_file(dir / "fig2_gain.csv"));
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double g = std::stod(cell(rows, i, "gain_r"));
    EXPECT_GE(g, prev);
    EXPECT_LT(g, std::sqrt(std::exp(1.0)));
    prev = g;
  }
  EXPECT_GT(prev, 1.55);
}

TEST(CliTable, Formatting) {
  using namespace corrsense::cli;
  EXPECT_EQ(format_real(1.0), "1.000000000e+00");
  EXPECT_EQ(format_real(-0.00123456789012), "-1.234567890e-03");
  EXPECT_EQ(format_real(std::nan("")), "nan");
  Table t({"name", "n", "x"});
  t.add_row({std::string("a,b"), std::int64_t{3}, std::nan("")});
  std::ostringstream csv, json;
  write_csv(csv, t);
  write_json(json, t);
  EXPECT_EQ(csv.str(), "name,n,x\n\"a,b\",3,nan\n");
  EXPECT_EQ(json.str(), "[\n  {\"name\": \"a,b\", \"n\": 3, \"x\": null}\n]\n");
  EXPECT_THROW(t.add_row({std::int64_t{1}}), std::logic_error);
}
