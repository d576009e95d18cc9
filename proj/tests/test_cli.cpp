#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "support.hpp"

namespace beamspec::cli {
namespace {

using test::rel_diff;
using test::uniform_eigenvalue;

std::string config(const std::string& name) {
  return std::string(BEAMSPEC_CONFIG_DIR) + "/" + name + ".json";
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::map<std::string, double>> rows;
  std::vector<std::string> raw_rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      const auto cells = split(line);
      std::map<std::string, double> row;
      for (std::size_t i = 0; i < cells.size() && i < csv.header.size(); ++i)
        row[csv.header[i]] = std::stod(cells[i]);
      csv.rows.push_back(row);
      csv.raw_rows.push_back(line);
    }
  }
  return csv;
}

TEST(CliSpectrum, UniformClosedForm) {
  const auto r = run_cli({"spectrum", config("uniform_M0"), "--modes", "4"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const Csv csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"n", "lambda", "s", "u0", "det_derivative", "sv_gap"}));
  ASSERT_EQ(csv.rows.size(), 4u);
  const double want[] = {6.0880682, 97.409091, 493.13353, 1558.5455};
  for (int n = 1; n <= 4; ++n) {
    EXPECT_EQ(csv.rows[n - 1].at("n"), n);
    EXPECT_LE(rel_diff(csv.rows[n - 1].at("lambda"), want[n - 1]), 5e-8);
    EXPECT_LE(rel_diff(csv.rows[n - 1].at("lambda"), uniform_eigenvalue(n)), 1e-7);
    EXPECT_NEAR(csv.rows[n - 1].at("s"), n * test::kPi / 2, 1e-7);
  }
}

TEST(CliSpectrum, ManifestHeader) {
  const auto r = run_cli({"spectrum", config("uniform_M0"), "--modes", "1", "--seed", "17"});
  ASSERT_EQ(r.code, kOk);
  const Csv csv = parse_csv(r.out);
  std::string joined;
  for (const auto& c : csv.comments) joined += c + "\n";
  for (const char* key : {"# command: spectrum", "# config: ", "# tol: 1e-10", "# modes: 1",
                          "# seed: 17", "# version: ", "# wall_seconds: "})
    EXPECT_NE(joined.find(key), std::string::npos) << key;
}

TEST(CliSpectrum, ZeroModesIsUsageError) {
  const auto r = run_cli({"spectrum", config("uniform_M0"), "--modes", "0"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliSpectrum, SymmetryProtectedSecondMode) {
  const auto r = run_cli({"spectrum", config("uniform_M1"), "--modes", "2"});
  ASSERT_EQ(r.code, kOk);
  const Csv csv = parse_csv(r.out);
  EXPECT_LE(rel_diff(csv.rows[1].at("lambda"), 97.409091), 5e-8);
  EXPECT_LE(std::abs(csv.rows[1].at("u0")), 1e-7);
}

TEST(CliSpectrum, SeventeenSignificantDigitsAndDeterminism) {
  const auto a = run_cli({"spectrum", config("variable_M1"), "--modes", "3"});
  const auto b = run_cli({"spectrum", config("variable_M1"), "--modes", "3"});
  const Csv ca = parse_csv(a.out), cb = parse_csv(b.out);
  EXPECT_EQ(ca.raw_rows, cb.raw_rows);
  for (const auto& row : ca.raw_rows) {
    const auto cells = split(row);
    const double v = std::stod(cells[1]);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    EXPECT_EQ(cells[1], buf);
  }
}

TEST(CliErrors, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"bogus"}).code, kUsage);
  EXPECT_EQ(run_cli({"spectrum"}).code, kUsage);
  EXPECT_EQ(run_cli({"spectrum", "/nonexistent.json"}).code, kUsage);
  EXPECT_EQ(run_cli({"spectrum", config("uniform_M0"), "--tol", "1e-3"}).code, kUsage);
  EXPECT_EQ(run_cli({"spectrum", config("uniform_M0"), "--modes", "abc"}).code, kUsage);
  EXPECT_EQ(run_cli({"verify", config("uniform_M0"), "--modes", "1"}).code, kUsage);
  EXPECT_EQ(run_cli({"modes", config("uniform_M0"), "--stations", "33"}).code, kUsage);
  EXPECT_EQ(run_cli({"modes", config("uniform_M0"), "--stations", "66"}).code, kUsage);
  EXPECT_EQ(run_cli({"sweep", config("uniform_M0"), "--mass-list", "0,x"}).code, kUsage);
  EXPECT_EQ(run_cli({"sweep", config("uniform_M0"), "--mass-list", "0,-1"}).code, kUsage);
  EXPECT_EQ(run_cli({"oracle", config("uniform_M0"), "--elements", "3"}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST(CliErrors, InvalidConfigIsUsageError) {
  const std::string path = ::testing::TempDir() + "bad_config.json";
  {
    std::ofstream f(path);
    f << R"({"M": 0, "left": {"rho": [1], "sigma": [-1]}, "right": {"rho": [1], "sigma": [1]}})";
  }
  const auto r = run_cli({"spectrum", path});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("sigma nonpositive"), std::string::npos) << r.err;
  std::remove(path.c_str());
}

TEST(CliOutput, WritesToFile) {
  const std::string path = ::testing::TempDir() + "spectrum_out.csv";
  const auto r = run_cli({"spectrum", config("uniform_M0"), "--modes", "2", "-o", path});
  ASSERT_EQ(r.code, kOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  EXPECT_EQ(parse_csv(buf.str()).rows.size(), 2u);
  std::remove(path.c_str());
}

TEST(CliVerify, UniformSignProductsNegative) {
  const auto r = run_cli({"verify", config("uniform_M0"), "--modes", "4"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  for (const char* key : {"positivity", "strict_ordering", "simplicity", "sign_products",
                          "orthogonality_max_offdiag", "rayleigh_max_residual", "step_classes",
                          "theorem1_consistent"})
    EXPECT_TRUE(doc.contains(key)) << key;
  for (const char* side : {"left", "right"}) {
    ASSERT_EQ(doc["sign_products"][side].size(), 4u);
    for (std::size_t n = 0; n < 4; ++n) {
      const double p = doc["sign_products"][side][n];
      EXPECT_LT(p, 0.0);
      EXPECT_LE(rel_diff(p, -uniform_eigenvalue(int(n) + 1)), 1e-6);
    }
  }
  EXPECT_TRUE(doc["theorem1_consistent"].get<bool>());
  EXPECT_NE(doc["sign_note"].get<std::string>().find("sign discrepancy"), std::string::npos);
}

TEST(CliVerify, OrthogonalityWithMass) {
  const auto r = run_cli({"verify", config("uniform_M1"), "--modes", "6"});
  ASSERT_EQ(r.code, kOk);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_LE(doc["orthogonality_max_offdiag"].get<double>(), 1e-7);
}

TEST(CliVerify, VariableSimplicityMargins) {
  const auto r = run_cli({"verify", config("variable_M1"), "--modes", "6"});
  ASSERT_EQ(r.code, kOk);
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["simplicity"].size(), 6u);
  for (const auto& m : doc["simplicity"]) {
    EXPECT_TRUE(m["simple"].get<bool>());
    EXPECT_GT(m["det_derivative"].get<double>(), 1e-6);
    EXPECT_GE(m["sv_gap"].get<double>(), 1e3);
  }
  for (const auto& s : doc["step_classes"]) EXPECT_TRUE(s.is_string());
}

TEST(CliModes, UniformFirstMode) {
  const auto r = run_cli({"modes", config("uniform_M0"), "--modes", "2", "--stations", "65"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const Csv csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"x", "n", "u", "du", "moment", "shear_q"}));
  EXPECT_EQ(csv.rows.size(), 2u * 129u);
  for (const auto& row : csv.rows) {
    if (row.at("x") == 0.0 && row.at("n") == 1) EXPECT_NEAR(row.at("u"), 1.0, 1e-8);
    if (std::abs(row.at("x")) == 1.0) {
      EXPECT_NEAR(row.at("u"), 0.0, 1e-10);
      EXPECT_NEAR(row.at("moment"), 0.0, 1e-8);
    }
  }
}

TEST(CliSweep, MassSweep) {
  const auto r = run_cli({"sweep", config("uniform_M0"), "--mass-list", "0,1,10", "--modes", "2"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const Csv csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"M", "n", "lambda"}));
  ASSERT_EQ(csv.rows.size(), 6u);
  std::vector<double> first, second;
  for (const auto& row : csv.rows) (row.at("n") == 1 ? first : second).push_back(row.at("lambda"));
  for (double v : second) EXPECT_LE(rel_diff(v, 97.409091), 5e-8);
  EXPECT_GT(first[0], first[1]);
  EXPECT_GT(first[1], first[2]);
}

TEST(CliSweep, SingleMassMatchesSpectrum) {
  const auto sweep = parse_csv(
      run_cli({"sweep", config("variable_M0"), "--mass-list", "0.5", "--modes", "3"}).out);
  const auto spec = parse_csv(run_cli({"spectrum", config("variable_M0.5"), "--modes", "3"}).out);
  ASSERT_EQ(sweep.rows.size(), spec.rows.size());
  for (std::size_t i = 0; i < spec.rows.size(); ++i)
    EXPECT_EQ(sweep.rows[i].at("lambda"), spec.rows[i].at("lambda"));
}

TEST(CliOracle, UniformComparison) {
  const auto r = run_cli({"oracle", config("uniform_M0"), "--modes", "4", "--elements", "40"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const Csv csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"n", "shooting", "oracle_E", "oracle_2E",
                                                  "richardson", "rel_error", "order"}));
  for (const auto& row : csv.rows) {
    EXPECT_LE(row.at("rel_error"), 1e-6);
    EXPECT_NEAR(row.at("order"), 4.0, 0.5);
  }
}

TEST(CliOracle, CoarseMeshStillOrdered) {
  const auto r = run_cli({"oracle", config("variable_M1"), "--modes", "6", "--elements", "4"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const Csv csv = parse_csv(r.out);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    EXPECT_GT(csv.rows[i].at("oracle_E"), 0.0);
    if (i > 0) EXPECT_GT(csv.rows[i].at("oracle_E"), csv.rows[i - 1].at("oracle_E"));
  }
}

TEST(CliMassList, Parsing) {
  EXPECT_EQ(parse_mass_list("0, 0.5,1 ,10"), (std::vector<double>{0, 0.5, 1, 10}));
  EXPECT_THROW(parse_mass_list(""), PreconditionError);
  EXPECT_THROW(parse_mass_list("1,,2"), PreconditionError);
  EXPECT_THROW(parse_mass_list("nan"), PreconditionError);
}

}  // namespace
}  // namespace beamspec::cli
