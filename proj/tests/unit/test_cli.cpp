// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergocheck/analytic.hpp"
#include "ergocheck/cli/commands.hpp"
#include "ergocheck/cli/config.hpp"
#include "ergocheck/cli/expression.hpp"
#include "ergocheck/error.hpp"

using namespace ergocheck;
using namespace ergocheck::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "ergocheck_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ergocheck::Error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("expression evaluation") {
  CHECK(Expression::parse("1 - exp(-|x|)")(2.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(Expression::parse("u - x")(0.5, 1.0) == doctest::Approx(0.5));
  CHECK(Expression::parse("2 + 3 * 4")(0.0) == 14.0);
  CHECK(Expression::parse("-2^2")(0.0) == -4.0);
  CHECK(Expression::parse("2^3^2")(0.0) == 512.0);
  CHECK(Expression::parse("max(x, 1) + min(x, 1)")(3.0) == 4.0);
  CHECK(Expression::parse("if(x > 0, -1, 1)")(0.5) == -1.0);
  CHECK(Expression::parse("if(x > 0, -1, 1)")(-0.5) == 1.0);
  CHECK(Expression::parse("sgn(x)")(0.0) == 0.0);
  CHECK(Expression::parse("sqrt(abs(x)) * log(exp(2))")(-4.0) == doctest::Approx(4.0));
  CHECK(Expression::parse("x <= 1")(1.0) == 1.0);
  CHECK(Expression::parse("1.5e-1 + .5")(0.0) == doctest::Approx(0.65));
  CHECK(Expression::parse("|x - |u||")(1.0, -3.0) == 2.0);
  CHECK(Expression::parse("x")(0.0) == 0.0);
  CHECK_FALSE(Expression::parse("x^2").uses_u());
  CHECK(Expression::parse("x*u").uses_u());
  CHECK(Expression::parse(" x + 1 ").source() == " x + 1 ");
}

TEST_CASE("expression errors") {
  for (const char* bad : {"", "1 +", "(x", "foo(x)", "max(1)", "x y", "|x", "3 $ 4", "if(1, 2)", "1e"}) {
    INFO(bad);
    CHECK(code_of([&] { Expression::parse(bad); }) == Errc::ParseError);
  }
  try {
    Expression::parse("x + * 2");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}

TEST_CASE("lists and ranges") {
  CHECK(parse_list("1, 2.5,1/3") == std::vector<double>{1.0, 2.5, 1.0 / 3.0});
  const auto r = parse_range("0.40:0.90:0.05");
  REQUIRE(r.size() == 11);
  CHECK(r.front() == 0.4);
  CHECK(r[4] == 0.6);
  CHECK(r.back() == 0.9);
  CHECK(parse_range("0.5") == std::vector<double>{0.5});
  CHECK(parse_range("1/3:1/3:0.1").size() == 1);
  for (const char* bad : {"0.4:0.9", "0.9:0.4:0.05", "0.4:0.9:0", "a:b:c", "1,,2", ""}) {
    INFO(bad);
    CHECK(code_of([&] { parse_range(bad); }) == Errc::ParseError);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const RunConfig c = RunConfig::from_json(json::object());
    CHECK(c.L == 8.0);
    CHECK(c.N == 4001);
    CHECK(c.controls == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(c.pia_tol == 1e-9);
    CHECK(c.sweep_rhos().size() == 11);
  }
  SUBCASE("sections") {
    const json j = json::parse(R"({
      "model": "ou",
      "grid": {"L": 4, "N": 401},
      "controls": [0],
      "tolerances": {"pia_tol": 1e-8, "gap_tol": 0.02},
      "pia": {"max_iter": 7, "initial_policy": {"kind": "constant", "value": 0}},
      "sweep_rho": {"range": "0.4:0.5:0.05"},
      "sim": {"dt": 0.005, "T": 10, "n_paths": 3, "seed": 99}
    })");
    const RunConfig c = RunConfig::from_json(j);
    CHECK(c.model.name == "ou");
    CHECK(c.grid().size() == 401);
    CHECK(c.pia_options().max_iter == 7);
    CHECK(c.pia_options().tol == 1e-8);
    CHECK(c.verify_options().gap_tol == 0.02);
    CHECK(c.sweep_rhos().size() == 3);
    CHECK(c.sim_config().seed == 99);
    CHECK(c.build_model().drift(2.0, 0.0) == -2.0);
  }
  SUBCASE("round trip through to_json") {
    RunConfig c;
    c.N = 801;
    c.alphas = {0.3, 0.1};
    const RunConfig d = RunConfig::from_json(c.to_json());
    CHECK(d.to_json() == c.to_json());
  }
  SUBCASE("inline model") {
    const json j = json::parse(R"({"model": {"name": "mine", "drift": "u - x", "dispersion": "1",
                                              "cost": "x^2 + u^2"}, "controls": [-1, 1]})");
    const DiffusionModel m = RunConfig::from_json(j).build_model();
    CHECK(m.name == "mine");
    CHECK(m.drift(0.5, 1.0) == 0.5);
    CHECK(m.cost(2.0, -1.0) == 5.0);
    CHECK(m.controls.size() == 2);
  }
  SUBCASE("rejections") {
    for (const char* bad : {R"({"grdi": {}})", R"({"grid": {"L": 8, "M": 3}})", R"({"grid": {"L": "wide"}})",
                            R"({"model": {"drift": "u", "dispersion": "u", "cost": "1"}})",
                            R"({"model": {"drift": "x +", "dispersion": "1", "cost": "1"}})",
                            R"({"sweep_rho": {"range": "1:0:1"}})", R"({"pia": {"max_iter": 0}})",
                            R"({"model": "nope"})"}) {
      INFO(bad);
      const Errc e = code_of([&] {
        RunConfig c = RunConfig::from_json(json::parse(bad));
        c.validate();
        c.build_model();
      });
      CHECK((e == Errc::InvalidConfig || e == Errc::ParseError));
    }
  }
}

TEST_CASE("JSON output prints floats with 17 significant digits") {
  const json j{{"a", 0.1}, {"b", 3}, {"c", {1.0 / 3.0, true, nullptr}}, {"d", "x\"y"}, {"e", json::object()}};
  const std::string s = dump_json(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.find("\"b\": 3") != std::string::npos);
  CHECK(json::parse(s) == j);
  CHECK(dump_json(json(std::nan(""))) == "null");
}

TEST_CASE("pair files") {
  const Grid1D g = build_grid(2.0, 9);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = g.x(i) * g.x(i) / 3.0;
  const SolutionPair p{ValueFunction{g, v, true}, 1.0 / 3.0};

  SUBCASE("round trip is exact") {
    std::ostringstream os;
    write_pair(os, p);
    std::istringstream is(os.str());
    const PairTable t = read_pair(is);
    CHECK(t.rho == p.rho);
    const SolutionPair q = resample_pair(t, g);
    CHECK(q.V.values == v);
    CHECK(q.V.normalized);
  }
  SUBCASE("resampling interpolates linearly") {
    std::istringstream is("# rho=0.5\nx,V,extra\n-4,0,9\n0,2,9\n4,0,9\n");
    const SolutionPair q = resample_pair(read_pair(is), g);
    CHECK(q.rho == 0.5);
    CHECK(q.V.values[g.origin_index()] == 2.0);
    CHECK(q.V.values[0] == doctest::Approx(1.0));
    CHECK(q.V.values[g.size() - 1] == doctest::Approx(1.0));
    CHECK_FALSE(q.V.normalized);
  }
  SUBCASE("table must cover the grid") {
    std::istringstream is("# rho=0.5\nx,V\n-1,0\n1,0\n");
    CHECK(code_of([&] { resample_pair(read_pair(is), g); }) == Errc::InvalidGrid);
  }
  SUBCASE("malformed files") {
    for (const char* bad : {"x,V\n0,1\n1,2\n", "# rho=0.5\nx,W\n0,1\n", "# rho=0.5\nx,V\n0,1\n0,2\n",
                            "# rho=0.5\nx,V\n0,a\n1,2\n", "# rho=zz\nx,V\n0,1\n1,2\n", "# rho=0.5\nx,V\n0\n1,2\n"}) {
      INFO(bad);
      std::istringstream is(bad);
      CHECK(code_of([&] { read_pair(is); }) == Errc::ParseError);
    }
  }
}

TEST_CASE("command exit codes") {
  CHECK(invoke({"models", "list"}).code == kOk);
  CHECK(invoke({"models", "list"}).out.find("example:") != std::string::npos);
  CHECK(invoke({}).code == kConfigError);
  CHECK(invoke({"frobnicate"}).code == kConfigError);
  CHECK(invoke({"pia", "--N", "201", "--max-iter", "0"}).code == kConfigError);
  CHECK(invoke({"pia", "--N", "200"}).code == kConfigError);
  CHECK(invoke({"sweep-rho", "--rho-range", "0.9:0.4:0.1"}).code == kConfigError);
  CHECK(invoke({"sweep-rho", "--rho-range", "0.2"}).code == kConfigError);
  CHECK(invoke({"pia", "--config", (scratch_dir() / "missing.json").string()}).code == kConfigError);
  CHECK(invoke({"pia", "--config", write_file("broken.json", "{ not json")}).code == kConfigError);
  CHECK(invoke({"verify"}).code == kConfigError);
  CHECK(invoke({"pia", "--help"}).code == kOk);
}

TEST_CASE("pia command") {
  const Run r = invoke({"pia", "--N", "801"});
  REQUIRE(r.code == kOk);
  const json j = json::parse(r.out);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["command"] == "pia");
  CHECK(std::abs(j["result"]["rho_final"].get<double>() - 1.0 / 3.0) <= 1e-2);
  CHECK(j["result"]["verdict"] == "Compatible");
  const auto trace = j["result"]["rho_trace"].get<std::vector<double>>();
  for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1] + 1e-10);

  const std::string cfg = write_file("constant.json", R"({"model": "constant", "grid": {"L": 4, "N": 201},
    "pia": {"initial_policy": {"kind": "constant", "value": 0}}})");
  const Run k = invoke({"pia", "--config", cfg});
  REQUIRE(k.code == kOk);
  const json jk = json::parse(k.out);
  CHECK(jk["result"]["rho_final"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(jk["result"]["iterations"] == 1);
}

TEST_CASE("expect gating and pair workflow") {
  const std::string spurious = (scratch_dir() / "v06.csv").string();
  REQUIRE(invoke({"export-pair", "--rho", "0.6", "--N", "801", "--out", spurious}).code == kOk);
  CHECK(read_file(spurious).rfind("# rho=0.59999999999999998\nx,V\n", 0) == 0);

  const Run v = invoke({"verify", "--pair-file", spurious, "--N", "801"});
  REQUIRE(v.code == kOk);
  CHECK(json::parse(v.out)["result"]["verdict"] == "Spurious");
  CHECK(invoke({"verify", "--pair-file", spurious, "--N", "801", "--expect", "compatible"}).code == kExpectMismatch);
  CHECK(invoke({"verify", "--pair-file", spurious, "--N", "801", "--expect", "spurious"}).code == kOk);

  const std::string good = (scratch_dir() / "pia.csv").string();
  REQUIRE(invoke({"pia", "--N", "801", "--csv", good, "--out", (scratch_dir() / "pia.json").string()}).code == kOk);
  CHECK(invoke({"verify", "--pair-file", good, "--N", "801", "--expect", "compatible"}).code == kOk);
  CHECK(invoke({"pia", "--N", "801", "--expect", "spurious"}).code == kExpectMismatch);
}

TEST_CASE("sweep, discount and truncation outputs") {
  const Run s = invoke({"sweep-rho", "--rho-range", "1/3,0.6"});
  REQUIRE(s.code == kOk);
  std::istringstream lines(s.out);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header == "rho,xi,beta_quad,beta_formula,gap,verdict");
  CHECK(first.rfind("0.33333333333333331,", 0) == 0);
  CHECK(first.substr(first.rfind(',') + 1) == "Compatible");
  CHECK(second.substr(second.rfind(',') + 1) == "Spurious");

  const Run d = invoke({"discount", "--N", "401", "--alphas", "0.5,0.1"});
  REQUIRE(d.code == kOk);
  CHECK(d.out.rfind("alpha,F\n0.5,", 0) == 0);
  CHECK(d.out.find("# extrapolated=") != std::string::npos);
  CHECK(invoke({"discount", "--N", "401", "--alphas", "0.1,0.5"}).code == kConfigError);

  const Run t = invoke({"truncation", "--N", "401", "--radii", "1,2"});
  REQUIRE(t.code == kOk);
  CHECK(t.out.rfind("# beta_frozen=", 0) == 0);
  CHECK(t.out.find("R,rho_R,iterations\n1,") != std::string::npos);
}

TEST_CASE("simulate command") {
  const Run a = invoke({"simulate", "--T", "20", "--paths", "8", "--seed", "5", "--N", "401"});
  REQUIRE(a.code == kOk);
  const json j = json::parse(a.out);
  CHECK(j["result"]["stats"]["n_samples"] == 8);
  CHECK(j["config"]["sim"]["seed"] == 5);

  const Run e = invoke({"simulate", "--mode", "exit", "--x0", "2", "--T", "50", "--paths", "20", "--N", "401"});
  REQUIRE(e.code == kOk);
  CHECK(json::parse(e.out)["result"].contains("psi"));
  CHECK(invoke({"simulate", "--T", "0"}).code == kConfigError);
}

TEST_CASE("identical runs produce identical bytes") {
  const std::string a = (scratch_dir() / "run_a.json").string();
  const std::string b = (scratch_dir() / "run_b.json").string();
  for (const std::string& path : {a, b}) {
    REQUIRE(invoke({"simulate", "--T", "20", "--paths", "8", "--N", "401", "--out", path}).code == kOk);
  }
  CHECK(read_file(a) == read_file(b));
  CHECK_FALSE(read_file(a).empty());
}
