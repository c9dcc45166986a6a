#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_commands.hpp"

using namespace jordan;
using namespace jordan::cli;
namespace fs = std::filesystem;

namespace {

std::string spec(const std::string& name) { return std::string(JORDAN_SPECS_DIR) + "/" + name; }

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "jordan_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Run {
  int code;
  std::string out, err;
};

template <class Opt, class Fn>
Run call(Fn fn, const Opt& opt) {
  std::ostringstream out, err;
  int code = fn(opt, out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary; stdout is captured, stderr discarded.
Run run_binary(const std::string& args) {
  const std::string out_path = (scratch() / "stdout.txt").string();
  const std::string cmd = std::string(JORDAN_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out_path), {}};
}

Json checks_by_name(const Json& report) {
  Json m = Json::object();
  for (const auto& c : report.at("checks")) m[c.at("name").get<std::string>()] = c;
  return m;
}

VerifyOptions verify_opts(const std::string& name, int samples = 20) {
  VerifyOptions o;
  o.spec_path = spec(name);
  o.samples = samples;
  o.seed = 42;
  return o;
}

class SeedEnv : public ::testing::Test {
 protected:
  void TearDown() override { unsetenv("JORDAN_SEED"); }
};

}  // namespace

TEST(CatalogList, TextAndJson) {
  auto text = call(catalog_list, CatalogListOptions{});
  EXPECT_EQ(text.code, 0);
  EXPECT_EQ(std::count(text.out.begin(), text.out.end(), '\n'), 18);

  auto json = call(catalog_list, CatalogListOptions{true, std::nullopt});
  Json arr = Json::parse(json.out);
  ASSERT_EQ(arr.size(), 17u);
  EXPECT_EQ(arr[0].at("family"), "ComplexField");

  auto one = call(catalog_list, CatalogListOptions{true, std::string("SymReal")});
  Json row = Json::parse(one.out);
  ASSERT_EQ(row.size(), 1u);
  EXPECT_EQ(row[0].at("real_dim"), "m(m+1)/2");
  EXPECT_EQ(row[0].at("min_parameter"), 3);

  EXPECT_EQ(call(catalog_list, CatalogListOptions{false, std::string("Nope")}).code, 2);
}

TEST(Verify, CanonicalSymRealPasses) {
  auto r = call(verify, verify_opts("symreal3.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  Json report = Json::parse(r.out);
  EXPECT_TRUE(report.at("pass").get<bool>());
  EXPECT_EQ(report.at("seed"), 42);
  std::vector<std::string> names;
  for (const auto& c : report.at("checks")) names.push_back(c.at("name"));
  EXPECT_EQ(names, (std::vector<std::string>{"jordan_identity", "trace_form", "detP_closed_form",
                                             "zeta_identities_at_unit", "potential_gradient", "parallel_cubic",
                                             "hypersphere", "quadric"}));
  Json c = checks_by_name(report);
  EXPECT_EQ(c["hypersphere"].at("status"), "pass");
  EXPECT_EQ(c["quadric"].at("status"), "info");
  EXPECT_NE(r.err.find("parallel_cubic: pass"), std::string::npos);
}

TEST(Verify, MixedWeightsIsNotAHypersphere) {
  auto r = call(verify, verify_opts("mixed_weights.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  Json c = checks_by_name(Json::parse(r.out));
  EXPECT_EQ(c["hypersphere"].at("status"), "pass");
  EXPECT_GT(c["hypersphere"].at("max_abs").get<double>(), 1e-3);
  EXPECT_EQ(c["potential_gradient"].at("status"), "pass");
  EXPECT_EQ(c["parallel_cubic"].at("status"), "pass");
}

TEST(Verify, TruncPolySkipsHypersphere) {
  auto r = call(verify, verify_opts("truncpoly4.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  Json c = checks_by_name(Json::parse(r.out));
  EXPECT_EQ(c["hypersphere"].at("status"), "not applicable (not semi-simple)");
  EXPECT_EQ(c["parallel_cubic"].at("status"), "pass");
}

TEST(Verify, SpiralPasses) {
  auto r = call(verify, verify_opts("spiral.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(checks_by_name(Json::parse(r.out))["potential_gradient"].at("status"), "pass");
}

TEST(Verify, PerturbedAlgebraFails) {
  auto r = call(verify, verify_opts("perturbed_symreal3.json"));
  EXPECT_EQ(r.code, 1);
  Json report = Json::parse(r.out);
  EXPECT_FALSE(report.at("pass").get<bool>());
  Json c = checks_by_name(report);
  EXPECT_EQ(c["jordan_identity"].at("status"), "fail");
  EXPECT_GE(c["jordan_identity"].at("max_abs").get<double>(), 1e-3);
  EXPECT_EQ(c["parallel_cubic"].at("status"), "not applicable (Jordan identity fails)");
}

TEST(Verify, ReportIsDeterministic) {
  auto strip = [](const std::string& s) {
    Json j = Json::parse(s);
    j.erase("wall_time_s");
    return j.dump();
  };
  auto a = call(verify, verify_opts("mixed_weights.json"));
  auto b = call(verify, verify_opts("mixed_weights.json"));
  EXPECT_EQ(strip(a.out), strip(b.out));
  auto other = verify_opts("mixed_weights.json");
  other.seed = 7;
  EXPECT_NE(strip(call(verify, other).out), strip(a.out));
}

TEST(Verify, InputErrors) {
  auto missing = verify_opts("does_not_exist.json");
  EXPECT_EQ(call(verify, missing).code, 4);
  auto malformed = verify_opts("x");
  malformed.spec_path = write_temp("malformed.json", "{\"algebra\": ");
  EXPECT_EQ(call(verify, malformed).code, 2);
  auto unknown = verify_opts("x");
  unknown.spec_path = write_temp("unknown.json", R"({"algebra": {"family": "Quaternions"}})");
  EXPECT_EQ(call(verify, unknown).code, 2);
  auto out_of_range = verify_opts("x");
  out_of_range.spec_path = write_temp("range.json", R"({"algebra": {"family": "SymReal", "m": 2}})");
  EXPECT_EQ(call(verify, out_of_range).code, 2);
  auto negative = verify_opts("symreal3.json");
  negative.samples = -1;
  EXPECT_EQ(call(verify, negative).code, 2);
}

TEST_F(SeedEnv, Precedence) {
  unsetenv("JORDAN_SEED");
  EXPECT_EQ(resolve_seed(std::nullopt), 42u);
  setenv("JORDAN_SEED", "1234", 1);
  EXPECT_EQ(resolve_seed(std::nullopt), 1234u);
  EXPECT_EQ(resolve_seed(9), 9u);
  setenv("JORDAN_SEED", "abc", 1);
  EXPECT_THROW(resolve_seed(std::nullopt), UsageError);
}

TEST_F(SeedEnv, EnvironmentSeedReachesReport) {
  setenv("JORDAN_SEED", "77", 1);
  auto opt = verify_opts("symreal3.json", 5);
  opt.seed.reset();
  EXPECT_EQ(Json::parse(call(verify, opt).out).at("seed"), 77);
}

TEST(Eval, Values) {
  auto run = [](const std::string& file, const std::string& point, const std::string& what) {
    return call(eval, EvalOptions{spec(file), point, what});
  };
  EXPECT_EQ(run("symreal3.json", "1,2,3,0,0,0", "omega").out, "36\n");
  EXPECT_NEAR(std::stod(run("symreal3.json", "1 2 3 0 0 0", "detP").out), 1296.0, 1e-9);
  auto phi = run("spiral.json", "[1, 0]", "phi");
  EXPECT_EQ(phi.code, 0);
  EXPECT_EQ(std::stod(phi.out), 0.0);
  auto zeta = run("symreal3.json", "1,1,1,0,0,0", "zeta");
  std::istringstream lines(zeta.out);
  double first;
  lines >> first;
  EXPECT_NEAR(first, 1.0 / 3, 1e-15);

  auto canonical = write_temp("canonical_potential.json", R"({"algebra": {"family": "SymReal", "m": 3},
      "potential": {"terms": [{"kind": "real-log", "coefficient": 0.16666666666666666}]}})");
  auto v = call(eval, EvalOptions{canonical, "1,2,3,0,0,0", "phi"});
  EXPECT_NEAR(std::stod(v.out), std::log(6.0) / 3, 1e-15);

  auto cut = run("spiral.json", "-1,0", "phi");
  EXPECT_EQ(cut.code, 0);
  EXPECT_NE(cut.err.find("branch cut"), std::string::npos);
}

TEST(Eval, Errors) {
  EXPECT_EQ(call(eval, EvalOptions{spec("symreal3.json"), "1,0,3,0,0,0", "detP"}).code, 1);
  EXPECT_EQ(call(eval, EvalOptions{spec("symreal3.json"), "1,2,3", "omega"}).code, 2);
  EXPECT_EQ(call(eval, EvalOptions{spec("symreal3.json"), "1,2,x,0,0,0", "omega"}).code, 2);
  EXPECT_EQ(call(eval, EvalOptions{spec("symreal3.json"), "1,2,3,0,0,0", "volume"}).code, 2);
  EXPECT_EQ(call(eval, EvalOptions{spec("perturbed_symreal3.json"), "1,2,3,0,0,0", "phi"}).code, 2);
}

TEST(Surface, OrthantCsv) {
  SurfaceOptions o;
  o.spec_path = spec("orthant3.json");
  o.out_path = (scratch() / "orthant.csv").string();
  o.seed = 42;
  auto r = call(surface, o);
  EXPECT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(o.out_path);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 101);
  Json report = Json::parse(r.out);
  EXPECT_LE(report.at("max_level_residual").get<double>(), 1e-9);
  EXPECT_LE(report.at("geometry").at("hypersphere_max").get<double>(), 1e-6);
}

TEST(Surface, SpiralLeafAndJson) {
  SurfaceOptions o;
  o.spec_path = spec("spiral.json");
  o.level = 0;
  o.count = 30;
  o.format = "json";
  o.out_path = (scratch() / "spiral.json").string();
  auto r = call(surface, o);
  EXPECT_EQ(r.code, 0) << r.err;
  auto back = read_sample_json(o.out_path);
  EXPECT_EQ(back.kind, "leaf");
  EXPECT_EQ(back.points.size(), 30u);
  EXPECT_LE(back.max_residual(), 1e-8);
}

TEST(Surface, ZeroCountWritesHeader) {
  SurfaceOptions o;
  o.spec_path = spec("orthant3.json");
  o.count = 0;
  o.out_path = (scratch() / "empty.csv").string();
  EXPECT_EQ(call(surface, o).code, 0);
  EXPECT_EQ(slurp(o.out_path), "x1,x2,x3,level_residual\n");
}

TEST(Surface, ErrorCodes) {
  SurfaceOptions o;
  o.spec_path = spec("orthant3.json");
  o.out_path = "/nonexistent-dir/out.csv";
  EXPECT_EQ(call(surface, o).code, 4);

  std::string parts;
  for (int k = 0; k < 12; ++k) parts += std::string(k ? "," : "") + R"({"family": "RealLine"})";
  SurfaceOptions thin;
  thin.spec_path = write_temp("orthant12.json", R"({"algebra": {"direct_sum": [)" + parts + "]}}");
  thin.out_path = (scratch() / "thin.csv").string();
  thin.spread = 1e4;
  thin.count = 20;
  EXPECT_EQ(call(surface, thin).code, 3);

  SurfaceOptions fmt = o;
  fmt.out_path = (scratch() / "x.txt").string();
  fmt.format = "xml";
  EXPECT_EQ(call(surface, fmt).code, 2);
}

TEST(Calabi, OrthantExample) {
  CalabiOptions o;
  o.config_path = spec("calabi_orthant.json");
  auto r = call(calabi, o);
  EXPECT_EQ(r.code, 0) << r.err;
  Json report = Json::parse(r.out);
  auto p = report.at("points")[0].get<std::vector<double>>();
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 2.0, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_NEAR(p[2], 1.0, 1e-15);
}

TEST(Calabi, MixedFactorsPass) {
  CalabiOptions o;
  o.config_path = spec("calabi_mixed.json");
  o.count = 100;
  auto r = call(calabi, o);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_LE(Json::parse(r.out).at("max_relative_error").get<double>(), 1e-8);
}

TEST(Calabi, OffConstraintIsAConfigError) {
  CalabiOptions o;
  o.config_path = spec("calabi_off_constraint.json");
  EXPECT_EQ(call(calabi, o).code, 2);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_binary("--help").code, 0);
  EXPECT_EQ(run_binary("frobnicate").code, 2);
  EXPECT_EQ(run_binary("verify").code, 2);
  auto ok = run_binary("verify --samples 10 " + spec("symreal3.json"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(Json::parse(ok.out).at("pass").get<bool>());
  EXPECT_EQ(run_binary("verify --samples 10 " + spec("perturbed_symreal3.json")).code, 1);
  EXPECT_EQ(run_binary("eval " + spec("symreal3.json") + " --point 1,2,3,0,0,0").out, "36\n");
  EXPECT_EQ(run_binary("calabi " + spec("calabi_off_constraint.json")).code, 2);
  EXPECT_EQ(run_binary("verify /nonexistent-dir/spec.json").code, 4);
}

TEST(Binary, SeedFlagAndEnvironment) {
  auto flag = run_binary("verify --samples 5 --seed 5 " + spec("symreal3.json"));
  EXPECT_EQ(Json::parse(flag.out).at("seed"), 5);
  auto env = run_binary("verify --samples 5 " + spec("symreal3.json"));
  EXPECT_EQ(Json::parse(env.out).at("seed"), 42);
  auto set = std::system(("JORDAN_SEED=11 " + std::string(JORDAN_CLI_PATH) + " verify --samples 5 " +
                          spec("symreal3.json") + " > " + (scratch() / "env.json").string() + " 2>/dev/null")
                             .c_str());
  ASSERT_EQ(WEXITSTATUS(set), 0);
  EXPECT_EQ(Json::parse(slurp((scratch() / "env.json").string())).at("seed"), 11);
}
