#include "biot/io.hpp"
#include "biot/runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace biot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name)
{
  const auto dir = fs::temp_directory_path() / ("biot_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int code_of(auto &&fn)
{
  try {
    fn();
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
  return exit_ok;
}

const char *small_single = R"({"study": "single", "geometry": {"type": "unit_square", "n": 4}, "source": "manufactured"})";

} // namespace

TEST(Runner, SingleRunWritesCsvAndVtk)
{
  const auto dir = scratch("single");
  const auto cfg = parse_config(small_single);
  RunOptions opt;
  opt.output_dir = dir;
  const auto res = run_study(cfg, opt);
  EXPECT_EQ(res.exit_code, exit_ok);
  ASSERT_TRUE(fs::exists(dir / "single.csv"));
  ASSERT_TRUE(fs::exists(dir / "solution.vtk"));
  const auto csv = slurp(dir / "single.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n') + 1), runs_csv_header());
  EXPECT_NE(slurp(dir / "solution.vtk").find("p_abs"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Runner, RerunIsByteIdentical)
{
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  const auto cfg = parse_config(small_single);
  run_study(cfg, {a, false, false});
  run_study(cfg, {b, false, false});
  for (const char *f : {"single.csv", "solution.vtk"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, ConvergenceStudyWritesSlopes)
{
  const auto dir = scratch("conv");
  const auto cfg = parse_config(R"({"study": "convergence", "geometry": {"type": "unit_square", "levels": [2, 4, 8]}})");
  const auto res = run_study(cfg, {dir, true, false});
  EXPECT_EQ(res.exit_code, exit_ok);
  const auto csv = slurp(dir / "convergence.csv");
  EXPECT_NE(csv.find("# slopes u="), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  fs::remove_all(dir);
}

TEST(Runner, OutputDirectoryPrecedence)
{
  RunConfig cfg;
  ::unsetenv("BIOTFEM_OUTPUT_DIR");
  EXPECT_EQ(resolve_output_dir(cfg, {}), fs::path("biotfem_output"));
  ::setenv("BIOTFEM_OUTPUT_DIR", "/tmp/env_out", 1);
  EXPECT_EQ(resolve_output_dir(cfg, {}), fs::path("/tmp/env_out"));
  cfg.output_dir = "cfg_out";
  EXPECT_EQ(resolve_output_dir(cfg, {}), fs::path("cfg_out"));
  EXPECT_EQ(resolve_output_dir(cfg, {"cli_out", false, false}), fs::path("cli_out"));
  ::unsetenv("BIOTFEM_OUTPUT_DIR");
}

TEST(Runner, ExplicitBoundaryOnGmshMesh)
{
  const auto dir = scratch("gmsh");
  const auto text = std::string(R"({"study": "single", "geometry": {"type": "gmsh", "path": ")") + BIOT_TEST_DATA +
                    R"(/two_groups_v41.msh"},
    "material": {"kappa": {"5": 0.1}},
    "boundary": {
      "1": {"displacement": {"kind": "dirichlet", "value": [0, 0]}, "pressure": {"kind": "dirichlet", "value": 1}},
      "2": {"displacement": {"kind": "traction", "value": [0, 0.01]}, "pressure": {"kind": "flux", "value": 0}}
    }})";
  const auto cfg = parse_config(text);
  const auto res = run_study(cfg, {dir, false, false});
  EXPECT_EQ(res.exit_code, exit_ok);
  EXPECT_TRUE(fs::exists(dir / "solution.vtk"));
  fs::remove_all(dir);
}

TEST(ExitCodes, MapFailureClasses)
{
  EXPECT_EQ(code_of([] { throw ConfigError({"x"}); }), exit_config_error);
  EXPECT_EQ(code_of([] { throw ParameterError("x"); }), exit_config_error);
  EXPECT_EQ(code_of([] { throw SolverError("x"); }), exit_solver_failure);
  EXPECT_EQ(code_of([] { throw IoError("x"); }), exit_io_error);
  EXPECT_EQ(code_of([] {}), exit_ok);
}

TEST(ExitCodes, MissingGeometryFileIsAnIoError)
{
  const auto cfg = parse_config(R"({"study": "single", "geometry": {"type": "gmsh", "path": "/nonexistent/m.msh"},
    "boundary": {"1": {"displacement": {"kind": "dirichlet", "value": [0, 0]}, "pressure": {"kind": "flux", "value": 0}}}})");
  EXPECT_EQ(code_of([&] { run_study(cfg, {scratch("missing"), false, false}); }), exit_io_error);
}

TEST(ExitCodes, UnknownBoundaryTagIsAConfigError)
{
  const auto cfg = parse_config(R"({"study": "single", "geometry": {"type": "unit_square", "n": 2},
    "boundary": {"north": {"displacement": {"kind": "dirichlet", "value": [0, 0]}, "pressure": {"kind": "flux", "value": 0}}}})");
  EXPECT_EQ(code_of([&] { run_study(cfg, {scratch("tag"), false, false}); }), exit_config_error);
}

TEST(ExitCodes, IterationLimitIsASolverFailure)
{
  const auto cfg = parse_config(R"({"study": "single", "geometry": {"type": "unit_square", "n": 8},
    "solver": {"method": "gmres", "max_iter": 2, "precond": "none", "tol": 1e-14}})");
  const auto dir = scratch("iter");
  EXPECT_EQ(run_study(cfg, {dir, false, false}).exit_code, exit_solver_failure);
  EXPECT_TRUE(fs::exists(dir / "single.csv"));
  fs::remove_all(dir);
}
