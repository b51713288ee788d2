#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellstar/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ellstar_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "run.cfg";
  std::ofstream(path) << text;
  return path;
}

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ellstar");
  std::ostringstream out, err;
  Run r;
  r.code = ellstar::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("solve on the default configuration") {
  const auto dir = scratch("solve");
  const auto r = invoke({"--out", dir.string(), "solve"});
  REQUIRE_MESSAGE(r.code == ellstar::kExitOk, r.err);
  const auto doc = read_json(dir / "summary.json");
  const double E = doc["energy"]["E"];
  const double w = doc["components"][0]["omega"];
  CHECK(E < 0.0);
  CHECK(std::abs(w / E - 6.0) <= 6e-3);
  for (const auto& c : doc["checks"]) CHECK_MESSAGE(c["pass"].get<bool>(), c["name"]);
  const auto lines = read_lines(dir / "profile.csv");
  REQUIRE(lines.size() == 32768 + 1);
  CHECK(lines[0] == "r,f_1_re,f_1_im,n,U,V");
}

TEST_CASE("configuration errors exit with code 2") {
  const auto dir = scratch("errors");
  const auto empty = write_config(dir, "components =\n");
  auto r = invoke({"--config", empty.string(), "--out", dir.string(), "solve"});
  CHECK(r.code == ellstar::kExitConfig);
  CHECK(r.err.find("run.cfg:1") != std::string::npos);

  CHECK(invoke({"--config", (dir / "missing.cfg").string(), "solve"}).code == ellstar::kExitConfig);
  CHECK(invoke({"launch"}).code == ellstar::kExitConfig);
  CHECK(invoke({}).code == ellstar::kExitConfig);
  CHECK(invoke({"solve", "--bogus"}).code == ellstar::kExitConfig);
  CHECK(invoke({"--out", dir.string(), "verify", "--resolution-factor", "0"}).code ==
        ellstar::kExitConfig);
  const auto multi = write_config(dir, "components = 0:1, 1:1\n");
  CHECK(invoke({"--config", multi.string(), "--out", dir.string(), "shoot"}).code ==
        ellstar::kExitConfig);
  CHECK(invoke({"--help"}).code == ellstar::kExitOk);
}

TEST_CASE("solver failure exits with code 1") {
  const auto dir = scratch("failure");
  const auto cfg = write_config(dir, "grid.n_points = 1024\nsolver.max_iterations = 2\n");
  const auto r = invoke({"--config", cfg.string(), "--out", dir.string(), "solve"});
  CHECK(r.code == ellstar::kExitNumerical);
  CHECK(r.err.find("residual") != std::string::npos);
}

TEST_CASE("shoot an excited state") {
  const auto dir = scratch("shoot");
  const auto cfg = write_config(dir, "components = 0:1\nshoot.n_nodes = 1\ngrid.n_points = 8192\n");
  const auto r = invoke({"--config", cfg.string(), "--out", dir.string(), "shoot"});
  REQUIRE_MESSAGE(r.code == ellstar::kExitOk, r.err);
  const auto doc = read_json(dir / "summary.json");
  CHECK(doc["nodes"] == 1);
  CHECK(doc["converged"] == true);
  CHECK(doc["N"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(doc["omega"].get<double>() < 0.0);
  CHECK(read_lines(dir / "profile.csv").size() == 8192 + 1);
}

TEST_CASE("short evolution") {
  const auto dir = scratch("evolve");
  const auto cfg = write_config(dir, R"(potential.kind = point_mass
potential.M = 1
evolution.n_points = 1024
evolution.periods = 1
evolution.dt_factor = 0.05
evolution.perturbation = noise
evolution.output_every = 5
)");
  const auto r = invoke({"--config", cfg.string(), "--out", dir.string(), "--seed", "9", "evolve"});
  REQUIRE_MESSAGE(r.code == ellstar::kExitOk, r.err);
  const auto doc = read_json(dir / "summary.json");
  CHECK(doc["seed"] == 9);
  CHECK(doc["truncated"] == false);
  CHECK(doc["max_relative_norm_drift"].get<double>() < 1e-10);
  CHECK(doc["dist_orbit_initial"].get<double>() > 0.0);
  const auto lines = read_lines(dir / "trace.csv");
  CHECK(lines[0] == "t,E,N_1,dist_orbit,r_mean");
  const int steps = doc["steps"];
  CHECK(lines.size() == static_cast<std::size_t>(1 + 1 + (steps + 4) / 5));

  // same seed, same output
  const auto again = scratch("evolve_again");
  REQUIRE(invoke({"--config", cfg.string(), "--out", again.string(), "--seed", "9", "evolve"}).code == 0);
  CHECK(read_lines(again / "trace.csv") == lines);
}

TEST_CASE("small sweep") {
  const auto dir = scratch("sweep");
  const auto cfg = write_config(dir, "grid.n_points = 2048\nsweep.M = 0, 1\nsweep.N = 0.5, 1\nsweep.workers = 2\n");
  const auto r = invoke({"--config", cfg.string(), "--out", dir.string(), "sweep"});
  REQUIRE_MESSAGE(r.code == ellstar::kExitOk, r.err);
  const auto lines = read_lines(dir / "sweep.csv");
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "M,N,E,T,L,D,omega,residual,nodes");
  const auto doc = read_json(dir / "sweep.json");
  CHECK(doc["failures"].empty());
  for (const auto& c : doc["checks"]) CHECK(c["pass"].get<bool>());
}
