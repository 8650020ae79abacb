#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "discospec/forward.hpp"
#include "discospec/io.hpp"

namespace fs = std::filesystem;
using namespace discospec;

namespace {

const std::string fixtures = FIXTURE_DIR;

int run(const std::string& args) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_root() { return fs::temp_directory_path() / ("discospec_cli_" + std::to_string(::getpid())); }

fs::path scratch(const std::string& name) {
  const fs::path p = scratch_root() / name;
  fs::remove_all(p);
  return p;
}

struct RemoveScratch {
  ~RemoveScratch() {
    std::error_code ec;
    fs::remove_all(scratch_root(), ec);
  }
} remove_scratch;

}  // namespace

TEST_CASE("selftest and usage exit codes") {
  CHECK(run("selftest") == 0);
  CHECK(run("no-such-command") == 64);
  CHECK(run("") == 64);
  CHECK(run("--help") == 0);
}

TEST_CASE("forward CSV reproduces the free spectrum") {
  const fs::path out = scratch("fw") / "free.csv";
  REQUIRE(run("forward --problem " + fixtures + "/free.json --nmax 10 --out " + out.string()) == 0);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "n,lambda,sqrt_lambda,residual_abs");
  int n = 0;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stoi(line.substr(0, c1)) == n);
    const double lambda = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(std::abs(lambda - n * n * M_PI * M_PI) <= 1e-9 * (1 + n * n * M_PI * M_PI));
    ++n;
  }
  CHECK(n == 11);
  CHECK(fs::exists(out.parent_path() / "manifest.json"));
  const auto body = slurp(out);
  CHECK(body.find('\r') == std::string::npos);
}

TEST_CASE("manifest digests the inputs") {
  const fs::path dir = scratch("manifest");
  REQUIRE(run("forward --problem " + fixtures + "/poly.json --nmax 5 --out " + (dir / "s.json").string()) == 0);
  const json m = read_json_file((dir / "manifest.json").string());
  CHECK(m["subcommand"] == "forward");
  CHECK(m["inputs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK(m["outputs"][0] == "s.json");
  CHECK(m.contains("wall_time_s"));
  CHECK(m.contains("version"));
}

TEST_CASE("repeated runs give byte-identical CSV") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& d : {a, b}) {
    REQUIRE(run("forward --problem " + fixtures + "/poly.json --nmax 40 --out " + (d / "f.csv").string()) == 0);
    REQUIRE(run("asym --problem " + fixtures + "/poly.json --nmax 40 --out " + (d / "a.csv").string()) == 0);
    REQUIRE(run("experiment --config " + fixtures + "/experiment.json --out " + (d / "exp").string()) == 0);
  }
  CHECK(slurp(a / "f.csv") == slurp(b / "f.csv"));
  CHECK(slurp(a / "a.csv") == slurp(b / "a.csv"));
  CHECK(slurp(a / "exp" / "summary.csv") == slurp(b / "exp" / "summary.csv"));
  CHECK(slurp(a / "exp" / "sigma_1.json") == slurp(b / "exp" / "sigma_1.json"));
}

TEST_CASE("tool output re-reads to the same document") {
  const fs::path dir = scratch("rt");
  REQUIRE(run("forward --problem " + fixtures + "/poly.json --nmax 60 --out " + (dir / "s1.json").string()) == 0);
  REQUIRE(run("forward --problem " + fixtures + "/poly_dirichlet.json --nmax 60 --out " + (dir / "s2.json").string()) ==
          0);
  REQUIRE(run("conditions --spectra " + (dir / "s1.json").string() + " " + (dir / "s2.json").string() +
              " --subsets regular:sigma=0.6 --out " + (dir / "cond").string()) == 0);
  const json spec = read_json_file((dir / "s1.json").string());
  CHECK(json(spec.get<Spectrum>()) == spec);
  const json rep = read_json_file((dir / "cond" / "report.json").string());
  for (const auto& r : rep["reports"]) CHECK(json(r.get<ConditionReport>()) == r);
  for (const auto& s : rep["subsets"]) CHECK(json(s.get<SpectralSubset>()) == s);

  REQUIRE(run("experiment --config " + fixtures + "/experiment.json --out " + (dir / "exp").string()) == 0);
  const json row = read_json_file((dir / "exp" / "sigma_1.json").string());
  CHECK(json(row["row"].get<ExperimentRow>()) == row["row"]);
}

TEST_CASE("conditions with explicit index lists") {
  const fs::path dir = scratch("cond_lists");
  REQUIRE(run("conditions --spectra " + fixtures + "/poly.json " + fixtures +
              "/poly_dirichlet.json --nmax 40 --subsets '[[0,1,2,3,5,8,13],[0,2,4]]' --check I --out " +
              dir.string()) == 0);
  const json rep = read_json_file((dir / "report.json").string());
  CHECK(rep["reports"][0]["condition"] == "I");
  CHECK(rep["reports"][0].contains("verdict"));
}

TEST_CASE("invert writes a result and maps failures onto exit codes") {
  const fs::path dir = scratch("inv");
  fs::create_directories(dir);
  const auto truth = read_json_file(fixtures + "/poly.json").get<ProblemSpec>();
  InverseSetup s;
  s.known_tail = truth.q;
  s.cells = 4;
  const Params t{projected_head(s, truth.q), 0.3, -0.2, 2.0, 1.0};
  DataSet d;
  for (const auto& v : eigenvalues(s.problem(t, {}), 20).values) d.target.push_back({v.n, v.lambda});
  s.data = {d};
  s.initial = t;
  s.initial.q_head.assign(4, 0.0);
  s.initial.h = 0.0;
  write_json_file((dir / "setup.json").string(), s);
  REQUIRE(run("invert --setup " + (dir / "setup.json").string() + " --out " + (dir / "r.json").string()) == 0);
  const auto r = read_json_file((dir / "r.json").string()).get<InverseResult>();
  CHECK(r.misfit < 1e-20);
  CHECK(std::abs(r.recovered.h - 0.3) < 1e-8);

  // One iteration from a poor start cannot converge: numerical failure.
  s.max_iterations = 1;
  write_json_file((dir / "one.json").string(), s);
  CHECK(run("invert --setup " + (dir / "one.json").string() + " --out " + (dir / "r1.json").string()) == 3);

  // More unknowns than data: contract error.
  s.data[0].target.resize(3);
  write_json_file((dir / "bad.json").string(), s);
  CHECK(run("invert --setup " + (dir / "bad.json").string() + " --out " + (dir / "r2.json").string()) == 2);
}

TEST_CASE("bad inputs are contract errors") {
  const fs::path dir = scratch("bad");
  fs::create_directories(dir);
  std::ofstream(dir / "broken.json") << "{\"q\": [";
  CHECK(run("forward --problem " + (dir / "broken.json").string()) == 2);
  CHECK(run("forward --problem " + (dir / "missing.json").string()) == 2);
  CHECK(run("probe --mode sideways --out " + (dir / "p").string()) == 2);
  CHECK(run("forward") == 64);
}

TEST_CASE("probe summaries") {
  const fs::path dir = scratch("probe");
  REQUIRE(run("probe --pair " + fixtures + "/poly.json " + fixtures + "/poly_head.json --mode identity --out " +
              dir.string()) == 0);
  const json s = read_json_file((dir / "summary.json").string());
  CHECK(s["max_rel_diff"].get<double>() < 1e-6);
  CHECK(fs::exists(dir / "identity.csv"));
}
