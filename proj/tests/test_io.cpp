#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "discospec/errors.hpp"
#include "discospec/forward.hpp"
#include "discospec/io.hpp"
#include "oracles.hpp"

using namespace discospec;

namespace {

// Serialize, re-read, serialize again: the two documents must be equal.
template <class T>
void check_round_trip(const T& value) {
  const json first = value;
  const T back = json::parse(first.dump()).get<T>();
  const json second = back;
  CHECK(first == second);
}

}  // namespace

TEST_CASE("problem fixtures round-trip") {
  for (const auto& e : std::filesystem::directory_iterator(FIXTURE_DIR)) {
    const json j = read_json_file(e.path().string());
    if (!j.contains("q")) continue;
    CAPTURE(e.path().string());
    const auto p = j.get<ProblemSpec>();
    check_round_trip(p);
    CHECK(json(p).get<ProblemSpec>() == p);
  }
}

TEST_CASE("problem JSON layout") {
  const auto p = oracle::free_problem(0.3, Dirichlet{}, 2.0, 1.0);
  const json j = p;
  CHECK(j["right"] == "dirichlet");
  CHECK(j["a1"] == 2.0);
  const auto r = json(oracle::free_problem(0.0, Robin{-0.2}, 1.0, 0.0));
  CHECK(r["right"]["robin"] == -0.2);
}

TEST_CASE("short coefficient lists are padded") {
  const auto j = json::parse(R"({"q":[{"interval":[0,1],"coeffs":[2]}],"h":0,"right":"dirichlet","a1":1,"a2":0})");
  const auto p = j.get<ProblemSpec>();
  CHECK(p.q(0.7) == 2.0);
  CHECK(p.q.pieces().size() == 2);  // split at 1/2
}

TEST_CASE("malformed problems are contract errors") {
  CHECK_THROWS_AS(json::parse(R"({"q":[],"h":0,"right":"neumann","a1":1,"a2":0})").get<ProblemSpec>(), ContractError);
  CHECK_THROWS_AS(json::parse(R"({"q":[],"h":0,"right":"dirichlet","a1":1})").get<ProblemSpec>(), ContractError);
  CHECK_THROWS_AS(json::parse(R"({"q":[],"h":0,"right":"dirichlet","a1":-1,"a2":0})").get<ProblemSpec>(), Error);
}

TEST_CASE("non-finite numbers survive") {
  CHECK(std::isinf(get_num(json::parse(num(INFINITY).dump()))));
  CHECK(get_num(num(-INFINITY)) < 0);
  CHECK(std::isnan(get_num(num(NAN))));
  CHECK_THROWS_AS(get_num(json("x")), ContractError);
}

TEST_CASE("computed objects round-trip") {
  const auto p = oracle::smooth_problem(0.3, Robin{-0.2}, 2.0, 1.0);
  const auto s = eigenvalues(p, 30);
  check_round_trip(s);
  CHECK(json(s).get<Spectrum>().values[7].lambda == s.values[7].lambda);

  const auto sub = generate_regular_subset(s, 0.7, "lambda1").subset;
  check_round_trip(sub);
  CHECK(json(sub).get<SpectralSubset>() == sub);

  auto d = p;
  d.right = Dirichlet{};
  const auto sd = eigenvalues(d, 30);
  check_round_trip(check_density_i(sub, generate_regular_subset(sd, 0.7).subset, s, sd, 0.7, default_r_grid(
                                                                                               std::vector{s, sd})));
  check_round_trip(check_condition_I(sub, 30));

  InverseSetup setup;
  setup.known_tail = p.q;
  setup.cells = 4;
  setup.unknowns = {true, true, false, false, true};
  setup.data = {{{}, sub.picks}, {{DataFamily::Kind::FixedRobin, 0.4}, {{1, 2.0}}}};
  setup.initial = {{1, 2, 3, 4}, 0.1, 0.2, 2.0, 1.0};
  setup.truth = setup.initial;
  setup.regularization = 1e-3;
  check_round_trip(setup);
  const auto back = json(setup).get<InverseSetup>();
  CHECK(back.unknowns == setup.unknowns);
  CHECK(back.data == setup.data);

  InverseResult r;
  r.recovered = setup.initial;
  r.residuals = {{0, 1e-12}, {3, -2e-13}};
  r.misfit = INFINITY;
  r.trace = {{0, 1.0, 0.0}, {1, 0.5, 1e-3}};
  r.status = "stalled";
  r.q_error_l2 = 0.25;
  check_round_trip(r);

  ExperimentConfig c;
  c.truth = p;
  c.extra_H = {0.7};
  c.seed = 12345678901234ULL;
  check_round_trip(c);
  CHECK(json(c).get<ExperimentConfig>().seed == c.seed);

  ExperimentReport rep;
  rep.truth_params = setup.initial;
  ExperimentRow row;
  row.sigma = 0.55;
  row.runs = {r, r};
  rep.rows = {row};
  check_round_trip(rep);
}
