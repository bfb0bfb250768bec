#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cepd/drivers.hpp"
#include "cepd/warn.hpp"
#include "fixtures.hpp"

using namespace cepd;

namespace {

BoundaryPoint example_row() {
  BoundaryPoint row;
  row.T = 240;
  row.mu = -0.0775028;
  row.x1 = -0.986175;
  row.x2 = -0.502882;
  row.ebar1 = -0.0495888;
  row.ebar2 = -0.0501994;
  return row;
}

}  // namespace

TEST_CASE("the Gibbs-Duhem step reproduces the worked example") {
  const MuStep step = predict_mu_step(example_row(), std::nullopt, 250.0, 8.617e-5);
  CHECK(std::fabs(step.dmu_dbeta - (-2.6128e-5)) < 1e-9);
  CHECK_FALSE(step.gap_closure);
  // first step: old_dmu defaults to dmu, so the update is plain mu + dmu
  const double dbeta = 1.0 / (8.617e-5 * 250.0) - 1.0 / (8.617e-5 * 240.0);
  CHECK(step.dmu == doctest::Approx(step.dmu_dbeta * dbeta).epsilon(1e-12));
  CHECK(step.mu_next == doctest::Approx(example_row().mu + step.dmu).epsilon(1e-12));

  CHECK(std::fabs(finite_difference_dmu_dbeta(-0.0775028, 240.0, -0.0774447, 250.0, 8.617e-5) -
                  (-3.0039e-5)) < 1e-9);
}

TEST_CASE("a vanishing concentration gap signals closure") {
  BoundaryPoint row = example_row();
  row.x2 = row.x1;
  const MuStep step = predict_mu_step(row, 0.1, 250.0, 8.617e-5);
  CHECK(step.gap_closure);
  CHECK(step.mu_next == row.mu);
}

TEST_CASE("solve_boundary_mu_lte finds the hull slopes at low T") {
  const System sc = fixtures::sc_system();
  for (double T : {500.0, 2000.0, 10000.0})
    CHECK(solve_boundary_mu_lte(sc, 0, 1, T, 5e-3, 8.617e-5) == doctest::Approx(0.0).epsilon(1e-10));

  const System cb = fixtures::cb_system();
  CHECK(solve_boundary_mu_lte(cb, 0, 1, 1000.0, 1e-3, 8.617e-5) ==
        doctest::Approx(-6.0).epsilon(1e-3));
  CHECK(solve_boundary_mu_lte(cb, 1, 2, 1000.0, 1e-3, 8.617e-5) ==
        doctest::Approx(+6.0).epsilon(1e-3));

  CHECK_THROWS_WITH_AS(solve_boundary_mu_lte(sc, 0, 1, 60000.0, 5e-3, 8.617e-5),
                       doctest::Contains("raise ltep or lower T"), std::runtime_error);
}

TEST_CASE("the automatic start sits at the edge of LTE validity") {
  const System sc = fixtures::sc_system();
  const BoundaryStart start = find_boundary_start(sc, 0, 1, 5e-3, 8.617e-5);
  CHECK(start.mu == doctest::Approx(0.0).epsilon(1e-9));
  const double kbt = 8.617e-5 * start.T;
  CHECK(kbt > 0.5);
  CHECK(kbt < 3.0);
  // doubling the start temperature must leave LTE validity
  CHECK_THROWS(solve_boundary_mu_lte(sc, 0, 1, 2.0 * start.T, 5e-3, 8.617e-5));
}

TEST_CASE("tracking the sc boundary stays symmetric and closes") {
  const System sc = fixtures::sc_system();
  BoundaryPlan plan;
  plan.gs1 = 0;
  plan.gs2 = 1;
  plan.dT = 4000;
  plan.er = 6;  // 4x4x4 cell: coarse but fast
  plan.controls.dx = 0.02;
  plan.controls.k_B = 8.617e-5;
  plan.controls.ltep = 5e-3;
  plan.controls.seed = 1234;
  plan.controls.max_sweeps = 1 << 18;

  // a coarse, fast run; the er = 12 acceptance suite checks the tight bounds
  const auto rows = track_boundary(sc, plan);
  REQUIRE(rows.size() >= 5);
  for (const auto& row : rows) {
    CHECK(std::fabs(row.mu) < 0.02);
    if (row.flag.empty()) {
      CHECK(row.x1 < 0);
      CHECK(row.x2 > 0);
      CHECK(std::fabs(row.x1 + row.x2) < 0.15);
      CHECK(row.ebar1 == doctest::Approx(row.ebar2).epsilon(0.08));
    }
  }
  CHECK_FALSE(rows.back().flag.empty());
  CHECK(std::fabs(rows.back().x2 - rows.back().x1) < 0.5);
  // the run reaches the critical region, far above the start
  CHECK(rows.back().T > 30000);
  CHECK(rows.back().T < 70000);
}

TEST_CASE("starting in the one-phase region is rejected") {
  const System sc = fixtures::sc_system();
  BoundaryPlan plan;
  plan.gs1 = 0;
  plan.gs2 = 1;
  plan.start_T = 80000.0;  // far above the miscibility gap
  plan.start_mu = 0.0;
  plan.dT = 2000;
  plan.er = 6;
  plan.controls.dx = 0.01;
  plan.controls.k_B = 8.617e-5;
  plan.controls.seed = 5;
  CHECK_THROWS_WITH_AS(track_boundary(sc, plan),
                       doctest::Contains("does not stabilize this ground state"),
                       std::runtime_error);
}

TEST_CASE("the checkerboard zero-sweep scan prints the reference row") {
  const System cb = fixtures::cb_system();
  ScanPlan plan;
  plan.gs = 0;
  plan.mu0 = 0.5;
  plan.T0 = 10;
  plan.er = 20;
  plan.controls.k_B = 8.617e-5;
  plan.controls.n = 0;
  plan.controls.eq = 0;
  plan.controls.g2c = true;
  plan.controls.seed = 9;

  const auto rows = scan(cb, plan);
  REQUIRE(rows.size() == 1);
  const std::string line = format_row(rows[0]);
  CHECK(line.substr(0, 39) == "10.000000\t-12.000000\t2.400000\t-1.000000");
  // without g2c the energy column is the semi-grand E - mu x
  ScanPlan grand = plan;
  grand.controls.g2c = false;
  CHECK(scan(cb, grand)[0].E == doctest::Approx(2.4 - (-12.0) * (-1.0)));
}

TEST_CASE("tstat flags the scan when the walker leaves the seeded phase") {
  const System sc = fixtures::sc_system();
  ScanPlan plan;
  plan.gs = 0;
  plan.T0 = 1.0;
  plan.er = 3.5;  // 2x2x2 cell tunnels quickly
  plan.controls.k_B = 1.0;
  plan.controls.n = 4000;
  plan.controls.eq = 0;
  plan.controls.seed = 31;
  plan.controls.tstat = 0.5;

  // mu = -2 keeps the seeded phase stable: no flag
  plan.mu0 = -2.0;
  const auto stable_rows = scan(sc, plan);
  REQUIRE(stable_rows.size() == 1);
  CHECK(stable_rows[0].flag.empty());

  // mu = +2 makes the mirror phase stable (the exact ensemble confirms the
  // crossing); the walker follows and is flagged
  {
    Supercell small;
    small.repeats = {2, 2, 2};
    small.n_basis = 1;
    const LatticeModel m = LatticeModel::bind(sc.ce, small);
    CHECK(exact_thermo(m, 1.0, +2.0, 1.0).x > 0.9);
    CHECK(exact_thermo(m, 1.0, -2.0, 1.0).x < -0.9);
  }
  plan.mu0 = +2.0;
  const auto flagged_rows = scan(sc, plan);
  REQUIRE(flagged_rows.size() == 1);
  CHECK(flagged_rows[0].flag.find("tstat") != std::string::npos);

  // with the check disabled the same run is not flagged
  plan.controls.tstat = 0.0;
  CHECK(scan(sc, plan)[0].flag.empty());
}

TEST_CASE("scanned one-phase points stay outside the tracked two-phase region") {
  const System sc = fixtures::sc_system();
  BoundaryPlan plan;
  plan.gs1 = 0;
  plan.gs2 = 1;
  plan.dT = 4000;
  plan.T_stop = 40000;
  plan.er = 6;
  plan.controls.dx = 0.01;
  plan.controls.k_B = 8.617e-5;
  plan.controls.ltep = 5e-3;
  plan.controls.seed = 41;
  const auto boundary = track_boundary(sc, plan);
  REQUIRE(boundary.size() >= 4);

  ScanPlan sp;
  sp.gs = 0;
  sp.mu0 = -0.1;  // inside the phase-1 region for the whole T range
  sp.T0 = boundary.front().T;
  sp.T1 = boundary.back().T;
  sp.dT = 4000;
  sp.er = 6;
  sp.controls.dx = 0.01;
  sp.controls.k_B = 8.617e-5;
  sp.controls.seed = 42;
  sp.controls.tstat = 0;
  const auto points = scan(sc, sp);
  REQUIRE(points.size() == boundary.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!boundary[i].flag.empty()) continue;
    CHECK(points[i].x < boundary[i].x1 + 3.0 * (points[i].stderr_x + 0.01));
  }
}

TEST_CASE("tracking warns when the ground states are not adjacent") {
  // gs 0 and 2 skip the NaCl phase; their 'boundary' has no LTE-stable
  // window, so after the warning the start search fails
  const System cb = fixtures::cb_system();
  std::vector<std::string> messages;
  auto prev = set_warn_sink([&](const std::string& m) { messages.push_back(m); });
  BoundaryPlan plan;
  plan.gs1 = 0;
  plan.gs2 = 2;
  plan.dT = 500;
  plan.er = 4;
  plan.controls.k_B = 8.617e-5;
  plan.controls.dx = 0.01;
  plan.controls.seed = 3;
  CHECK_THROWS_AS(track_boundary(cb, plan), std::runtime_error);
  set_warn_sink(prev);
  bool warned = false;
  for (const auto& m : messages)
    if (m.find("not adjacent") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("annealing the sc model at mu > 0 lands in the pure phase") {
  const System sc = fixtures::sc_system();
  const AnnealReport report =
      anneal_ground_state(sc, 0.5, {3.0, 2.0, 1.5, 1.0, 0.6, 0.3}, 800, 5.0, 77, 1.0);
  CHECK(report.x == doctest::Approx(1.0));
  CHECK(report.e == doctest::Approx(-3.0));
  CHECK_FALSE(report.hull_violation);
}

TEST_CASE("a downward restart reproduces the upward boundary") {
  const System sc = fixtures::sc_system();
  BoundaryPlan up;
  up.gs1 = 0;
  up.gs2 = 1;
  up.dT = 4000;
  up.er = 6;
  up.controls.max_sweeps = 1 << 18;
  up.controls.dx = 0.01;
  up.controls.k_B = 8.617e-5;
  up.controls.ltep = 5e-3;
  up.controls.seed = 17;
  const auto rows = track_boundary(sc, up);
  REQUIRE(rows.size() >= 4);

  BoundaryPlan down = up;
  down.controls.seed = 18;
  down.start_T = rows[3].T;
  down.start_mu = rows[3].mu;
  down.dn = true;
  down.T_stop = rows[0].T - 1;
  const auto back = track_boundary(sc, down);
  REQUIRE(back.size() >= 3);
  for (const auto& row : back) CHECK(std::fabs(row.mu) < 5e-3);
}

TEST_CASE("systems load from a directory, preferring teci.out") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cepd_load_test";
  fs::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    out << text;
  };
  put("lat.in", fixtures::kScLatIn);
  put("clusters.out", fixtures::kScClustersOut);
  put("eci.out", fixtures::kScEciOut);
  put("gs_str.out", fixtures::kScGsStrOut);

  const System plain = System::load_from_directory(dir.string());
  CHECK_FALSE(plain.ce.teci.has_value());
  CHECK(plain.gs.size() == 2);

  put("teci.out", "100 2 100\n0\n0\n-1\n0\n0\n-2\n");
  const System with_teci = System::load_from_directory(dir.string());
  REQUIRE(with_teci.ce.teci.has_value());
  CHECK(eci_at_temperature(with_teci.ce, 150.0).values[2] == doctest::Approx(-1.5));
  fs::remove_all(dir);
}
