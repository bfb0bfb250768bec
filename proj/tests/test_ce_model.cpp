#include <doctest.h>

#include <cmath>
#include <vector>

#include "cepd/ce_model.hpp"
#include "cepd/mc_engine.hpp"
#include "cepd/warn.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cepd;

namespace {

Supercell cube(int n) {
  Supercell c;
  c.repeats = {n, n, n};
  c.n_basis = 1;
  return c;
}

}  // namespace

TEST_CASE("building the sc expansion warns about the stated multiplicity") {
  std::vector<std::string> messages;
  auto prev = set_warn_sink([&](const std::string& m) { messages.push_back(m); });
  const System sys = fixtures::sc_system();
  set_warn_sink(prev);
  REQUIRE(messages.size() == 1);
  CHECK(messages[0].find("stated multiplicity 6") != std::string::npos);
  CHECK(sys.ce.orbits[2].per_cell_multiplicity() == 3);
}

TEST_CASE("the checkerboard deck's multiplicities agree with the recomputation") {
  std::vector<std::string> messages;
  auto prev = set_warn_sink([&](const std::string& m) { messages.push_back(m); });
  const System sys = fixtures::cb_system();
  set_warn_sink(prev);
  CHECK(messages.empty());
  CHECK(sys.ce.orbits[2].per_cell_multiplicity() == 3);
  CHECK(sys.ce.orbits[3].per_cell_multiplicity() == 3);
}

TEST_CASE("correlations: uniform, NaCl and the point identity") {
  const System sc = fixtures::sc_system();
  const LatticeModel m = LatticeModel::bind(sc.ce, cube(2));
  SpinConfig all_ni;
  all_ni.assign(8, -1);
  const auto corr = correlations(m, all_ni);
  REQUIRE(corr.size() == 3);
  CHECK(corr[0] == doctest::Approx(1.0));
  CHECK(corr[1] == doctest::Approx(-1.0));
  CHECK(corr[2] == doctest::Approx(1.0));

  const System cb = fixtures::cb_system();
  const LatticeModel mcb = LatticeModel::bind(cb.ce, cube(2));
  const Tiling nacl = spin_config_from_structure(cb.gs_structures[1], cb.lattice, cube(2));
  const auto nacl_corr = correlations(mcb, nacl.config);
  REQUIRE(nacl_corr.size() == 4);
  CHECK(nacl_corr[0] == doctest::Approx(1.0));
  CHECK(nacl_corr[1] == doctest::Approx(0.0));
  CHECK(nacl_corr[2] == doctest::Approx(-1.0));
  CHECK(nacl_corr[3] == doctest::Approx(1.0));

  Rng rng = Rng::seeded(7);
  for (int trial = 0; trial < 4; ++trial) {
    const SpinConfig random = random_config(27, 0.3, rng);
    const LatticeModel m3 = LatticeModel::bind(sc.ce, cube(3));
    CHECK(correlations(m3, random)[1] == doctest::Approx(random.x()).epsilon(1e-12));
  }
}

TEST_CASE("energy anchors: -3, 2.4 and -3.6 per atom") {
  const System sc = fixtures::sc_system();
  const LatticeModel msc = LatticeModel::bind(sc.ce, cube(3));
  SpinConfig pure;
  pure.assign(27, -1);
  CHECK(energy_per_site(msc, pure) == doctest::Approx(-3.0).epsilon(1e-12));

  const System cb = fixtures::cb_system();
  const LatticeModel mcb = LatticeModel::bind(cb.ce, cube(4));
  SpinConfig pure4;
  pure4.assign(64, -1);
  CHECK(energy_per_site(mcb, pure4) == doctest::Approx(2.4).epsilon(1e-12));

  const Tiling nacl = spin_config_from_structure(cb.gs_structures[1], cb.lattice, cube(4));
  CHECK(energy_per_site(mcb, nacl.config) == doctest::Approx(-3.6).epsilon(1e-12));
}

TEST_CASE("energy per site is independent of the supercell") {
  const System cb = fixtures::cb_system();
  for (int n : {2, 4, 6}) {
    const LatticeModel m = LatticeModel::bind(cb.ce, cube(n));
    const Tiling nacl = spin_config_from_structure(cb.gs_structures[1], cb.lattice, cube(n));
    CHECK(energy_per_site(m, nacl.config) == doctest::Approx(-3.6).epsilon(1e-12));
  }
}

TEST_CASE("energies match direct bond counting on random configurations") {
  const System sc = fixtures::sc_system();
  const System cb = fixtures::cb_system();
  const LatticeModel msc = LatticeModel::bind(sc.ce, cube(4));
  const LatticeModel mcb = LatticeModel::bind(cb.ce, cube(4));
  const auto sc_oracle = oracles::sc_nn_model(-1.0);
  const auto cb_oracle = oracles::cb_model();
  Rng rng = Rng::seeded(99);
  for (int trial = 0; trial < 10; ++trial) {
    const SpinConfig config = random_config(64, -0.2, rng);
    CHECK(energy_per_site(msc, config) ==
          doctest::Approx(oracles::bond_count_energy(sc_oracle, config, cube(4))).epsilon(1e-12));
    CHECK(energy_per_site(mcb, config) ==
          doctest::Approx(oracles::bond_count_energy(cb_oracle, config, cube(4))).epsilon(1e-12));
  }
}

TEST_CASE("single-flip costs hit the known anchors 9.6 and 12") {
  const System cb = fixtures::cb_system();
  const LatticeModel mcb = LatticeModel::bind(cb.ce, cube(4));
  SpinConfig pure;
  pure.assign(64, -1);
  CHECK(std::fabs(delta_grand(mcb, pure, 0, 0.0)) == doctest::Approx(9.6).epsilon(1e-12));
  CHECK(delta_energy(mcb, pure, 0, cb.ce.eci.values) == doctest::Approx(-9.6).epsilon(1e-12));

  const System sc = fixtures::sc_system();
  const LatticeModel msc = LatticeModel::bind(sc.ce, cube(4));
  CHECK(std::fabs(delta_grand(msc, pure, 0, 0.0)) == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("flipping a site twice is a no-op for the grand quantity") {
  const System cb = fixtures::cb_system();
  const LatticeModel m = LatticeModel::bind(cb.ce, cube(3));
  Rng rng = Rng::seeded(3);
  SpinConfig config = random_config(27, 0.0, rng);
  for (int site : {0, 5, 26}) {
    const double d1 = delta_grand(m, config, site, 0.7);
    config.flip(site);
    const double d2 = delta_grand(m, config, site, 0.7);
    config.flip(site);
    CHECK(d1 + d2 == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("locality: delta_grand equals the recomputed difference") {
  const System cb = fixtures::cb_system();
  const LatticeModel m = LatticeModel::bind(cb.ce, cube(4));
  Rng rng = Rng::seeded(11);
  SpinConfig config = random_config(64, 0.1, rng);
  const double mu = -0.35;
  for (int k = 0; k < 10000; ++k) {
    const int site = static_cast<int>(rng.below(64));
    const double before = energy_total(m, config, cb.ce.eci.values) - mu * config.sum_sigma;
    const double predicted = delta_grand(m, config, site, mu);
    config.flip(site);
    const double after = energy_total(m, config, cb.ce.eci.values) - mu * config.sum_sigma;
    CHECK(std::fabs(predicted - (after - before)) < 1e-9 * 64);
  }
}

TEST_CASE("the separating model is symmetric under global spin flip") {
  const System sc = fixtures::sc_system();
  const LatticeModel m = LatticeModel::bind(sc.ce, cube(3));
  Rng rng = Rng::seeded(21);
  for (int trial = 0; trial < 5; ++trial) {
    SpinConfig config = random_config(27, 0.4, rng);
    SpinConfig mirrored = config;
    for (int i = 0; i < 27; ++i) mirrored.set(i, static_cast<std::int8_t>(-config.sigma[i]));
    const double mu = 0.8;
    CHECK(energy_per_site(m, config) == doctest::Approx(energy_per_site(m, mirrored)).epsilon(1e-12));
    const double grand = energy_total(m, config, sc.ce.eci.values) - mu * config.sum_sigma;
    const double grand_m = energy_total(m, mirrored, sc.ce.eci.values) + mu * mirrored.sum_sigma;
    CHECK(grand == doctest::Approx(grand_m).epsilon(1e-12));
  }
}

TEST_CASE("correlations stay inside [-1, 1]") {
  const System cb = fixtures::cb_system();
  const LatticeModel m = LatticeModel::bind(cb.ce, cube(3));
  Rng rng = Rng::seeded(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto corr = correlations(m, random_config(27, -0.5 + 0.2 * trial, rng));
    CHECK(corr[0] == 1.0);
    for (double c : corr) {
      CHECK(c <= 1.0 + 1e-12);
      CHECK(c >= -1.0 - 1e-12);
    }
  }
}

TEST_CASE("eci_at_temperature interpolates the teci grid") {
  TEciTable teci;
  teci.t_start = 100;
  teci.count = 3;
  teci.t_step = 100;
  teci.rows = {EciTable{{0.0, 0.0, -1.0}}, EciTable{{0.1, 0.0, -1.2}}, EciTable{{0.2, 0.0, -1.6}}};
  System sys = System::from_parts(parse_lattice(fixtures::kScLatIn),
                                  parse_clusters(fixtures::kScClustersOut),
                                  parse_eci(fixtures::kScEciOut), teci,
                                  parse_structures(fixtures::kScGsStrOut));

  CHECK(eci_at_temperature(sys.ce, 200).values[2] == doctest::Approx(-1.2));
  CHECK(eci_at_temperature(sys.ce, 150).values[2] == doctest::Approx(-1.1));
  CHECK(eci_at_temperature(sys.ce, 150).values[0] == doctest::Approx(0.05));

  std::vector<std::string> messages;
  auto prev = set_warn_sink([&](const std::string& m) { messages.push_back(m); });
  CHECK(eci_at_temperature(sys.ce, 1000).values[2] == doctest::Approx(-1.6));
  set_warn_sink(prev);
  REQUIRE(messages.size() == 1);
  CHECK(messages[0].find("clamping") != std::string::npos);
}

TEST_CASE("without a teci table the static values are used at any T") {
  const System sys = fixtures::sc_system();
  CHECK(eci_at_temperature(sys.ce, 12345.0).values == sys.ce.eci.values);
}
