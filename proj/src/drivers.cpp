#include "cepd/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cepd/warn.hpp"

namespace cepd {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<double> sequence(double a, const std::optional<double>& b, double d) {
  if (!b || std::fabs(*b - a) < 1e-12) return {a};
  if (d == 0.0) throw std::runtime_error("range requested with zero step");
  const double step = (*b > a) ? std::fabs(d) : -std::fabs(d);
  const long long count = static_cast<long long>(std::floor((*b - a) / step + 1e-9));
  std::vector<double> v;
  for (long long i = 0; i <= count; ++i) v.push_back(a + double(i) * step);
  return v;
}

// piecewise-linear lower hull of the declared (x, e) points, evaluated at x
double declared_hull_energy(const GroundStateSet& gs, double x) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : gs.states) pts.emplace_back(s.x, s.e);
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.first - a.first) * (p.second - a.second) -
                           (p.first - a.first) * (b.second - a.second);
      if (cross <= 0)
        hull.pop_back();  // b above the a-p chord: not part of the lower hull
      else
        break;
    }
    hull.push_back(p);
  }
  if (hull.size() == 1) return hull[0].second;
  std::size_t seg = 0;
  while (seg + 2 < hull.size() && x > hull[seg + 1].first) ++seg;
  const auto& a = hull[seg];
  const auto& b = hull[seg + 1];
  const double t = (x - a.first) / (b.first - a.first);
  return a.second + t * (b.second - a.second);
}

}  // namespace

System System::from_parts(LatticeSpec lattice, std::vector<ClusterOrbitSpec> clusters,
                          EciTable eci, std::optional<TEciTable> teci,
                          std::vector<StructureSpec> structures) {
  System sys;
  sys.lattice = std::move(lattice);
  sys.gs_structures = std::move(structures);
  sys.ce = ClusterExpansion::build(sys.lattice, std::move(clusters), std::move(eci), std::move(teci));
  sys.gs = GroundStateSet::compute(sys.gs_structures, sys.ce);
  return sys;
}

System System::load_from_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  LatticeSpec lattice = parse_lattice(read_file((base / "lat.in").string()));
  std::vector<ClusterOrbitSpec> clusters = parse_clusters(read_file((base / "clusters.out").string()));
  EciTable eci = parse_eci(read_file((base / "eci.out").string()));
  std::optional<TEciTable> teci;
  if (fs::exists(base / "teci.out"))
    teci = parse_teci(read_file((base / "teci.out").string()), clusters.size());
  std::vector<StructureSpec> structures = parse_structures(read_file((base / "gs_str.out").string()));
  return from_parts(std::move(lattice), std::move(clusters), std::move(eci), std::move(teci),
                    std::move(structures));
}

MuStep predict_mu_step(const BoundaryPoint& prev, std::optional<double> prev_dmu, double T_next,
                       double k_B) {
  MuStep out;
  const double gap = prev.x2 - prev.x1;
  if (std::fabs(gap) < 1e-12) {
    out.gap_closure = true;
    out.mu_next = prev.mu;
    return out;
  }
  const double beta = 1.0 / (k_B * prev.T);
  const double beta_next = 1.0 / (k_B * T_next);
  // stored columns are Ebar = E - mu x
  const double e1 = prev.ebar1 + prev.mu * prev.x1;
  const double e2 = prev.ebar2 + prev.mu * prev.x2;
  out.dmu_dbeta = (e2 - e1) / (beta * gap) - prev.mu / beta;
  out.dmu = out.dmu_dbeta * (beta_next - beta);
  const double old_dmu = prev_dmu ? *prev_dmu : out.dmu;
  out.mu_next = prev.mu + 1.5 * out.dmu - 0.5 * old_dmu;
  return out;
}

double finite_difference_dmu_dbeta(double mu_a, double T_a, double mu_b, double T_b, double k_B) {
  const double beta_a = 1.0 / (k_B * T_a);
  const double beta_b = 1.0 / (k_B * T_b);
  return (mu_a - mu_b) / (beta_a - beta_b);
}

double solve_boundary_mu_lte(const System& sys, int gs1, int gs2, double T, double ltep,
                             double k_B) {
  const auto& a = sys.gs.states.at(gs1);
  const auto& b = sys.gs.states.at(gs2);
  if (std::fabs(b.x - a.x) < 1e-9) throw std::runtime_error("ground states have equal concentration");
  double mu = (b.e - a.e) / (b.x - a.x);  // T=0 hull slope
  for (int iter = 0; iter < 100; ++iter) {
    const LtePoint la = lte_phi(a, T, mu, ltep, k_B);
    const LtePoint lb = lte_phi(b, T, mu, ltep, k_B);
    if (!la.valid || !lb.valid)
      throw std::runtime_error("LTE invalid at T=" + std::to_string(T) +
                               ": raise ltep or lower T");
    const double f = la.phi - lb.phi;
    if (std::fabs(f) < 1e-10) return mu;
    const double fprime = lb.x - la.x;
    if (std::fabs(fprime) < 1e-300) throw std::runtime_error("degenerate phases in mu solve");
    mu -= f / fprime;
  }
  throw std::runtime_error("mu solve did not converge");
}

BoundaryStart find_boundary_start(const System& sys, int gs1, int gs2, double ltep, double k_B) {
  double v_max = 0;
  for (double v : sys.ce.eci.values) v_max = std::max(v_max, std::fabs(v));
  if (v_max == 0) v_max = 1.0;
  double T = v_max / (100.0 * k_B);
  std::optional<BoundaryStart> best;
  for (int iter = 0; iter < 60; ++iter) {
    try {
      const double mu = solve_boundary_mu_lte(sys, gs1, gs2, T, ltep, k_B);
      best = BoundaryStart{T, mu};
    } catch (const std::exception&) {
      break;
    }
    T *= 2.0;
  }
  if (!best)
    throw std::runtime_error("LTE is never valid for this pair: raise ltep or check the model");
  return *best;
}

std::vector<BoundaryPoint> track_boundary(const System& sys, const BoundaryPlan& plan,
                                          const BoundarySink& sink, const PhaseDiag& diag) {
  const double k_B = plan.controls.k_B;
  if (plan.gs1 == plan.gs2) throw std::runtime_error("gs1 and gs2 must differ");
  if (std::abs(plan.gs1 - plan.gs2) != 1)
    warn("tracked ground states are not adjacent in concentration");
  if (plan.start_T.has_value() != plan.start_mu.has_value())
    throw std::runtime_error("a user start point needs both T and mu");

  double T, mu;
  if (plan.start_T) {
    T = *plan.start_T;
    mu = *plan.start_mu;
  } else {
    const BoundaryStart s = find_boundary_start(sys, plan.gs1, plan.gs2, plan.controls.ltep, k_B);
    T = s.T;
    mu = s.mu;
  }

  const Supercell cell = build_supercell(sys.lattice, plan.er);
  const LatticeModel model = LatticeModel::bind(sys.ce, cell);
  Walker w1(model, spin_config_from_structure(sys.gs_structures.at(plan.gs1), sys.lattice, cell).config,
            derive_seed(plan.controls.seed, 1), k_B);
  Walker w2(model, spin_config_from_structure(sys.gs_structures.at(plan.gs2), sys.lattice, cell).config,
            derive_seed(plan.controls.seed, 2), k_B);

  const double step_T = plan.dn ? -std::fabs(plan.dT) : plan.dT;
  if (step_T == 0) throw std::runtime_error("dT must be nonzero");

  std::vector<BoundaryPoint> rows;
  std::optional<double> old_dmu;
  bool closure_region = false;
  int region_rows = 0;
  double last_open_gap = 0;
  for (int step = 0; step < plan.max_steps; ++step) {
    w1.set_state(T, mu);
    w2.set_state(T, mu);
    const RunControls rc = plan.controls;
    auto phase2 = std::async(std::launch::async, [&] { return run_point(w2, rc); });
    const PointStats s1 = run_point(w1, rc);
    const PointStats s2 = phase2.get();
    if (diag) {
      diag(1, s1);
      diag(2, s2);
    }

    BoundaryPoint row;
    row.T = T;
    row.mu = mu;
    row.x1 = s1.x;
    row.x2 = s2.x;
    row.ebar1 = s1.E - mu * s1.x;
    row.ebar2 = s2.E - mu * s2.x;

    const double gap = row.x2 - row.x1;
    const bool closed = std::fabs(gap) < 2.0 * rc.dx;
    // a walker that changed sign or a collapsing gap marks the fuzzy region
    // around the top of the gap: such rows are flagged but tracking goes on
    const bool lost = row.x1 > -2.0 * rc.dx || row.x2 < 2.0 * rc.dx ||
                      (last_open_gap > 0 && std::fabs(gap) < 0.5 * last_open_gap);
    if (step == 0 && (closed || lost))
      throw std::runtime_error(
          "chemical potential does not stabilize this ground state (phases coincide at the start)");
    if (closed) {
      row.flag = "gap-closure";
    } else if (closure_region || lost) {
      closure_region = true;
      row.flag = "closure-region";
      ++region_rows;
    } else if (!s1.converged || !s2.converged) {
      row.flag = "non-converged";
    }
    rows.push_back(row);
    if (sink) sink(row);
    if (row.flag == "gap-closure" || row.flag == "non-converged") break;
    if (region_rows > 16) break;
    if (row.flag.empty()) last_open_gap = std::fabs(gap);

    const double T_next = T + step_T;
    if (T_next <= 0) break;
    if (plan.T_stop && (step_T > 0 ? T_next > *plan.T_stop : T_next < *plan.T_stop)) break;
    if (closure_region) {
      // the concentrations no longer describe two phases: hold mu fixed
      T = T_next;
      continue;
    }
    const MuStep ms = predict_mu_step(row, old_dmu, T_next, k_B);
    if (ms.gap_closure) break;
    mu = ms.mu_next;
    old_dmu = ms.dmu;
    T = T_next;
  }
  return rows;
}

std::vector<ScanRow> scan(const System& sys, const ScanPlan& plan, const ScanSink& sink,
                          SpinConfig* final_config) {
  const double k_B = plan.controls.k_B;
  const std::vector<double> t_list_raw = sequence(plan.T0, plan.T1, plan.dT);
  std::vector<double> t_list = t_list_raw;
  if (plan.dn) std::reverse(t_list.begin(), t_list.end());
  const std::vector<double> u_list = sequence(plan.mu0, plan.mu1, plan.dmu);
  const bool single_T = t_list.size() == 1;

  const Supercell cell = build_supercell(sys.lattice, plan.er);
  const LatticeModel model = LatticeModel::bind(sys.ce, cell);

  const GsReference* ref = nullptr;
  if (plan.gs >= 0) {
    if (plan.gs >= static_cast<int>(sys.gs.size()))
      throw std::runtime_error("ground state index out of range");
    ref = &sys.gs.states[plan.gs];
  }

  const double tstat_threshold =
      plan.controls.tstat > 0 ? plan.controls.tstat : 3.0 * std::max(plan.controls.dx, 0.05);
  const bool tstat_on = plan.controls.tstat != 0.0 && ref != nullptr;

  auto initial_config = [&](Rng& rng) {
    if (plan.gs >= 0) return spin_config_from_structure(ref->structure, sys.lattice, cell).config;
    return random_config(cell.n_sites(), plan.controls.init_x.value_or(0.0), rng);
  };

  Rng init_rng = Rng::seeded(derive_seed(plan.controls.seed, 7));
  Walker walker(model, initial_config(init_rng), derive_seed(plan.controls.seed, 0), k_B);

  std::vector<ScanRow> rows;
  std::optional<PhiPoint> prev;
  bool phi0_available = plan.controls.phi0.has_value();

  for (std::size_t iu = 0; iu < u_list.size(); ++iu) {
    const double mu = input_mu_to_physical(u_list[iu], sys.gs);
    if (!single_T) {
      // each mu column restarts from the reference phase at the first T
      walker.set_config(initial_config(init_rng));
      prev.reset();
    }
    for (double T : t_list) {
      walker.set_state(T, mu);
      PointStats stats = run_point(walker, plan.controls);

      double phi;
      if (!prev) {
        if (phi0_available) {
          phi = *plan.controls.phi0;
          phi0_available = false;
        } else if (ref) {
          const LtePoint l = lte_phi(*ref, T, mu, plan.controls.ltep, k_B);
          if (!l.valid) warn("LTE seed is not valid at the first scan point; phi is unreliable");
          phi = l.phi;
        } else {
          phi = hte_phi(sys.ce, T, mu, k_B);
        }
      } else {
        phi = integrate_phi(*prev, stats, single_T ? IntegrationPath::along_mu : IntegrationPath::along_T,
                            k_B);
      }
      stats.phi = phi;

      ScanRow row;
      row.T = T;
      row.mu = mu;
      row.E = plan.controls.g2c ? stats.E : stats.E - mu * stats.x;
      row.x = stats.x;
      row.phi = phi;
      row.stderr_x = stats.stderr_x;
      row.n_eq = stats.n_eq;
      row.n_avg = stats.n_avg;
      if (!stats.converged) row.flag = "non-converged";

      bool abort_column = false;
      if (tstat_on) {
        const LtePoint l = lte_phi(*ref, T, mu, plan.controls.ltep, k_B);
        if (l.valid && std::fabs(stats.x - l.x) > tstat_threshold) {
          row.flag = row.flag.empty() ? "tstat: left the reference phase"
                                      : row.flag + "; tstat: left the reference phase";
          abort_column = true;
        }
      }

      rows.push_back(row);
      if (sink) sink(row);
      prev = to_phi_point(stats, phi, k_B);
      if (abort_column) break;
    }
  }
  if (final_config) *final_config = walker.config();
  return rows;
}

AnnealReport anneal_ground_state(const System& sys, double mu_physical,
                                 const std::vector<double>& T_schedule, long long sweeps_per_T,
                                 double er, std::uint64_t seed, double k_B) {
  if (T_schedule.empty()) throw std::runtime_error("empty annealing schedule");
  for (std::size_t i = 1; i < T_schedule.size(); ++i)
    if (T_schedule[i] > T_schedule[i - 1])
      throw std::runtime_error("annealing schedule must be decreasing");

  const Supercell cell = build_supercell(sys.lattice, er);
  const LatticeModel model = LatticeModel::bind(sys.ce, cell);
  Rng rng = Rng::seeded(derive_seed(seed, 11));
  Walker walker(model, random_config(cell.n_sites(), 0.0, rng), derive_seed(seed, 12), k_B);

  for (double T : T_schedule) {
    walker.set_state(T, mu_physical);
    for (long long i = 0; i < sweeps_per_T; ++i) walker.sweep();
  }

  AnnealReport report;
  report.config = walker.config();
  report.x = walker.x();
  report.e = walker.energy_per_site();
  report.hull_e = declared_hull_energy(sys.gs, report.x);
  report.grand = report.e - mu_physical * report.x;
  report.tangent_grand = std::numeric_limits<double>::infinity();
  for (const auto& s : sys.gs.states)
    report.tangent_grand = std::min(report.tangent_grand, s.e - mu_physical * s.x);

  double nearest_gs_dx = std::numeric_limits<double>::infinity();
  for (const auto& s : sys.gs.states)
    nearest_gs_dx = std::min(nearest_gs_dx, std::fabs(report.x - s.x));
  report.hull_violation = (report.e <= report.hull_e + 1e-6) && (nearest_gs_dx > 1e-6);
  return report;
}

}  // namespace cepd
