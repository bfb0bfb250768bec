#include "cepd/thermo_ref.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cepd {

namespace {

// Per-axis span of the expansion's cluster offsets: a periodic cell with
// n_i > span_i keeps single-flip costs free of self-wrap.
IVec3 orbit_span(const ClusterExpansion& ce) {
  IVec3 span{0, 0, 0};
  for (const ExpandedOrbit& orbit : ce.orbits)
    for (const auto& member : orbit.members)
      for (const SiteRef& a : member)
        for (const SiteRef& b : member)
          for (int i = 0; i < 3; ++i)
            span[i] = std::max(span[i], std::abs(a.offset[i] - b.offset[i]));
  return span;
}

bool integer_matrix(const Mat3& m, double tol) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (round_err(m[i][j]) > tol) return false;
  return true;
}

}  // namespace

GsReference make_gs_reference(const ClusterExpansion& ce, const StructureSpec& structure) {
  const Mat3 lat_cart = ce.lattice.cell_cartesian();
  const Mat3 str_inv = inverse(structure.cell_cartesian());
  const IVec3 span = orbit_span(ce);

  // smallest diagonal repeats that are commensurate with the structure and
  // exceed the cluster span in every direction
  IVec3 repeats{0, 0, 0};
  for (int n = 1; n <= 64; ++n) {
    IVec3 trial;
    Mat3 super_cart;
    for (int i = 0; i < 3; ++i) {
      trial[i] = std::max(n, span[i] + 1);
      super_cart[i] = double(trial[i]) * lat_cart[i];
    }
    if (integer_matrix(mat_mul(super_cart, str_inv), 1e-5)) {
      repeats = trial;
      break;
    }
  }
  if (repeats[0] == 0)
    throw std::runtime_error("could not find a periodic cell commensurate with the structure");

  GsReference ref;
  ref.structure = structure;
  Supercell cell;
  cell.repeats = repeats;
  cell.n_basis = static_cast<int>(ce.lattice.sites.size());
  ref.model = LatticeModel::bind(ce, cell);
  ref.tiling = spin_config_from_structure(structure, ce.lattice, cell);
  ref.x = ref.tiling.config.x();
  ref.e = energy_per_site(ref.model, ref.tiling.config);
  return ref;
}

GroundStateSet GroundStateSet::compute(const std::vector<StructureSpec>& structures,
                                       const ClusterExpansion& ce) {
  if (structures.empty()) throw std::runtime_error("no ground states given");
  GroundStateSet gs;
  for (const StructureSpec& s : structures) gs.states.push_back(make_gs_reference(ce, s));
  for (std::size_t k = 1; k < gs.states.size(); ++k)
    if (!(gs.states[k].x > gs.states[k - 1].x + 1e-9))
      throw std::runtime_error("ground states are not ordered by strictly increasing concentration");
  return gs;
}

std::vector<double> boundary_mus(const GroundStateSet& gs) {
  if (gs.size() < 2) throw std::runtime_error("need at least two ground states");
  std::vector<double> mus;
  for (std::size_t k = 0; k + 1 < gs.size(); ++k) {
    const double dx = gs.states[k + 1].x - gs.states[k].x;
    if (std::fabs(dx) < 1e-9)
      throw std::runtime_error("adjacent ground states have equal concentration");
    mus.push_back((gs.states[k + 1].e - gs.states[k].e) / dx);
  }
  return mus;
}

double input_mu_to_physical(double u, const GroundStateSet& gs) {
  const std::vector<double> knots = boundary_mus(gs);  // knot k at u = k+1
  if (knots.size() == 1) return knots[0] + u;          // two ground states: pure shift
  // piecewise linear through (k+1, knots[k]); edges extend the nearest segment
  const int nseg = static_cast<int>(knots.size()) - 1;
  double k = std::floor(u - 1.0);
  k = std::clamp(k, 0.0, double(nseg - 1));
  const int seg = static_cast<int>(k);
  const double slope = knots[seg + 1] - knots[seg];
  return knots[seg] + slope * (u - 1.0 - seg);
}

double physical_mu_to_input(double mu_physical, const GroundStateSet& gs) {
  const std::vector<double> knots = boundary_mus(gs);
  if (knots.size() == 1) return mu_physical - knots[0];
  const int nseg = static_cast<int>(knots.size()) - 1;
  int seg = 0;
  while (seg < nseg - 1 && mu_physical > knots[seg + 1]) ++seg;
  const double slope = knots[seg + 1] - knots[seg];
  return 1.0 + seg + (mu_physical - knots[seg]) / slope;
}

LtePoint lte_phi(const LatticeModel& model, const Tiling& gs_tiling, double T, double mu_physical,
                 double ltep, double k_B) {
  if (T <= 0) throw std::runtime_error("LTE needs T > 0");
  const double beta = 1.0 / (k_B * T);
  const std::vector<double> eci = eci_at_temperature(*model.ce, T).values;
  const SpinConfig& config = gs_tiling.config;
  const double x_gs = config.x();
  const double e_gs = energy_per_site(model, config, eci);

  // one representative site per tiling class
  std::vector<int> rep(gs_tiling.n_classes, -1);
  for (int s = 0; s < model.n_sites(); ++s)
    if (rep[gs_tiling.site_class[s]] < 0) rep[gs_tiling.site_class[s]] = s;

  LtePoint out;
  double corr_phi = 0, corr_x = 0, corr_e = 0;
  bool all_positive = true;
  for (int c = 0; c < gs_tiling.n_classes; ++c) {
    const int s = rep[c];
    const double dphi = delta_grand(model, config, s, mu_physical, eci);
    if (dphi <= 0) all_positive = false;
    const double w = std::exp(-beta * dphi);
    const double de = dphi - 2.0 * mu_physical * config.sigma[s];
    corr_phi += w;
    corr_x += config.sigma[s] * w;
    corr_e += de * w;
  }
  const double nc = gs_tiling.n_classes;
  out.correction = corr_phi / (beta * nc);
  out.phi = (e_gs - mu_physical * x_gs) - out.correction;
  out.x = x_gs - (2.0 / nc) * corr_x;
  out.E = e_gs + corr_e / nc;
  out.valid = all_positive && std::fabs(out.correction) < ltep;
  return out;
}

LtePoint lte_phi(const GsReference& gs, double T, double mu_physical, double ltep, double k_B) {
  return lte_phi(gs.model, gs.tiling, T, mu_physical, ltep, k_B);
}

double hte_phi(const ClusterExpansion& ce, double T, double mu_physical, double k_B) {
  if (T <= 0) throw std::runtime_error("HTE needs T > 0");
  const double beta = 1.0 / (k_B * T);
  const std::vector<double> eci = eci_at_temperature(ce, T).values;
  double v_empty = 0, v_point = 0;
  for (std::size_t o = 0; o < ce.n_orbits(); ++o) {
    if (ce.orbits[o].npoints == 0) v_empty += eci[o] * ce.orbits[o].per_cell_multiplicity();
    if (ce.orbits[o].npoints == 1) v_point += eci[o] * ce.orbits[o].per_cell_multiplicity();
  }
  const double a = beta * (mu_physical - v_point);
  // ln(2 cosh a) without overflow
  const double ln2cosh = std::fabs(a) + std::log1p(std::exp(-2.0 * std::fabs(a)));
  return v_empty - ln2cosh / beta;
}

PhiPoint exact_thermo(const LatticeModel& model, double T, double mu_physical, double k_B) {
  const int n = model.n_sites();
  if (n > 24) throw std::runtime_error("exact enumeration limited to 24 sites");
  if (T <= 0) throw std::runtime_error("exact enumeration needs T > 0");
  const double beta = 1.0 / (k_B * T);
  const std::vector<double> eci = eci_at_temperature(*model.ce, T).values;

  SpinConfig config;
  config.assign(n, -1);
  double e_tot = energy_total(model, config, eci);

  // Gray-code walk over all configurations with incremental energies.
  double max_a = -std::numeric_limits<double>::infinity();
  double s0 = 0, sx = 0, se = 0;
  const std::uint64_t count = std::uint64_t(1) << n;
  for (std::uint64_t k = 0;; ++k) {
    const double a = -beta * (e_tot - mu_physical * double(config.sum_sigma));
    if (a > max_a) {
      const double scale = (max_a == -std::numeric_limits<double>::infinity())
                               ? 0.0
                               : std::exp(max_a - a);
      s0 *= scale;
      sx *= scale;
      se *= scale;
      max_a = a;
    }
    const double w = std::exp(a - max_a);
    s0 += w;
    sx += w * double(config.sum_sigma) / n;
    se += w * e_tot / n;
    if (k + 1 == count) break;
    const int flip = std::countr_zero(k + 1);
    e_tot += delta_energy(model, config, flip, eci);
    config.flip(flip);
  }

  PhiPoint out;
  out.T = T;
  out.beta = beta;
  out.mu = mu_physical;
  out.phi = -(max_a + std::log(s0)) / (beta * n);
  out.x = sx / s0;
  out.E = se / s0;
  return out;
}

double mean_field_omega(const ClusterExpansion& ce, int z) {
  if (z <= 0) throw std::runtime_error("coordination number must be positive");
  double v_nn = 0;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t o = 0; o < ce.n_orbits(); ++o)
    if (ce.orbits[o].npoints == 2 && ce.orbits[o].diameter < best) {
      best = ce.orbits[o].diameter;
      v_nn = ce.eci.values[o];
      found = true;
    }
  if (!found) throw std::runtime_error("no pair orbit in the expansion");
  return -2.0 * z * v_nn;
}

double mean_field_tmisc(const ClusterExpansion& ce, int z, double k_B) {
  return 0.8 * mean_field_omega(ce, z) / (2.0 * k_B);
}

}  // namespace cepd
