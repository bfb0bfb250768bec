#include "cepd/ce_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cepd/warn.hpp"

namespace cepd {

ClusterExpansion ClusterExpansion::build(LatticeSpec lattice, std::vector<ClusterOrbitSpec> clusters,
                                         EciTable eci, std::optional<TEciTable> teci) {
  ClusterExpansion ce;
  ce.lattice = std::move(lattice);
  ce.orbit_specs = std::move(clusters);
  ce.eci = std::move(eci);
  ce.teci = std::move(teci);

  if (ce.eci.values.size() != ce.orbit_specs.size())
    throw std::runtime_error("ECI table has " + std::to_string(ce.eci.values.size()) +
                             " values but the cluster file lists " +
                             std::to_string(ce.orbit_specs.size()) + " orbits");
  if (ce.teci)
    for (const EciTable& row : ce.teci->rows)
      if (row.values.size() != ce.orbit_specs.size())
        throw std::runtime_error("teci row length does not match the cluster count");

  const std::vector<SymOp> syms = point_symmetries(ce.lattice);
  for (std::size_t i = 0; i < ce.orbit_specs.size(); ++i) {
    ExpandedOrbit orbit = expand_orbit(ce.orbit_specs[i], ce.lattice, syms);
    orbit.orbit_id = static_cast<int>(i);
    const int stated = ce.orbit_specs[i].stated_multiplicity;
    if (stated != 0 && stated != orbit.per_cell_multiplicity())
      warn("orbit " + std::to_string(i) + ": stated multiplicity " + std::to_string(stated) +
           " differs from recomputed per-cell multiplicity " +
           std::to_string(orbit.per_cell_multiplicity()));
    ce.orbits.push_back(std::move(orbit));
  }
  return ce;
}

EciTable eci_at_temperature(const ClusterExpansion& ce, double T) {
  if (!ce.teci) return ce.eci;
  const TEciTable& t = *ce.teci;
  double pos = (T - t.t_start) / t.t_step;
  if (pos < -1e-9 || pos > t.count - 1 + 1e-9) {
    warn("temperature " + std::to_string(T) + " outside the teci grid; clamping");
    pos = std::clamp(pos, 0.0, double(t.count - 1));
  }
  pos = std::clamp(pos, 0.0, double(t.count - 1));
  const int lo = std::min(static_cast<int>(pos), t.count - 2);
  const double w = pos - lo;
  EciTable out;
  out.values.resize(t.rows[lo].values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = (1.0 - w) * t.rows[lo].values[i] + w * t.rows[lo + 1].values[i];
  return out;
}

LatticeModel LatticeModel::bind(const ClusterExpansion& ce, const Supercell& cell) {
  LatticeModel m;
  m.ce = &ce;
  m.cell = cell;
  m.n_cells = cell.n_cells();

  const int n_sites = cell.n_sites();
  struct TmpEntry {
    int orbit;
    std::vector<int> comembers;
  };
  std::vector<std::vector<TmpEntry>> per_site(n_sites);

  for (int c0 = 0; c0 < cell.repeats[0]; ++c0)
    for (int c1 = 0; c1 < cell.repeats[1]; ++c1)
      for (int c2 = 0; c2 < cell.repeats[2]; ++c2)
        for (const ExpandedOrbit& orbit : ce.orbits) {
          if (orbit.npoints == 0) continue;
          for (const std::vector<SiteRef>& member : orbit.members) {
            std::vector<int> ids;
            ids.reserve(member.size());
            for (const SiteRef& s : member)
              ids.push_back(cell.site_index(IVec3{c0 + s.offset[0], c1 + s.offset[1], c2 + s.offset[2]},
                                            s.basis));
            for (std::size_t k = 0; k < ids.size(); ++k) {
              TmpEntry e;
              e.orbit = orbit.orbit_id;
              for (std::size_t j = 0; j < ids.size(); ++j)
                if (j != k) e.comembers.push_back(ids[j]);
              per_site[ids[k]].push_back(std::move(e));
            }
          }
        }

  m.index.site_begin.assign(n_sites + 1, 0);
  m.index.entry_com_begin.push_back(0);
  for (int s = 0; s < n_sites; ++s) {
    auto& entries = per_site[s];
    std::stable_sort(entries.begin(), entries.end(),
                     [](const TmpEntry& a, const TmpEntry& b) { return a.orbit < b.orbit; });
    for (TmpEntry& e : entries) {
      m.index.entry_orbit.push_back(e.orbit);
      for (int id : e.comembers) m.index.comember_sites.push_back(id);
      m.index.entry_com_begin.push_back(static_cast<int>(m.index.comember_sites.size()));
    }
    m.index.site_begin[s + 1] = static_cast<int>(m.index.entry_orbit.size());
  }
  return m;
}

namespace {

// sum over instances of prod(sigma) per orbit, each instance counted once
std::vector<double> instance_sums(const LatticeModel& model, const SpinConfig& config) {
  const auto& ce = *model.ce;
  std::vector<double> sums(ce.n_orbits(), 0.0);
  const auto& ix = model.index;
  for (int s = 0; s < model.n_sites(); ++s) {
    const int sigma_s = config.sigma[s];
    for (int e = ix.site_begin[s]; e < ix.site_begin[s + 1]; ++e) {
      int prod = sigma_s;
      for (int c = ix.entry_com_begin[e]; c < ix.entry_com_begin[e + 1]; ++c)
        prod *= config.sigma[ix.comember_sites[c]];
      sums[ix.entry_orbit[e]] += prod;
    }
  }
  // every n-point instance was visited n times
  for (std::size_t o = 0; o < ce.n_orbits(); ++o)
    if (ce.orbits[o].npoints > 0) sums[o] /= ce.orbits[o].npoints;
  return sums;
}

}  // namespace

std::vector<double> correlations(const LatticeModel& model, const SpinConfig& config) {
  const auto& ce = *model.ce;
  std::vector<double> corr = instance_sums(model, config);
  for (std::size_t o = 0; o < ce.n_orbits(); ++o) {
    if (ce.orbits[o].npoints == 0) {
      corr[o] = 1.0;
      continue;
    }
    corr[o] /= double(model.n_cells) * ce.orbits[o].per_cell_multiplicity();
  }
  return corr;
}

double energy_total(const LatticeModel& model, const SpinConfig& config,
                    const std::vector<double>& eci) {
  const auto& ce = *model.ce;
  const std::vector<double> sums = instance_sums(model, config);
  double e = 0.0;
  for (std::size_t o = 0; o < ce.n_orbits(); ++o) {
    if (ce.orbits[o].npoints == 0)
      e += eci[o] * double(model.n_cells);
    else
      e += eci[o] * sums[o];
  }
  return e;
}

double energy_per_site(const LatticeModel& model, const SpinConfig& config,
                       const std::vector<double>& eci) {
  return energy_total(model, config, eci) / model.n_sites();
}

double delta_energy(const LatticeModel& model, const SpinConfig& config, int site,
                    const std::vector<double>& eci) {
  const auto& ix = model.index;
  double acc = 0.0;
  int e = ix.site_begin[site];
  const int e_end = ix.site_begin[site + 1];
  while (e < e_end) {
    const int orbit = ix.entry_orbit[e];
    long long sum = 0;
    for (; e < e_end && ix.entry_orbit[e] == orbit; ++e) {
      int prod = 1;
      for (int c = ix.entry_com_begin[e]; c < ix.entry_com_begin[e + 1]; ++c)
        prod *= config.sigma[ix.comember_sites[c]];
      sum += prod;
    }
    acc += eci[orbit] * double(sum);
  }
  return -2.0 * config.sigma[site] * acc;
}

double delta_grand(const LatticeModel& model, const SpinConfig& config, int site,
                   double mu_physical, const std::vector<double>& eci) {
  // Phi = E_total - mu * sum(sigma); the flip changes sum(sigma) by -2*sigma
  return delta_energy(model, config, site, eci) + 2.0 * mu_physical * config.sigma[site];
}

double energy_per_site(const LatticeModel& model, const SpinConfig& config) {
  return energy_per_site(model, config, model.ce->eci.values);
}

double delta_grand(const LatticeModel& model, const SpinConfig& config, int site,
                   double mu_physical) {
  return delta_grand(model, config, site, mu_physical, model.ce->eci.values);
}

}  // namespace cepd
