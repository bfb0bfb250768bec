#ifndef CEPD_CE_MODEL_HPP
#define CEPD_CE_MODEL_HPP

// Cluster-expansion Hamiltonian on a periodic supercell. The expansion is
// E/atom = sum_o m_o * V_o * <corr>_o with m_o the per-cell multiplicity and
// <corr>_o the average over cluster instances of the product of site spins.

#include <optional>
#include <vector>

#include "cepd/atat_io.hpp"
#include "cepd/lattice.hpp"

namespace cepd {

struct ClusterExpansion {
  LatticeSpec lattice;
  std::vector<ClusterOrbitSpec> orbit_specs;
  std::vector<ExpandedOrbit> orbits;  // index-aligned with orbit_specs and eci
  EciTable eci;
  std::optional<TEciTable> teci;

  std::size_t n_orbits() const { return orbits.size(); }

  // Expands every orbit, recomputes multiplicities (warning when the stated
  // value disagrees) and validates ECI table alignment.
  static ClusterExpansion build(LatticeSpec lattice, std::vector<ClusterOrbitSpec> clusters,
                                EciTable eci, std::optional<TEciTable> teci = std::nullopt);
};

// ECIs effective at temperature T: linear interpolation on the teci grid,
// clamped (with a warning) outside it; the static table when no teci is set.
EciTable eci_at_temperature(const ClusterExpansion& ce, double T);

// Per-site adjacency: for every site, the cluster instances containing it,
// stored as (orbit, co-member sites). Each instance of an n-point orbit
// appears in exactly n site lists. Flattened for the flip hot path.
struct SiteClusterIndex {
  std::vector<int> site_begin;       // n_sites+1 offsets into entry arrays
  std::vector<int> entry_orbit;      // orbit id per entry (sorted per site)
  std::vector<int> entry_com_begin;  // n_entries+1 offsets into comember_sites
  std::vector<int> comember_sites;

  int n_entries(int site) const { return site_begin[site + 1] - site_begin[site]; }
};

// A cluster expansion bound to a concrete supercell.
struct LatticeModel {
  const ClusterExpansion* ce = nullptr;
  Supercell cell;
  SiteClusterIndex index;
  long long n_cells = 0;

  int n_sites() const { return cell.n_sites(); }

  static LatticeModel bind(const ClusterExpansion& ce, const Supercell& cell);
};

std::vector<double> correlations(const LatticeModel& model, const SpinConfig& config);

double energy_total(const LatticeModel& model, const SpinConfig& config,
                    const std::vector<double>& eci);
double energy_per_site(const LatticeModel& model, const SpinConfig& config,
                       const std::vector<double>& eci);

// Change of the total energy when flipping one site, from the local index only.
double delta_energy(const LatticeModel& model, const SpinConfig& config, int site,
                    const std::vector<double>& eci);

// Change of the total grand quantity E_total - mu * sum(sigma).
double delta_grand(const LatticeModel& model, const SpinConfig& config, int site,
                   double mu_physical, const std::vector<double>& eci);

// Convenience overloads using the static ECI table.
double energy_per_site(const LatticeModel& model, const SpinConfig& config);
double delta_grand(const LatticeModel& model, const SpinConfig& config, int site,
                   double mu_physical);

}  // namespace cepd

#endif
