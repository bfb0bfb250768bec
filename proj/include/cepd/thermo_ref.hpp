#ifndef CEPD_THERMO_REF_HPP
#define CEPD_THERMO_REF_HPP

// Reference thermodynamics: ground-state hull and chemical-potential
// conventions, low/high-temperature expansions for seeding phi, exact
// enumeration on small cells, and the mean-field miscibility estimate.

#include <vector>

#include "cepd/ce_model.hpp"

namespace cepd {

// A declared ground state bound to a minimal periodic cell large enough for
// exact energies and exact single-flip costs.
struct GsReference {
  StructureSpec structure;
  LatticeModel model;
  Tiling tiling;
  double x = 0.0;  // mean spin of the tiled state
  double e = 0.0;  // energy per atom (static ECIs)
};

struct GroundStateSet {
  std::vector<GsReference> states;  // in gs_str.out order; x strictly increasing

  std::size_t size() const { return states.size(); }

  static GroundStateSet compute(const std::vector<StructureSpec>& structures,
                                const ClusterExpansion& ce);
};

GsReference make_gs_reference(const ClusterExpansion& ce, const StructureSpec& structure);

// T=0 common-tangent slopes mu_{k,k+1} = (e_{k+1}-e_k)/(x_{k+1}-x_k).
std::vector<double> boundary_mus(const GroundStateSet& gs);

// emc2-style normalized input mu <-> physical mu. With >= 3 ground states the
// map is piecewise linear with knots u=k at the hull slopes, edge segments
// extended with the nearest interior slope; with exactly 2 it is a pure shift.
double input_mu_to_physical(double u, const GroundStateSet& gs);
double physical_mu_to_input(double mu_physical, const GroundStateSet& gs);

struct PhiPoint {
  double T = 0, beta = 0, mu = 0;
  double phi = 0, x = 0, E = 0;
};

struct LtePoint {
  double phi = 0, x = 0, E = 0;
  double correction = 0;  // magnitude of the per-site phi correction
  bool valid = false;
};

// First-order (single-flip) low-temperature expansion around a ground state:
//   phi = (e_gs - mu x_gs) - (1/beta) (1/n_classes) sum_c exp(-beta dPhi_c)
// with dPhi_c the grand cost of flipping one site of tiling class c.
// valid requires every dPhi_c > 0 and correction < ltep.
LtePoint lte_phi(const LatticeModel& model, const Tiling& gs_tiling, double T, double mu_physical,
                 double ltep, double k_B);
LtePoint lte_phi(const GsReference& gs, double T, double mu_physical, double ltep, double k_B);

// Point-term high-temperature expansion (single-site basis):
//   phi = V_empty - (1/beta) ln(2 cosh(beta (mu - V_point)))
double hte_phi(const ClusterExpansion& ce, double T, double mu_physical, double k_B);

// Exact thermodynamics of the finite periodic cell by full enumeration of
// its 2^N spin states (N <= 24).
PhiPoint exact_thermo(const LatticeModel& model, double T, double mu_physical, double k_B);

// Regular-solution estimate T_misc = 0.8 Omega / (2 k_B), Omega = -2 z V_NN.
double mean_field_omega(const ClusterExpansion& ce, int z);
double mean_field_tmisc(const ClusterExpansion& ce, int z, double k_B);

}  // namespace cepd

#endif
