#ifndef CEPD_DRIVERS_HPP
#define CEPD_DRIVERS_HPP

// The two user-facing programs behind cepd-scan and cepd-phb: a (T, mu)
// scanner and a two-phase boundary tracker, plus the boundary-step math.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cepd/atat_io.hpp"
#include "cepd/mc_engine.hpp"
#include "cepd/thermo_ref.hpp"

namespace cepd {

// Everything a run needs, as read from lat.in / clusters.out / eci.out
// (or teci.out) / gs_str.out in one directory.
struct System {
  LatticeSpec lattice;
  std::vector<StructureSpec> gs_structures;
  ClusterExpansion ce;
  GroundStateSet gs;

  static System from_parts(LatticeSpec lattice, std::vector<ClusterOrbitSpec> clusters,
                           EciTable eci, std::optional<TEciTable> teci,
                           std::vector<StructureSpec> structures);
  // teci.out is preferred over eci.out when both are present.
  static System load_from_directory(const std::string& dir);
};

struct ScanPlan {
  int gs = 0;  // -1 = disordered (random) start
  double mu0 = 0;
  std::optional<double> mu1;
  double dmu = 0;
  double T0 = 0;
  std::optional<double> T1;
  double dT = 0;
  bool dn = false;  // downward in T
  double er = 10;
  RunControls controls;
};

struct BoundaryPlan {
  int gs1 = 0, gs2 = 1;
  std::optional<double> start_T;   // both set: user-supplied start point
  std::optional<double> start_mu;
  double dT = 0;
  bool dn = false;
  std::optional<double> T_stop;
  int max_steps = 100000;
  double er = 10;
  RunControls controls;
};

struct MuStep {
  double mu_next = 0;
  double dmu = 0;
  double dmu_dbeta = 0;
  bool gap_closure = false;
};

// Gibbs-Duhem step: dmu/dbeta = (E2 - E1)/(beta (x2 - x1)) - mu/beta with the
// stored columns Ebar = E - mu x, then mu += 1.5 dmu - 0.5 old_dmu.
MuStep predict_mu_step(const BoundaryPoint& prev, std::optional<double> prev_dmu, double T_next,
                       double k_B);

// (mu_a - mu_b) / (beta_a - beta_b): the finite-difference check between rows.
double finite_difference_dmu_dbeta(double mu_a, double T_a, double mu_b, double T_b, double k_B);

// Equal-phi chemical potential of two ground states in the LTE, Newton
// iteration seeded at the T=0 hull slope; f' = x2 - x1 by conjugacy.
double solve_boundary_mu_lte(const System& sys, int gs1, int gs2, double T, double ltep,
                             double k_B);

// Largest T on a doubling grid (from k_B T = |V|_max / 100) where both LTEs
// stay valid, together with the boundary mu there.
struct BoundaryStart {
  double T = 0;
  double mu = 0;
};
BoundaryStart find_boundary_start(const System& sys, int gs1, int gs2, double ltep, double k_B);

using BoundarySink = std::function<void(const BoundaryPoint&)>;
using ScanSink = std::function<void(const ScanRow&)>;
using PhaseDiag = std::function<void(int phase, const PointStats&)>;

std::vector<BoundaryPoint> track_boundary(const System& sys, const BoundaryPlan& plan,
                                          const BoundarySink& sink = {},
                                          const PhaseDiag& diag = {});

// final_config, when given, receives the walker state after the last point.
std::vector<ScanRow> scan(const System& sys, const ScanPlan& plan, const ScanSink& sink = {},
                          SpinConfig* final_config = nullptr);

struct AnnealReport {
  SpinConfig config;
  double x = 0;             // mean spin of the final state
  double e = 0;             // energy per atom of the final state
  double hull_e = 0;        // declared-hull energy at this concentration
  double grand = 0;         // e - mu x
  double tangent_grand = 0; // min over declared states of (e_k - mu x_k)
  bool hull_violation = false;
};

// Slow cooling at fixed mu from a random state; the verdict flags final
// states that touch or undercut the declared hull away from a declared
// composition (the fingerprint of a missing ground state).
AnnealReport anneal_ground_state(const System& sys, double mu_physical,
                                 const std::vector<double>& T_schedule, long long sweeps_per_T,
                                 double er, std::uint64_t seed, double k_B);

}  // namespace cepd

#endif
