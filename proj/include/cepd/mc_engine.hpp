#ifndef CEPD_MC_ENGINE_HPP
#define CEPD_MC_ENGINE_HPP

// Semi-grand-canonical Metropolis walker with adaptive equilibration,
// blocking error analysis and thermodynamic integration of phi.

#include <cstdint>
#include <optional>
#include <vector>

#include "cepd/ce_model.hpp"
#include "cepd/thermo_ref.hpp"

namespace cepd {

// xoshiro256++, seeded through splitmix64. Hand rolled so that trajectories
// are bit-identical across platforms and standard libraries.
struct Rng {
  std::array<std::uint64_t, 4> s{1, 2, 3, 4};

  static Rng seeded(std::uint64_t seed);
  std::uint64_t next();
  double uniform();                     // [0, 1), 53-bit
  std::uint64_t below(std::uint64_t n); // unbiased via rejection
};

struct RunControls {
  double dx = 1e-3;        // target standard error of x (used when n < 0)
  std::optional<double> dE;  // optional extra target for the E standard error
  long long n = -1;        // fixed measurement sweeps; overrides dx when >= 0
  long long eq = -1;       // fixed equilibration sweeps; adaptive when < 0
  double tstat = -1.0;     // transition check: <0 default threshold, 0 off, >0 custom
  double ltep = 1e-3;      // LTE validity threshold
  double k_B = 1.0;
  std::uint64_t seed = 1;
  bool g2c = false;
  std::optional<double> phi0;
  std::optional<double> init_x;
  long long max_sweeps = 1ll << 24;  // budget cap per point
  long long min_sweeps = 128;        // measurement floor (rare-event regimes)
};

struct PointStats {
  double T = 0, mu = 0;
  double E = 0;  // canonical energy per site
  double x = 0;
  double phi = 0;  // filled by the driver via integrate_phi / expansion seeds
  double stderr_x = 0;
  double stderr_E = 0;
  long long n_eq = 0, n_avg = 0;
  bool converged = true;
};

// Flyvbjerg-Petersen hierarchical binning; stderr estimate is the largest
// level estimate with enough bins, which absorbs autocorrelation.
class BlockingSeries {
 public:
  void add(double v);
  long long count() const { return levels_.empty() ? 0 : levels_[0].n; }
  double mean() const;
  double blocked_stderr(long long min_bins = 32) const;

 private:
  struct Level {
    long long n = 0;
    double sum = 0, sumsq = 0;
    double pending = 0;
    bool has_pending = false;
  };
  std::vector<Level> levels_;
};

class Walker {
 public:
  Walker(const LatticeModel& model, SpinConfig config, std::uint64_t seed, double k_B);

  void set_state(double T, double mu_physical);  // also refreshes T-dependent ECIs
  void set_config(SpinConfig config);

  const LatticeModel& model() const { return *model_; }
  const SpinConfig& config() const { return config_; }
  SpinConfig take_config() const { return config_; }
  double T() const { return T_; }
  double mu() const { return mu_; }
  double beta() const { return beta_; }
  double k_B() const { return k_B_; }
  double x() const { return config_.x(); }
  double energy_per_site() const { return energy_total_ / config_.n_sites(); }

  // One sweep = n_sites single-flip attempts; returns the number accepted.
  long long sweep();

 private:
  void resync_energy();

  const LatticeModel* model_;
  SpinConfig config_;
  Rng rng_;
  double k_B_;
  double T_ = 1.0, mu_ = 0.0, beta_ = 1.0;
  std::vector<double> eci_;
  double energy_total_ = 0.0;
  long long flips_since_sync_ = 0;
};

long long metropolis_sweep(Walker& walker);

PointStats run_point(Walker& walker, const RunControls& controls);

enum class IntegrationPath { along_T, along_mu };

// Trapezoidal update of phi from a known previous point:
//   along_T : d(beta phi) = (E - mu x) d(beta)
//   along_mu: d(phi) = -x d(mu)
double integrate_phi(const PhiPoint& prev, const PointStats& current, IntegrationPath path,
                     double k_B);

PhiPoint to_phi_point(const PointStats& stats, double phi, double k_B);

// Random occupation with mean spin near x0, for disordered starts.
SpinConfig random_config(int n_sites, double x0, Rng& rng);

}  // namespace cepd

#endif
