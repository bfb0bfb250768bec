#include "cepd/mc_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace cepd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr long long kResyncInterval = 1ll << 16;

}  // namespace

Rng Rng::seeded(std::uint64_t seed) {
  Rng r;
  std::uint64_t st = seed;
  for (auto& word : r.s) word = splitmix64(st);
  return r;
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double Rng::uniform() { return double(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

void BlockingSeries::add(double v) {
  std::size_t level = 0;
  for (;;) {
    if (level == levels_.size()) levels_.push_back(Level{});
    Level& l = levels_[level];
    l.n += 1;
    l.sum += v;
    l.sumsq += v * v;
    if (!l.has_pending) {
      l.pending = v;
      l.has_pending = true;
      return;
    }
    const double merged = 0.5 * (l.pending + v);
    l.has_pending = false;
    v = merged;
    ++level;
  }
}

double BlockingSeries::mean() const {
  if (levels_.empty() || levels_[0].n == 0) return 0.0;
  return levels_[0].sum / double(levels_[0].n);
}

double BlockingSeries::blocked_stderr(long long min_bins) const {
  double best = 0.0;
  bool found = false;
  for (const Level& l : levels_) {
    if (l.n < std::max<long long>(2, min_bins)) continue;
    const double m = l.sum / double(l.n);
    const double var = std::max(0.0, l.sumsq / double(l.n) - m * m) * double(l.n) / double(l.n - 1);
    best = std::max(best, std::sqrt(var / double(l.n)));
    found = true;
  }
  if (!found && !levels_.empty() && levels_[0].n >= 2) {
    const Level& l = levels_[0];
    const double m = l.sum / double(l.n);
    const double var = std::max(0.0, l.sumsq / double(l.n) - m * m) * double(l.n) / double(l.n - 1);
    return std::sqrt(var / double(l.n));
  }
  return best;
}

Walker::Walker(const LatticeModel& model, SpinConfig config, std::uint64_t seed, double k_B)
    : model_(&model), config_(std::move(config)), rng_(Rng::seeded(seed)), k_B_(k_B) {
  if (config_.n_sites() != model.n_sites())
    throw std::runtime_error("configuration does not match the supercell");
  eci_ = model.ce->eci.values;
  resync_energy();
}

void Walker::set_state(double T, double mu_physical) {
  if (!(T > 0)) throw std::runtime_error("walker temperature must be positive");
  T_ = T;
  mu_ = mu_physical;
  beta_ = 1.0 / (k_B_ * T_);
  eci_ = eci_at_temperature(*model_->ce, T).values;
  resync_energy();
}

void Walker::set_config(SpinConfig config) {
  if (config.n_sites() != model_->n_sites())
    throw std::runtime_error("configuration does not match the supercell");
  config_ = std::move(config);
  resync_energy();
}

void Walker::resync_energy() {
  energy_total_ = energy_total(*model_, config_, eci_);
  flips_since_sync_ = 0;
}

long long Walker::sweep() {
  const int n = config_.n_sites();
  long long accepted = 0;
  for (int attempt = 0; attempt < n; ++attempt) {
    const int site = static_cast<int>(rng_.below(std::uint64_t(n)));
    const double de = delta_energy(*model_, config_, site, eci_);
    const double dphi = de + 2.0 * mu_ * config_.sigma[site];
    if (dphi <= 0.0 || rng_.uniform() < std::exp(-beta_ * dphi)) {
      config_.flip(site);
      energy_total_ += de;
      ++accepted;
      if (++flips_since_sync_ >= kResyncInterval) resync_energy();
    }
  }
  return accepted;
}

long long metropolis_sweep(Walker& walker) { return walker.sweep(); }

PointStats run_point(Walker& walker, const RunControls& controls) {
  PointStats stats;
  stats.T = walker.T();
  stats.mu = walker.mu();

  const long long budget = controls.max_sweeps;
  long long used = 0;

  // --- equilibration ---
  if (controls.eq >= 0) {
    for (long long i = 0; i < controls.eq; ++i) walker.sweep();
    stats.n_eq = controls.eq;
    used += controls.eq;
  } else {
    // doubling blocks until the two halves of the last block agree
    long long block = 64;
    const long long eq_budget = budget / 2;
    for (;;) {
      const long long half = block / 2;
      double sum1 = 0, sq1 = 0, sum2 = 0, sq2 = 0;
      for (long long i = 0; i < block; ++i) {
        walker.sweep();
        const double v = walker.x();
        if (i < half) {
          sum1 += v;
          sq1 += v * v;
        } else {
          sum2 += v;
          sq2 += v * v;
        }
      }
      stats.n_eq += block;
      used += block;
      const double m1 = sum1 / half, m2 = sum2 / half;
      const double var1 = std::max(0.0, sq1 / half - m1 * m1) / std::max<long long>(1, half - 1);
      const double var2 = std::max(0.0, sq2 / half - m2 * m2) / std::max<long long>(1, half - 1);
      const double pooled = std::sqrt(var1 + var2);
      if (std::fabs(m1 - m2) <= pooled + 1e-300) break;
      if (stats.n_eq + 2 * block > eq_budget) {
        stats.converged = false;
        break;
      }
      block *= 2;
    }
  }

  // --- averaging ---
  BlockingSeries xs, es;
  if (controls.n == 0) {
    // report the instantaneous state (emc2 -n=0)
    stats.E = walker.energy_per_site();
    stats.x = walker.x();
    stats.stderr_x = 0.0;
    stats.n_avg = 1;
    return stats;
  }
  if (controls.n > 0) {
    for (long long i = 0; i < controls.n; ++i) {
      walker.sweep();
      xs.add(walker.x());
      es.add(walker.energy_per_site());
    }
    stats.n_avg = controls.n;
  } else {
    long long chunk = std::max<long long>(128, controls.min_sweeps);
    for (;;) {
      for (long long i = 0; i < chunk; ++i) {
        walker.sweep();
        xs.add(walker.x());
        es.add(walker.energy_per_site());
      }
      stats.n_avg += chunk;
      used += chunk;
      const bool x_ok = xs.blocked_stderr() < controls.dx;
      const bool e_ok = !controls.dE || es.blocked_stderr() < *controls.dE;
      if (stats.n_avg >= controls.min_sweeps && x_ok && e_ok) break;
      if (used + stats.n_avg > budget) {
        stats.converged = false;
        break;
      }
      chunk = stats.n_avg;  // doubling
    }
  }
  stats.E = es.mean();
  stats.x = xs.mean();
  stats.stderr_x = xs.blocked_stderr();
  stats.stderr_E = es.blocked_stderr();
  return stats;
}

double integrate_phi(const PhiPoint& prev, const PointStats& current, IntegrationPath path,
                     double k_B) {
  const double beta_cur = 1.0 / (k_B * current.T);
  const double scale_T = std::max(1.0, std::fabs(prev.T));
  const double scale_mu = std::max(1.0, std::fabs(prev.mu));
  const bool t_changed = std::fabs(current.T - prev.T) > 1e-12 * scale_T;
  const bool mu_changed = std::fabs(current.mu - prev.mu) > 1e-12 * scale_mu;
  if (t_changed && mu_changed)
    throw std::runtime_error("phi integration step changes both T and mu");
  if (path == IntegrationPath::along_T) {
    if (mu_changed) throw std::runtime_error("along-T integration step changes mu");
    const double f_prev = prev.E - prev.mu * prev.x;
    const double f_cur = current.E - current.mu * current.x;
    const double beta_phi = prev.beta * prev.phi + 0.5 * (f_prev + f_cur) * (beta_cur - prev.beta);
    return beta_phi / beta_cur;
  }
  if (t_changed) throw std::runtime_error("along-mu integration step changes T");
  return prev.phi - 0.5 * (prev.x + current.x) * (current.mu - prev.mu);
}

PhiPoint to_phi_point(const PointStats& stats, double phi, double k_B) {
  PhiPoint p;
  p.T = stats.T;
  p.beta = 1.0 / (k_B * stats.T);
  p.mu = stats.mu;
  p.phi = phi;
  p.x = stats.x;
  p.E = stats.E;
  return p;
}

SpinConfig random_config(int n_sites, double x0, Rng& rng) {
  const double p_up = 0.5 * (x0 + 1.0);
  SpinConfig c;
  c.assign(n_sites, -1);
  for (int i = 0; i < n_sites; ++i)
    if (rng.uniform() < p_up) c.set(i, +1);
  return c;
}

}  // namespace cepd
