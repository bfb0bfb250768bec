#ifndef CEPD_LATTICE_HPP
#define CEPD_LATTICE_HPP

// Lattice symmetry, orbit expansion, cluster generation and supercell
// construction. Everything here is built once and immutable afterwards.

#include <cstdint>
#include <map>
#include <vector>

#include "cepd/atat_io.hpp"
#include "cepd/geometry.hpp"

namespace cepd {

// Factor-group element: cartesian rotation 'rot' plus translation 'trans',
// mapping the decorated lattice onto itself modulo lattice translations.
struct SymOp {
  Mat3 rot;
  Vec3 trans;

  Vec3 apply(const Vec3& p) const { return mat_apply(rot, p) + trans; }
};

// A site of the infinite lattice: basis index plus integer cell offset.
struct SiteRef {
  IVec3 offset;
  int basis = 0;

  friend bool operator==(const SiteRef& a, const SiteRef& b) {
    return a.offset == b.offset && a.basis == b.basis;
  }
  friend bool operator<(const SiteRef& a, const SiteRef& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    return a.basis < b.basis;
  }
};

// All clusters of one orbit that touch a given primitive cell, each counted
// once (translation-canonical form anchored at the cell). members.size() is
// the per-cell multiplicity m_o.
struct ExpandedOrbit {
  int orbit_id = 0;
  int npoints = 0;
  double diameter = 0.0;
  std::vector<std::vector<SiteRef>> members;

  int per_cell_multiplicity() const { return static_cast<int>(members.size()); }
};

// Diagonal periodic supercell: repeats per cell axis plus the site indexing.
// idx = ((c0*n1 + c1)*n2 + c2)*n_basis + b with each c wrapped into range.
struct Supercell {
  IVec3 repeats{1, 1, 1};
  int n_basis = 1;

  int n_cells() const { return repeats[0] * repeats[1] * repeats[2]; }
  int n_sites() const { return n_cells() * n_basis; }

  int site_index(const IVec3& cell, int basis) const {
    const int c0 = floor_mod(cell[0], repeats[0]);
    const int c1 = floor_mod(cell[1], repeats[1]);
    const int c2 = floor_mod(cell[2], repeats[2]);
    return ((c0 * repeats[1] + c1) * repeats[2] + c2) * n_basis + basis;
  }
  std::pair<IVec3, int> site_of(int idx) const {
    const int basis = idx % n_basis;
    int c = idx / n_basis;
    const int c2 = c % repeats[2];
    c /= repeats[2];
    const int c1 = c % repeats[1];
    const int c0 = c / repeats[1];
    return {IVec3{c0, c1, c2}, basis};
  }
};

// Supercell occupation, sigma = -1 for the first listed species of a site.
struct SpinConfig {
  std::vector<std::int8_t> sigma;
  long long sum_sigma = 0;

  int n_sites() const { return static_cast<int>(sigma.size()); }
  double x() const { return static_cast<double>(sum_sigma) / static_cast<double>(sigma.size()); }
  void assign(int n, std::int8_t value) {
    sigma.assign(n, value);
    sum_sigma = static_cast<long long>(n) * value;
  }
  void set(int i, std::int8_t value) {
    sum_sigma += value - sigma[i];
    sigma[i] = value;
  }
  void flip(int i) {
    sigma[i] = static_cast<std::int8_t>(-sigma[i]);
    sum_sigma += 2 * sigma[i];
  }
};

std::vector<SymOp> point_symmetries(const LatticeSpec& lattice);

ExpandedOrbit expand_orbit(const ClusterOrbitSpec& orbit, const LatticeSpec& lattice,
                           const std::vector<SymOp>& syms);

// One representative per orbit, sorted by (size, diameter); empty and point
// clusters always included. max_diameter_per_size maps cluster size (>= 2)
// to the largest allowed diameter in cartesian length units.
std::vector<ClusterOrbitSpec> generate_clusters(const LatticeSpec& lattice,
                                                const std::map<int, double>& max_diameter_per_size);

// Smallest diagonal supercell inscribing a sphere of radius er:
// n_i = ceil(2 er / d_i) with d_i the distance between lattice planes.
Supercell build_supercell(const LatticeSpec& lattice, double er);

// Tiling of a (commensurate) structure over a supercell. site_class[i] is the
// index of the structure atom that site i replicates; classes drive the LTE.
struct Tiling {
  SpinConfig config;
  std::vector<int> site_class;
  int n_classes = 0;
};

Tiling spin_config_from_structure(const StructureSpec& structure, const LatticeSpec& lattice,
                                  const Supercell& supercell);

// Frame-unit position of a supercell site.
Vec3 site_position_frame(const LatticeSpec& lattice, const Supercell& sc, int idx);

}  // namespace cepd

#endif
