#include "cepd/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "cepd/warn.hpp"

namespace cepd {

namespace {

constexpr double kSiteTol = 1e-5;   // frame units, per the matching convention
constexpr double kLenTol = 1e-5;    // cartesian lengths

// Distance between lattice planes perpendicular to cell axis i.
double plane_distance(const Mat3& cell_cart, int i) {
  const int j = (i + 1) % 3, k = (i + 2) % 3;
  return std::fabs(det(cell_cart)) / norm(cross(cell_cart[j], cell_cart[k]));
}

struct SiteMatch {
  bool ok = false;
  int basis = -1;
  IVec3 offset{0, 0, 0};
};

// Identify a frame-unit position with a lattice site (basis + integer cell
// offset), within kSiteTol measured in frame units.
SiteMatch match_site(const Vec3& pos_frame, const LatticeSpec& lattice, const Mat3& cell_inv) {
  SiteMatch m;
  for (std::size_t b = 0; b < lattice.sites.size(); ++b) {
    const Vec3 rel = pos_frame - lattice.sites[b].position;
    const Vec3 frac = row_apply(rel, cell_inv);
    const Vec3 n = {std::round(frac[0]), std::round(frac[1]), std::round(frac[2])};
    const Vec3 res_frame = rel - row_apply(n, lattice.cell);
    if (norm(res_frame) <= kSiteTol) {
      m.ok = true;
      m.basis = static_cast<int>(b);
      m.offset = {static_cast<int>(n[0]), static_cast<int>(n[1]), static_cast<int>(n[2])};
      return m;
    }
  }
  return m;
}

std::vector<SiteRef> canonical_cluster(std::vector<SiteRef> sites) {
  std::sort(sites.begin(), sites.end());
  const IVec3 base = sites.front().offset;
  for (SiteRef& s : sites)
    s.offset = {s.offset[0] - base[0], s.offset[1] - base[1], s.offset[2] - base[2]};
  return sites;
}

double cluster_diameter(const std::vector<Vec3>& cart_points) {
  double d = 0;
  for (std::size_t i = 0; i < cart_points.size(); ++i)
    for (std::size_t j = i + 1; j < cart_points.size(); ++j)
      d = std::max(d, norm(cart_points[i] - cart_points[j]));
  return d;
}

Vec3 site_cart(const LatticeSpec& lattice, const SiteRef& s) {
  const Vec3 f = lattice.sites[s.basis].position +
                 row_apply(Vec3{double(s.offset[0]), double(s.offset[1]), double(s.offset[2])}, lattice.cell);
  return lattice.frame.to_cartesian(f);
}

}  // namespace

std::vector<SymOp> point_symmetries(const LatticeSpec& lattice) {
  const Mat3 cell = lattice.cell_cartesian();
  const Mat3 cell_inv = inverse(cell);
  const Mat3 frame_inv = inverse(lattice.frame.axes);
  const Mat3 cell_frame_inv = inverse(lattice.cell);

  const double len0 = norm(cell[0]), len1 = norm(cell[1]), len2 = norm(cell[2]);
  const double max_len = std::max({len0, len1, len2});
  const double d_min = std::min({plane_distance(cell, 0), plane_distance(cell, 1), plane_distance(cell, 2)});
  const int reach = static_cast<int>(std::ceil(max_len / d_min)) + 1;

  // lattice vectors matching each cell-vector length
  std::array<std::vector<Vec3>, 3> shells;
  for (int n0 = -reach; n0 <= reach; ++n0)
    for (int n1 = -reach; n1 <= reach; ++n1)
      for (int n2 = -reach; n2 <= reach; ++n2) {
        if (n0 == 0 && n1 == 0 && n2 == 0) continue;
        const Vec3 v = row_apply(Vec3{double(n0), double(n1), double(n2)}, cell);
        const double len = norm(v);
        if (std::fabs(len - len0) < kLenTol) shells[0].push_back(v);
        if (std::fabs(len - len1) < kLenTol) shells[1].push_back(v);
        if (std::fabs(len - len2) < kLenTol) shells[2].push_back(v);
      }

  std::vector<SymOp> ops;
  std::set<std::vector<long long>> seen;  // quantized (rot, trans) keys

  auto try_rotation = [&](const Mat3& rot) {
    // rotation must be orthogonal; lattice preservation holds by construction
    const Mat3 rtr = mat_mul(transpose(rot), rot);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (std::fabs(rtr[i][j] - (i == j ? 1.0 : 0.0)) > 1e-8) return;

    // candidate translations map basis site 0 onto a compatible site
    const Vec3 p0 = lattice.site_cartesian(0);
    for (std::size_t j = 0; j < lattice.sites.size(); ++j) {
      if (lattice.sites[j].species != lattice.sites[0].species) continue;
      const Vec3 t = lattice.frame.to_cartesian(lattice.sites[j].position) - mat_apply(rot, p0);
      bool all_ok = true;
      for (std::size_t i = 0; i < lattice.sites.size() && all_ok; ++i) {
        const Vec3 image = mat_apply(rot, lattice.site_cartesian(i)) + t;
        const Vec3 image_frame = row_apply(image, frame_inv);
        const SiteMatch m = match_site(image_frame, lattice, cell_frame_inv);
        all_ok = m.ok && lattice.sites[m.basis].species == lattice.sites[i].species;
      }
      if (!all_ok) continue;

      // canonical translation: reduce into the home cell
      Vec3 t_frac = row_apply(t, cell_inv);
      for (double& c : t_frac) {
        c -= std::floor(c);
        if (c > 1.0 - 1e-9) c = 0.0;
      }
      const Vec3 t_red = row_apply(t_frac, cell);

      std::vector<long long> key;
      key.reserve(12);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) key.push_back(std::llround(rot[r][c] * 1e8));
      for (int c = 0; c < 3; ++c) key.push_back(std::llround(t_red[c] * 1e8));
      if (seen.insert(key).second) ops.push_back(SymOp{rot, t_red});
    }
  };

  for (const Vec3& v0 : shells[0])
    for (const Vec3& v1 : shells[1])
      for (const Vec3& v2 : shells[2]) {
        // rot * cell[i] = v[i] for all rows  =>  rot = (cell^-1 V)^T
        const Mat3 vmat{v0, v1, v2};
        try_rotation(transpose(mat_mul(cell_inv, vmat)));
      }

  if (ops.empty()) throw std::runtime_error("no symmetry operations found (invalid lattice?)");
  return ops;
}

ExpandedOrbit expand_orbit(const ClusterOrbitSpec& orbit, const LatticeSpec& lattice,
                           const std::vector<SymOp>& syms) {
  ExpandedOrbit out;
  out.npoints = static_cast<int>(orbit.points.size());

  const Mat3 frame_inv = inverse(lattice.frame.axes);
  const Mat3 cell_frame_inv = inverse(lattice.cell);

  if (orbit.points.empty()) {
    out.members.push_back({});
    return out;
  }

  std::vector<Vec3> cart;
  for (const Vec3& p : orbit.points) {
    const SiteMatch m = match_site(p, lattice, cell_frame_inv);
    if (!m.ok)
      throw std::runtime_error("cluster point is not on a lattice site (off-lattice beyond tolerance)");
    cart.push_back(lattice.frame.to_cartesian(p));
  }
  out.diameter = cluster_diameter(cart);
  if (orbit.diameter > 0 && std::fabs(out.diameter - orbit.diameter) > 1e-3)
    warn("cluster diameter " + std::to_string(orbit.diameter) + " in file differs from computed " +
         std::to_string(out.diameter));

  std::set<std::vector<SiteRef>> members;
  for (const SymOp& op : syms) {
    std::vector<SiteRef> image;
    image.reserve(cart.size());
    bool ok = true;
    for (const Vec3& p : cart) {
      const Vec3 q_frame = row_apply(op.apply(p), frame_inv);
      const SiteMatch m = match_site(q_frame, lattice, cell_frame_inv);
      if (!m.ok) {
        ok = false;
        break;
      }
      image.push_back(SiteRef{m.offset, m.basis});
    }
    if (!ok) throw std::runtime_error("symmetry image of cluster left the lattice");
    members.insert(canonical_cluster(std::move(image)));
  }
  out.members.assign(members.begin(), members.end());
  return out;
}

std::vector<ClusterOrbitSpec> generate_clusters(const LatticeSpec& lattice,
                                                const std::map<int, double>& max_diameter_per_size) {
  const std::vector<SymOp> syms = point_symmetries(lattice);
  const Mat3 cell_cart = lattice.cell_cartesian();
  const Mat3 cell_frame_inv = inverse(lattice.cell);

  struct Found {
    int size;
    double diameter;
    std::vector<SiteRef> key;  // canonical representative
  };
  std::vector<Found> found;
  std::set<std::vector<SiteRef>> seen;

  auto canonical_key = [&](const std::vector<SiteRef>& sites) {
    // smallest canonical form over the whole symmetry group
    std::vector<SiteRef> best;
    const Mat3 frame_inv = inverse(lattice.frame.axes);
    for (const SymOp& op : syms) {
      std::vector<SiteRef> image;
      image.reserve(sites.size());
      for (const SiteRef& s : sites) {
        const Vec3 q_frame = row_apply(op.apply(site_cart(lattice, s)), frame_inv);
        const SiteMatch m = match_site(q_frame, lattice, cell_frame_inv);
        image.push_back(SiteRef{m.offset, m.basis});
      }
      image = canonical_cluster(std::move(image));
      if (best.empty() || image < best) best = image;
    }
    return best;
  };

  // point clusters, one orbit per inequivalent basis site
  std::vector<std::vector<SiteRef>> size_prev;
  for (std::size_t b = 0; b < lattice.sites.size(); ++b) {
    std::vector<SiteRef> single{SiteRef{{0, 0, 0}, static_cast<int>(b)}};
    const auto key = canonical_key(single);
    if (seen.insert(key).second) {
      found.push_back(Found{1, 0.0, key});
      size_prev.push_back(key);
    }
  }

  int max_size = 1;
  for (const auto& [size, cutoff] : max_diameter_per_size) {
    if (size < 2) throw std::runtime_error("cluster sizes below 2 have no cutoff");
    (void)cutoff;
    max_size = std::max(max_size, size);
  }

  for (int size = 2; size <= max_size; ++size) {
    const auto it = max_diameter_per_size.find(size);
    const double cutoff = (it == max_diameter_per_size.end()) ? 0.0 : it->second;
    std::vector<std::vector<SiteRef>> size_now;
    if (cutoff > 0) {
      // candidate extension sites within cutoff of every point of the parent
      const double d0 = plane_distance(cell_cart, 0), d1 = plane_distance(cell_cart, 1),
                   d2 = plane_distance(cell_cart, 2);
      for (const std::vector<SiteRef>& parent : size_prev) {
        std::vector<Vec3> parent_cart;
        for (const SiteRef& s : parent) parent_cart.push_back(site_cart(lattice, s));
        const int r0 = static_cast<int>(std::ceil(cutoff / d0)) + 1;
        const int r1 = static_cast<int>(std::ceil(cutoff / d1)) + 1;
        const int r2 = static_cast<int>(std::ceil(cutoff / d2)) + 1;
        for (int n0 = -r0; n0 <= r0; ++n0)
          for (int n1 = -r1; n1 <= r1; ++n1)
            for (int n2 = -r2; n2 <= r2; ++n2)
              for (int b = 0; b < static_cast<int>(lattice.sites.size()); ++b) {
                const SiteRef cand{IVec3{n0, n1, n2}, b};
                if (std::find(parent.begin(), parent.end(), cand) != parent.end()) continue;
                const Vec3 p = site_cart(lattice, cand);
                bool within = true;
                for (const Vec3& q : parent_cart)
                  if (norm(p - q) > cutoff + 1e-9) {
                    within = false;
                    break;
                  }
                if (!within) continue;
                std::vector<SiteRef> cluster = parent;
                cluster.push_back(cand);
                const auto key = canonical_key(cluster);
                if (!seen.insert(key).second) continue;
                std::vector<Vec3> cart = parent_cart;
                cart.push_back(p);
                found.push_back(Found{size, cluster_diameter(cart), key});
                size_now.push_back(key);
              }
      }
    }
    size_prev = std::move(size_now);
  }

  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    if (a.size != b.size) return a.size < b.size;
    if (std::fabs(a.diameter - b.diameter) > 1e-9) return a.diameter < b.diameter;
    return a.key < b.key;
  });

  std::vector<ClusterOrbitSpec> out;
  {
    ClusterOrbitSpec empty;
    empty.stated_multiplicity = 1;
    empty.diameter = 0.0;
    out.push_back(empty);
  }
  for (const Found& f : found) {
    ClusterOrbitSpec spec;
    spec.diameter = f.diameter;
    for (const SiteRef& s : f.key)
      spec.points.push_back(lattice.sites[s.basis].position +
                            row_apply(Vec3{double(s.offset[0]), double(s.offset[1]), double(s.offset[2])},
                                      lattice.cell));
    spec.stated_multiplicity = expand_orbit(spec, lattice, syms).per_cell_multiplicity();
    out.push_back(std::move(spec));
  }
  return out;
}

Supercell build_supercell(const LatticeSpec& lattice, double er) {
  if (er <= 0) throw std::runtime_error("enclosed radius must be positive");
  const Mat3 cell = lattice.cell_cartesian();
  Supercell sc;
  sc.n_basis = static_cast<int>(lattice.sites.size());
  for (int i = 0; i < 3; ++i) {
    const double d = plane_distance(cell, i);
    sc.repeats[i] = std::max(1, static_cast<int>(std::ceil(2.0 * er / d - 1e-9)));
  }
  return sc;
}

Vec3 site_position_frame(const LatticeSpec& lattice, const Supercell& sc, int idx) {
  const auto [cell, basis] = sc.site_of(idx);
  return lattice.sites[basis].position +
         row_apply(Vec3{double(cell[0]), double(cell[1]), double(cell[2])}, lattice.cell);
}

Tiling spin_config_from_structure(const StructureSpec& structure, const LatticeSpec& lattice,
                                  const Supercell& supercell) {
  const Mat3 lat_cart = lattice.cell_cartesian();
  const Mat3 str_cart = structure.cell_cartesian();
  const Mat3 lat_cart_inv = inverse(lat_cart);

  // the structure cell must be an integer superlattice of the lattice cell
  const Mat3 m = mat_mul(str_cart, lat_cart_inv);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (round_err(m[i][j]) > 1e-5)
        throw std::runtime_error("structure is incommensurate with the lattice");

  // the supercell period must be a multiple of the structure period
  const Mat3 str_cart_inv = inverse(str_cart);
  Mat3 super_cart;
  for (int i = 0; i < 3; ++i) super_cart[i] = double(supercell.repeats[i]) * lat_cart[i];
  const Mat3 k = mat_mul(super_cart, str_cart_inv);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (round_err(k[i][j]) > 1e-5)
        throw std::runtime_error("supercell repeats are not commensurate with the structure period");

  // spin carried by each structure atom
  const Mat3 frame_inv = inverse(lattice.frame.axes);
  const Mat3 cell_frame_inv = inverse(lattice.cell);
  std::vector<std::int8_t> atom_spin(structure.atoms.size());
  std::vector<Vec3> atom_frac(structure.atoms.size());  // fractional in structure cell
  for (std::size_t a = 0; a < structure.atoms.size(); ++a) {
    const Vec3 cart = structure.frame.to_cartesian(structure.atoms[a].position);
    const SiteMatch sm = match_site(row_apply(cart, frame_inv), lattice, cell_frame_inv);
    if (!sm.ok) throw std::runtime_error("structure atom does not sit on a lattice site");
    const auto& species = lattice.sites[sm.basis].species;
    const auto found = std::find(species.begin(), species.end(), structure.atoms[a].species);
    if (found == species.end())
      throw std::runtime_error("unknown species name '" + structure.atoms[a].species + "'");
    const auto index = std::distance(species.begin(), found);
    if (index > 1) throw std::runtime_error("sites with more than two species are not supported");
    atom_spin[a] = index == 0 ? -1 : +1;
    Vec3 f = row_apply(cart, str_cart_inv);
    for (double& c : f) c -= std::floor(c);
    atom_frac[a] = f;
  }

  Tiling tiling;
  tiling.config.assign(supercell.n_sites(), -1);
  tiling.site_class.assign(supercell.n_sites(), -1);
  tiling.n_classes = static_cast<int>(structure.atoms.size());

  auto wrapped_close = [](const Vec3& a, const Vec3& b) {
    for (int i = 0; i < 3; ++i) {
      double d = std::fabs(a[i] - b[i]);
      d = std::min(d, 1.0 - d);
      if (d > 1e-4) return false;
    }
    return true;
  };

  for (int idx = 0; idx < supercell.n_sites(); ++idx) {
    const Vec3 cart = lattice.frame.to_cartesian(site_position_frame(lattice, supercell, idx));
    Vec3 f = row_apply(cart, str_cart_inv);
    for (double& c : f) c -= std::floor(c);
    int match = -1;
    for (std::size_t a = 0; a < structure.atoms.size(); ++a)
      if (wrapped_close(f, atom_frac[a])) {
        match = static_cast<int>(a);
        break;
      }
    if (match < 0)
      throw std::runtime_error("structure does not decorate every lattice site (incommensurate basis)");
    tiling.config.set(idx, atom_spin[match]);
    tiling.site_class[idx] = match;
  }
  return tiling;
}

std::string write_snapshot(const SpinConfig& config, const Supercell& supercell,
                           const LatticeSpec& lattice) {
  char buf[128];
  std::string out;
  auto line3 = [&](const Vec3& v) {
    std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f\n", v[0], v[1], v[2]);
    out += buf;
  };
  for (int i = 0; i < 3; ++i) line3(lattice.frame.axes[i]);
  for (int i = 0; i < 3; ++i) line3(double(supercell.repeats[i]) * lattice.cell[i]);
  for (int idx = 0; idx < supercell.n_sites(); ++idx) {
    const Vec3 p = site_position_frame(lattice, supercell, idx);
    const auto& species = lattice.sites[supercell.site_of(idx).second].species;
    const std::size_t which = (config.sigma[idx] < 0 || species.size() < 2) ? 0 : 1;
    std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %s\n", p[0], p[1], p[2], species[which].c_str());
    out += buf;
  }
  out += "end\n";
  return out;
}

}  // namespace cepd
