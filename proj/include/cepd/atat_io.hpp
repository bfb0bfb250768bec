#ifndef CEPD_ATAT_IO_HPP
#define CEPD_ATAT_IO_HPP

// Readers and writers for the ATAT-style text formats (lat.in, gs_str.out,
// clusters.out, eci.out, teci.out) plus the tab-separated output tables.
// All coordinates in these files are expressed in the coordinate frame: a
// point (u,v,w) sits at u*A1 + v*A2 + w*A3 cartesian, where A1..A3 are the
// frame axes given either as "a b c alpha beta gamma" or as an explicit
// 3x3 matrix of row vectors.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cepd/geometry.hpp"

namespace cepd {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct CoordFrame {
  Mat3 axes = identity3();  // rows are the frame axes, cartesian lengths
  // Set when the frame was given in length/angle form (kept for diagnostics).
  std::optional<std::array<double, 6>> lengths_angles;

  Vec3 to_cartesian(const Vec3& frame_coords) const { return row_apply(frame_coords, axes); }
};

CoordFrame frame_from_lengths_angles(double a, double b, double c,
                                     double alpha_deg, double beta_deg, double gamma_deg);

struct LatticeSite {
  Vec3 position;                      // frame units
  std::vector<std::string> species;   // order as written; order defines the spin mapping
};

struct LatticeSpec {
  CoordFrame frame;
  Mat3 cell;  // rows are the cell vectors, frame units
  std::vector<LatticeSite> sites;

  Mat3 cell_cartesian() const;            // rows are cell vectors in cartesian
  Vec3 site_cartesian(std::size_t i) const { return frame.to_cartesian(sites[i].position); }
};

struct StructureAtom {
  Vec3 position;  // frame units (of the structure's own frame)
  std::string species;
};

struct StructureSpec {
  CoordFrame frame;
  Mat3 cell;  // frame units
  std::vector<StructureAtom> atoms;

  Mat3 cell_cartesian() const;
};

struct ClusterOrbitSpec {
  int stated_multiplicity = 0;  // parsed but recomputed downstream
  double diameter = 0.0;
  std::vector<Vec3> points;  // frame units
};

struct EciTable {
  std::vector<double> values;  // index-aligned with the cluster list
};

struct TEciTable {
  double t_start = 0.0;
  int count = 0;
  double t_step = 0.0;
  std::vector<EciTable> rows;  // one per grid temperature
};

LatticeSpec parse_lattice(const std::string& text);
std::vector<StructureSpec> parse_structures(const std::string& text);
std::vector<ClusterOrbitSpec> parse_clusters(const std::string& text);
EciTable parse_eci(const std::string& text);

// teci.out layout: header line "T_start count T_step", then `count` blocks of
// `n_clusters` values, one value per line, blank lines between blocks optional.
// (ATAT never documents its own layout; this one is what cepd reads/writes.)
TEciTable parse_teci(const std::string& text, std::size_t n_clusters);

// Output tables: tab separated, 6 fixed decimals, counts as plain integers.
struct ScanRow {
  double T = 0, mu = 0, E = 0, x = 0, phi = 0, stderr_x = 0;
  long long n_eq = 0, n_avg = 0;
  std::string flag;  // empty for normal rows; short reason otherwise
};

struct BoundaryPoint {
  double T = 0, mu = 0;
  double x1 = 0, x2 = 0;
  double ebar1 = 0, ebar2 = 0;  // E - mu*x per phase
  std::string flag;
};

std::string format_row(const ScanRow& row);
std::string format_row(const BoundaryPoint& row);
std::string format_table(const std::vector<ScanRow>& rows);
std::string format_table(const std::vector<BoundaryPoint>& rows);

// Snapshot emission (mcsnapshot.out): a gs_str.out-style structure block for
// the current occupation, parseable by parse_structures. Defined with the
// supercell machinery in lattice.hpp.
struct Supercell;
struct SpinConfig;
std::string write_snapshot(const SpinConfig& config, const Supercell& supercell,
                           const LatticeSpec& lattice);

}  // namespace cepd

#endif
