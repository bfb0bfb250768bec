#include "cepd/atat_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cepd {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Line {
  int number = 0;  // 1-based line number in the original text
  std::vector<std::string> tokens;
};

// Split into lines of whitespace-separated tokens, dropping blank lines but
// remembering original line numbers for error messages.
std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    Line line;
    line.number = number;
    std::istringstream ls(raw);
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(int line_number, const std::string& what) {
  throw ParseError("line " + std::to_string(line_number) + ": " + what);
}

double to_number(const Line& line, std::size_t i) {
  const std::string& tok = line.tokens[i];
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) fail(line.number, "not a number: '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    fail(line.number, "not a number: '" + tok + "'");
  }
}

bool is_number(const std::string& tok) {
  try {
    std::size_t used = 0;
    (void)std::stod(tok, &used);
    return used == tok.size();
  } catch (...) {
    return false;
  }
}

Vec3 read_vec3(const Line& line) {
  if (line.tokens.size() != 3) fail(line.number, "expected 3 numbers");
  return {to_number(line, 0), to_number(line, 1), to_number(line, 2)};
}

// Reads a coordinate frame starting at lines[pos]: either one line of six
// numbers (lengths+angles) or three rows of a 3x3 matrix.
CoordFrame read_frame(const std::vector<Line>& lines, std::size_t& pos) {
  if (pos >= lines.size()) throw ParseError("unexpected end of file while reading coordinate frame");
  const Line& first = lines[pos];
  if (first.tokens.size() == 6) {
    CoordFrame f = frame_from_lengths_angles(to_number(first, 0), to_number(first, 1), to_number(first, 2),
                                             to_number(first, 3), to_number(first, 4), to_number(first, 5));
    ++pos;
    return f;
  }
  if (first.tokens.size() == 3) {
    CoordFrame f;
    for (int r = 0; r < 3; ++r) {
      if (pos >= lines.size()) fail(first.number, "truncated 3x3 coordinate frame");
      f.axes[r] = read_vec3(lines[pos]);
      ++pos;
    }
    if (std::fabs(det(f.axes)) < 1e-12) fail(first.number, "coordinate frame has zero determinant");
    return f;
  }
  fail(first.number, "coordinate frame line must have 3 or 6 numbers");
}

Mat3 read_cell(const std::vector<Line>& lines, std::size_t& pos, int context_line) {
  Mat3 cell;
  for (int r = 0; r < 3; ++r) {
    if (pos >= lines.size()) fail(context_line, "truncated cell vectors");
    cell[r] = read_vec3(lines[pos]);
    ++pos;
  }
  return cell;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

CoordFrame frame_from_lengths_angles(double a, double b, double c,
                                     double alpha_deg, double beta_deg, double gamma_deg) {
  if (a <= 0 || b <= 0 || c <= 0) throw ParseError("frame lengths must be positive");
  for (double ang : {alpha_deg, beta_deg, gamma_deg})
    if (!(ang > 0.0 && ang < 180.0)) throw ParseError("frame angles must lie in (0, 180) degrees");
  const double ca = std::cos(alpha_deg * kPi / 180.0);
  const double cb = std::cos(beta_deg * kPi / 180.0);
  const double cg = std::cos(gamma_deg * kPi / 180.0);
  const double sg = std::sin(gamma_deg * kPi / 180.0);
  CoordFrame f;
  f.axes[0] = {a, 0, 0};
  f.axes[1] = {b * cg, b * sg, 0};
  const double cx = cb;
  const double cy = (ca - cb * cg) / sg;
  const double cz2 = 1.0 - cx * cx - cy * cy;
  if (cz2 <= 0) throw ParseError("frame angles do not define a valid cell");
  f.axes[2] = {c * cx, c * cy, c * std::sqrt(cz2)};
  // exact zeros for right angles keep the common cubic case clean
  for (auto& row : f.axes)
    for (double& v : row)
      if (std::fabs(v) < 1e-14) v = 0.0;
  f.lengths_angles = {a, b, c, alpha_deg, beta_deg, gamma_deg};
  return f;
}

Mat3 LatticeSpec::cell_cartesian() const {
  Mat3 cc;
  for (int i = 0; i < 3; ++i) cc[i] = frame.to_cartesian(cell[i]);
  return cc;
}

Mat3 StructureSpec::cell_cartesian() const {
  Mat3 cc;
  for (int i = 0; i < 3; ++i) cc[i] = frame.to_cartesian(cell[i]);
  return cc;
}

LatticeSpec parse_lattice(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty lattice file");
  std::size_t pos = 0;
  LatticeSpec lat;
  lat.frame = read_frame(lines, pos);
  lat.cell = read_cell(lines, pos, lines[0].number);
  if (std::fabs(det(lat.cell)) < 1e-12) fail(lines[0].number, "cell has zero determinant");
  while (pos < lines.size()) {
    const Line& line = lines[pos];
    if (line.tokens.size() < 4) fail(line.number, "site line needs 3 coordinates and at least one species");
    LatticeSite site;
    site.position = {to_number(line, 0), to_number(line, 1), to_number(line, 2)};
    // remainder is a comma separated species list, possibly spaced: "Ni, Al"
    std::string rest;
    for (std::size_t i = 3; i < line.tokens.size(); ++i) rest += line.tokens[i];
    std::string name;
    for (char ch : rest) {
      if (ch == ',') {
        if (name.empty()) fail(line.number, "empty species name");
        site.species.push_back(name);
        name.clear();
      } else {
        name += ch;
      }
    }
    if (name.empty()) fail(line.number, "empty species name");
    site.species.push_back(name);
    lat.sites.push_back(std::move(site));
    ++pos;
  }
  if (lat.sites.empty()) throw ParseError("lattice file lists no sites");
  return lat;
}

std::vector<StructureSpec> parse_structures(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  std::vector<StructureSpec> out;
  std::size_t pos = 0;
  while (pos < lines.size()) {
    const int start_line = lines[pos].number;
    StructureSpec s;
    s.frame = read_frame(lines, pos);
    s.cell = read_cell(lines, pos, start_line);
    bool ended = false;
    while (pos < lines.size()) {
      const Line& line = lines[pos];
      if (line.tokens.size() == 1 && line.tokens[0] == "end") {
        ended = true;
        ++pos;
        break;
      }
      if (line.tokens.size() != 4) fail(line.number, "atom line needs 3 coordinates and a species name");
      if (is_number(line.tokens[3])) fail(line.number, "atom species must be a name, got a number");
      StructureAtom atom;
      atom.position = {to_number(line, 0), to_number(line, 1), to_number(line, 2)};
      atom.species = line.tokens[3];
      s.atoms.push_back(std::move(atom));
      ++pos;
    }
    if (!ended) fail(start_line, "structure block not terminated by 'end'");
    if (s.atoms.empty()) fail(start_line, "structure block has no atoms");
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ParseError("no structure blocks found");
  return out;
}

std::vector<ClusterOrbitSpec> parse_clusters(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  std::vector<ClusterOrbitSpec> out;
  std::size_t pos = 0;
  while (pos < lines.size()) {
    ClusterOrbitSpec orbit;
    const Line& mline = lines[pos];
    if (mline.tokens.size() != 1) fail(mline.number, "multiplicity line must hold one number");
    orbit.stated_multiplicity = static_cast<int>(to_number(mline, 0));
    ++pos;
    if (pos >= lines.size()) fail(mline.number, "truncated cluster block (missing diameter)");
    const Line& dline = lines[pos];
    if (dline.tokens.size() != 1) fail(dline.number, "diameter line must hold one number");
    orbit.diameter = to_number(dline, 0);
    ++pos;
    if (pos >= lines.size()) fail(dline.number, "truncated cluster block (missing point count)");
    const Line& nline = lines[pos];
    if (nline.tokens.size() != 1) fail(nline.number, "point-count line must hold one number");
    const int npoints = static_cast<int>(to_number(nline, 0));
    if (npoints < 0) fail(nline.number, "negative point count");
    ++pos;
    for (int i = 0; i < npoints; ++i) {
      if (pos >= lines.size() || lines[pos].tokens.size() != 3)
        fail(nline.number, "cluster block lists " + std::to_string(npoints) +
                               " points but coordinate lines do not match");
      orbit.points.push_back(read_vec3(lines[pos]));
      ++pos;
    }
    out.push_back(std::move(orbit));
  }
  if (out.empty()) throw ParseError("no cluster blocks found");
  return out;
}

EciTable parse_eci(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty ECI file");
  EciTable t;
  for (const Line& line : lines) {
    if (line.tokens.size() != 1) fail(line.number, "expected one ECI value per line");
    t.values.push_back(to_number(line, 0));
  }
  return t;
}

TEciTable parse_teci(const std::string& text, std::size_t n_clusters) {
  const std::vector<Line> lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty teci file");
  const Line& header = lines[0];
  if (header.tokens.size() != 3) fail(header.number, "teci header must be 'T_start count T_step'");
  TEciTable t;
  t.t_start = to_number(header, 0);
  t.count = static_cast<int>(to_number(header, 1));
  t.t_step = to_number(header, 2);
  if (t.count < 2) fail(header.number, "teci grid needs at least 2 temperatures");
  std::size_t pos = 1;
  for (int r = 0; r < t.count; ++r) {
    EciTable row;
    for (std::size_t i = 0; i < n_clusters; ++i) {
      if (pos >= lines.size())
        fail(lines.back().number, "teci block " + std::to_string(r) + " is short: expected " +
                                      std::to_string(n_clusters) + " values");
      const Line& line = lines[pos];
      if (line.tokens.size() != 1) fail(line.number, "expected one ECI value per line");
      row.values.push_back(to_number(line, 0));
      ++pos;
    }
    t.rows.push_back(std::move(row));
  }
  if (pos != lines.size()) fail(lines[pos].number, "trailing values after last teci block");
  return t;
}

std::string format_row(const ScanRow& r) {
  std::string s = fmt6(r.T) + "\t" + fmt6(r.mu) + "\t" + fmt6(r.E) + "\t" + fmt6(r.x) + "\t" +
                  fmt6(r.phi) + "\t" + fmt6(r.stderr_x) + "\t" + std::to_string(r.n_eq) + "\t" +
                  std::to_string(r.n_avg);
  if (!r.flag.empty()) s += "\t# " + r.flag;
  return s;
}

std::string format_row(const BoundaryPoint& r) {
  std::string s = fmt6(r.T) + "\t" + fmt6(r.mu) + "\t" + fmt6(r.x1) + "\t" + fmt6(r.x2) + "\t" +
                  fmt6(r.ebar1) + "\t" + fmt6(r.ebar2);
  if (!r.flag.empty()) s += "\t# " + r.flag;
  return s;
}

template <class Row>
static std::string format_table_impl(const std::vector<Row>& rows) {
  std::string out;
  for (const Row& r : rows) {
    out += format_row(r);
    out += "\n";
  }
  return out;
}

std::string format_table(const std::vector<ScanRow>& rows) { return format_table_impl(rows); }
std::string format_table(const std::vector<BoundaryPoint>& rows) { return format_table_impl(rows); }

}  // namespace cepd
