// cepd-phb: two-phase boundary tracker, phb-style flags. Starts from the LTE
// boundary point (or a user-supplied -T/-mu pair) and follows dmu/dbeta.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "cepd/drivers.hpp"
#include "optparse.hpp"

using namespace cepd;

namespace {

std::uint64_t time_seed() {
  return static_cast<std::uint64_t>(
      std::chrono::high_resolution_clock::now().time_since_epoch().count());
}

const char* kUsage =
    "usage: cepd-phb -gs1=<int> -gs2=<int> [-T=<f> -mu=<f>] [-dn] -dT=<f> -dx=<f> -er=<f>\n"
    "                -ltep=<f> [-k=<f> | -keV] [-seed=<int>] [-n=<int>] [-eq=<int>]\n"
    "                [-Tstop=<f>] [-o=<path>] [-dir=<path>]\n";

}  // namespace

int main(int argc, char** argv) {
  try {
    const std::set<std::string> bools = {"dn", "keV", "kev", "h", "help"};
    const std::set<std::string> known = {"gs1", "gs2",  "T",   "mu",  "dn",   "dT",
                                         "dx",  "er",   "ltep", "k",  "keV",  "kev",
                                         "seed", "o",   "dir",  "n",  "eq",   "Tstop",
                                         "h",   "help"};
    const tools::Options opt = tools::Options::parse(argc, argv, bools, known);
    if (opt.has("h") || opt.has("help")) {
      std::cout << kUsage;
      return 0;
    }

    BoundaryPlan plan;
    plan.gs1 = static_cast<int>(opt.integer("gs1", 0));
    plan.gs2 = static_cast<int>(opt.integer("gs2", 1));
    plan.start_T = opt.num_opt("T");
    plan.start_mu = opt.num_opt("mu");
    plan.dT = opt.num("dT", 0.0);
    plan.dn = opt.has("dn");
    plan.T_stop = opt.num_opt("Tstop");
    plan.er = opt.num("er", 10.0);
    if (!opt.has("dT")) throw std::runtime_error("-dT is required");

    RunControls& rc = plan.controls;
    rc.k_B = (opt.has("keV") || opt.has("kev")) ? 8.617e-5 : opt.num("k", 1.0);
    rc.dx = opt.num("dx", 1e-3);
    rc.n = opt.integer("n", -1);
    rc.eq = opt.integer("eq", -1);
    rc.ltep = opt.num("ltep", 1e-3);
    rc.seed = opt.has("seed") ? static_cast<std::uint64_t>(opt.integer("seed", 0)) : time_seed();

    const std::string dir = opt.str("dir", ".");
    const System sys = System::load_from_directory(dir);

    const Supercell cell = build_supercell(sys.lattice, plan.er);
    std::printf("Supercell size: %d %d %d\n", cell.repeats[0], cell.repeats[1], cell.repeats[2]);
    std::fflush(stdout);

    std::ofstream file;
    const std::string out_path = opt.str("o");
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw std::runtime_error("cannot open output file " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file;

    track_boundary(
        sys, plan,
        [&](const BoundaryPoint& row) {
          out << format_row(row) << "\n";
          out.flush();
        },
        [](int phase, const PointStats& stats) {
          std::printf("Phase %d n_equil= %lld n_avg= %lld\n", phase, stats.n_eq, stats.n_avg);
          std::fflush(stdout);
        });
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "cepd-phb: " << e.what() << "\n" << kUsage;
    return 1;
  }
}
