// cepd-scan: semi-grand-canonical (T, mu) scanner, emc2-style flags.
// Reads lat.in, clusters.out, eci.out (teci.out when present) and gs_str.out
// from the working directory.

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
    "usage: cepd-scan -gs=<int|-1> -mu0=<f> [-mu1=<f> -dmu=<f>] -T0=<f> [-T1=<f> -dT=<f>] [-dn]\n"
    "                 -er=<f> [-dx=<f> | -n=<int>] [-eq=<int>] [-tstat=<f|0>] [-k=<f> | -keV]\n"
    "                 [-g2c] [-phi0=<f>] [-x=<f>] [-seed=<int>] [-o=<path>] [-dir=<path>]\n";

}  // namespace

int main(int argc, char** argv) {
  try {
    const std::set<std::string> bools = {"dn", "keV", "kev", "g2c", "h", "help"};
    const std::set<std::string> known = {"gs",  "mu0",  "mu1", "dmu",  "T0",   "T1",  "dT",
                                         "dn",  "er",   "dx",  "n",    "eq",   "tstat", "k",
                                         "keV", "kev",  "g2c", "phi0", "x",    "seed", "o",
                                         "dir", "ltep", "h",   "help"};
    const tools::Options opt = tools::Options::parse(argc, argv, bools, known);
    if (opt.has("h") || opt.has("help")) {
      std::cout << kUsage;
      return 0;
    }

    ScanPlan plan;
    plan.gs = static_cast<int>(opt.integer("gs", 0));
    plan.mu0 = opt.num("mu0", 0.0);
    plan.mu1 = opt.num_opt("mu1");
    plan.dmu = opt.num("dmu", 0.0);
    plan.T0 = opt.num("T0", 0.0);
    plan.T1 = opt.num_opt("T1");
    plan.dT = opt.num("dT", 0.0);
    plan.dn = opt.has("dn");
    plan.er = opt.num("er", 10.0);
    if (!opt.has("T0")) throw std::runtime_error("-T0 is required");

    RunControls& rc = plan.controls;
    rc.k_B = (opt.has("keV") || opt.has("kev")) ? 8.617e-5 : opt.num("k", 1.0);
    rc.dx = opt.num("dx", 1e-3);
    rc.n = opt.integer("n", -1);
    rc.eq = opt.integer("eq", -1);
    rc.tstat = opt.num("tstat", -1.0);
    rc.ltep = opt.num("ltep", 1e-3);
    rc.g2c = opt.has("g2c");
    rc.phi0 = opt.num_opt("phi0");
    rc.init_x = opt.num_opt("x");
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

    // ltedat.out-style seed info: the expansion value of phi per mu column
    {
      std::ofstream lte_out("ltedat.out");
      const auto u_first = plan.mu0;
      const auto u_last = plan.mu1.value_or(plan.mu0);
      const double du = plan.dmu == 0 ? 1.0 : std::fabs(plan.dmu);
      const double lo = std::min(u_first, u_last), hi = std::max(u_first, u_last);
      const double T_seed = plan.dn && plan.T1 ? *plan.T1 : plan.T0;
      for (double u = lo; u <= hi + 1e-9; u += du) {
        const double mu = input_mu_to_physical(u, sys.gs);
        if (plan.gs >= 0) {
          const LtePoint l = lte_phi(sys.gs.states.at(plan.gs), T_seed, mu, rc.ltep, rc.k_B);
          char buf[160];
          std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%d\n", T_seed, mu, l.phi,
                        l.x, l.E, l.valid ? 1 : 0);
          lte_out << buf;
        } else {
          char buf[120];
          std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\n", T_seed, mu,
                        hte_phi(sys.ce, T_seed, mu, rc.k_B));
          lte_out << buf;
        }
      }
    }

    SpinConfig final_config;
    scan(sys, plan,
         [&](const ScanRow& row) {
           out << format_row(row) << "\n";
           out.flush();
         },
         &final_config);

    std::ofstream snap("mcsnapshot.out");
    snap << write_snapshot(final_config, cell, sys.lattice);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "cepd-scan: " << e.what() << "\n" << kUsage;
    return 1;
  }
}
