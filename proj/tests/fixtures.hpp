#ifndef CEPD_TESTS_FIXTURES_HPP
#define CEPD_TESTS_FIXTURES_HPP

// Input decks for the two worked models: a simple-cubic separating alloy
// (sc) and the checkerboard/NaCl ordering alloy (cb).

#include <string>

#include "cepd/drivers.hpp"

namespace fixtures {

inline const char* kScLatIn =
    "3.5 3.5 3.5 90 90 90\n"
    "1. 0 0\n"
    "0 1 0\n"
    "0 0 1\n"
    "0 0 0 Ni, Al\n";

inline const char* kFccLatIn =
    "3.52 3.52 3.52 90 90 90\n"
    "0   0.5 0.5\n"
    "0.5 0   0.5\n"
    "0.5 0.5 0\n"
    "0.000000 0.000000 0.000000 Ni,Al\n";

inline const char* kScGsStrOut =
    "3.500000 0.000000 0.000000\n"
    "0.000000 3.500000 0.000000\n"
    "0.000000 0.000000 3.500000\n"
    "1. 0 0\n"
    "0 1. 0\n"
    "0 0 1.\n"
    "1.000000 1.000000 1.000000 Ni\n"
    "end\n"
    "\n"
    "3.500000 0.000000 0.000000\n"
    "0.000000 3.500000 0.000000\n"
    "0.000000 0.000000 3.500000\n"
    "1. 0 0\n"
    "0 1. 0\n"
    "0 0 1.\n"
    "1.000000 1.000000 1.000000 Al\n"
    "end\n";

inline const char* kScClustersOut =
    "1\n"
    "0.000000\n"
    "0\n"
    "\n"
    "1\n"
    "0.000000\n"
    "1\n"
    "1.000000 1.000000 1.000000\n"
    "\n"
    "6\n"
    "3.5\n"
    "2\n"
    "1.000000 1.000000 1.000000\n"
    "1.000 1.0000 0.0000\n";

inline const char* kScEciOut = "0.\n0.\n-1\n";

inline const char* kCbGsStrOut =
    "3.500000 0.000000 0.000000\n"
    "0.000000 3.500000 0.000000\n"
    "0.000000 0.000000 3.500000\n"
    "1. 0 0\n"
    "0 1. 0\n"
    "0 0 1.\n"
    "1.000000 1.000000 1.000000 Ni\n"
    "end\n"
    "\n"
    "3.5000 3.5000 0\n"
    "3.5000 0 3.5000\n"
    "0 3.5000 3.5000\n"
    "1. 0. 0.\n"
    "0. 1. 0.\n"
    "0. 0. 1\n"
    "0. 0. 0. Al\n"
    "0.5 0.5 0.5 Ni\n"
    "end\n"
    "\n"
    "3.500000 0.000000 0.000000\n"
    "0.000000 3.500000 0.000000\n"
    "0.000000 0.000000 3.500000\n"
    "1. 0 0\n"
    "0 1. 0\n"
    "0 0 1.\n"
    "1.000000 1.000000 1.000000 Al\n"
    "end\n";

inline const char* kCbEciOut = "0.\n0.\n1\n-0.2\n";

inline const char* kCbClustersOut =
    "1\n"
    "0.000000\n"
    "0\n"
    "\n"
    "1\n"
    "0.000000\n"
    "1\n"
    "1.000000 1.000000 1.000000\n"
    "\n"
    "3\n"
    "3.5\n"
    "2\n"
    "1.000000 1.000000 1.000000\n"
    "1.000 1.0000 0.0000\n"
    "\n"
    "3\n"
    "7.00000\n"
    "2\n"
    "1.00000 1.00000 1.00000\n"
    "1.00000 1.00000 -1.00000\n";

// The separating simple-cubic model (NN ECI -1): E/atom = -3 in the pure
// phases, hull slope mu = 0.
inline cepd::System sc_system() {
  return cepd::System::from_parts(cepd::parse_lattice(kScLatIn),
                                  cepd::parse_clusters(kScClustersOut),
                                  cepd::parse_eci(kScEciOut), std::nullopt,
                                  cepd::parse_structures(kScGsStrOut));
}

// The checkerboard model (NN +1, second-axis-neighbour -0.2): pure phases at
// 2.4, NaCl at -3.6, hull slopes -6 and +6.
inline cepd::System cb_system() {
  return cepd::System::from_parts(cepd::parse_lattice(kScLatIn),
                                  cepd::parse_clusters(kCbClustersOut),
                                  cepd::parse_eci(kCbEciOut), std::nullopt,
                                  cepd::parse_structures(kCbGsStrOut));
}

}  // namespace fixtures

#endif
