#ifndef CEPD_WARN_HPP
#define CEPD_WARN_HPP

#include <functional>
#include <string>

namespace cepd {

// Non-fatal diagnostics (multiplicity mismatches, clamped interpolation, ...).
// Default sink prints "WARNING: ..." to stderr; tests may install their own.
using WarnSink = std::function<void(const std::string&)>;

void warn(const std::string& message);
WarnSink set_warn_sink(WarnSink sink);  // returns the previous sink

}  // namespace cepd

#endif
