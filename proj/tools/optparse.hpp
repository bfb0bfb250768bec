#ifndef CEPD_TOOLS_OPTPARSE_HPP
#define CEPD_TOOLS_OPTPARSE_HPP

// ATAT-style flag parsing: accepts -name=value, --name=value, -name value
// and bare boolean switches (-dn, -keV, -g2c).

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace cepd::tools {

class Options {
 public:
  static Options parse(int argc, char** argv, const std::set<std::string>& bool_flags,
                       const std::set<std::string>& known) {
    Options o;
    for (int i = 1; i < argc; ++i) {
      std::string tok = argv[i];
      if (tok.size() < 2 || tok[0] != '-')
        throw std::runtime_error("unexpected argument '" + tok + "'");
      std::size_t start = tok[1] == '-' ? 2 : 1;
      std::string body = tok.substr(start);
      const std::size_t eq = body.find('=');
      std::string name = eq == std::string::npos ? body : body.substr(0, eq);
      if (!known.count(name)) throw std::runtime_error("unknown option '-" + name + "'");
      if (eq != std::string::npos) {
        o.values_[name] = body.substr(eq + 1);
      } else if (bool_flags.count(name)) {
        o.values_[name] = "1";
      } else {
        if (i + 1 >= argc) throw std::runtime_error("option '-" + name + "' needs a value");
        o.values_[name] = argv[++i];
      }
    }
    return o;
  }

  bool has(const std::string& name) const { return values_.count(name) != 0; }

  std::string str(const std::string& name, const std::string& fallback = "") const {
    const auto it = values_.find(name);
    return it == values_.end() ? fallback : it->second;
  }

  double num(const std::string& name, double fallback) const {
    const auto it = values_.find(name);
    if (it == values_.end()) return fallback;
    return parse_num(name, it->second);
  }

  std::optional<double> num_opt(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) return std::nullopt;
    return parse_num(name, it->second);
  }

  long long integer(const std::string& name, long long fallback) const {
    return static_cast<long long>(num(name, double(fallback)));
  }

 private:
  static double parse_num(const std::string& name, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::runtime_error("");
      return d;
    } catch (...) {
      throw std::runtime_error("option '-" + name + "' has a non-numeric value '" + v + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace cepd::tools

#endif
