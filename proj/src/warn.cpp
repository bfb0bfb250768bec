#include "cepd/warn.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace cepd {

namespace {
std::mutex g_mutex;
WarnSink g_sink;
}  // namespace

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_sink)
    g_sink(message);
  else
    std::cerr << "WARNING: " << message << "\n";
}

WarnSink set_warn_sink(WarnSink sink) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::swap(g_sink, sink);
  return sink;
}

}  // namespace cepd
