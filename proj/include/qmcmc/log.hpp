#pragma once

#include <cstdlib>
#include <functional>
#include <iostream>
#include <mutex>
#include <string>

namespace qmcmc {

/// Diagnostic notes. Silent unless QMCMC_VERBOSE is set or a sink is installed.
using NoteSink = std::function<void(const std::string&)>;

namespace detail {
inline NoteSink& note_sink() {
  static NoteSink sink = [] {
    const char* v = std::getenv("QMCMC_VERBOSE");
    if (v && *v && std::string(v) != "0")
      return NoteSink([](const std::string& m) { std::cerr << "note: " << m << '\n'; });
    return NoteSink{};
  }();
  return sink;
}
inline std::mutex& note_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

inline void set_note_sink(NoteSink sink) {
  std::lock_guard<std::mutex> lock(detail::note_mutex());
  detail::note_sink() = std::move(sink);
}

inline void note(const std::string& message) {
  std::lock_guard<std::mutex> lock(detail::note_mutex());
  if (auto& s = detail::note_sink()) s(message);
}

}  // namespace qmcmc
