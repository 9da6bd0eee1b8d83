#pragma once

#include <map>
#include <string>

#include "nclb/core/errors.hpp"

namespace nclb {

enum class Provenance { configured, measured, derived };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::configured: return "configured";
    case Provenance::measured: return "empirically-measured";
    case Provenance::derived: return "derived";
  }
  return "?";
}

/// Named positive constants that the analysis leaves implicit.
///
///   Lambda    bound coefficient of |Q_s(f,g)| <= Lambda <v>^(gamma+2s)_+ |g|^(1-s) |D^2 g|^s
///   C1        same bound specialised to the velocity cutoff of the spreading barrier
///   C_push    time-smallness coefficient of the transport barrier
///   c_spread  gain coefficient of the spreading iteration
///   alpha     amplitude factor of the spreading barrier
///   C_cancel  constant of the cancellation lemma
class ConstantsRegistry {
 public:
  struct Entry {
    double value = 0.0;
    Provenance provenance = Provenance::configured;
  };

  void set(const std::string& name, double value, Provenance p = Provenance::configured) {
    require(value > 0.0, "ConstantsRegistry: entry '" + name + "' must be strictly positive");
    entries_[name] = Entry{value, p};
  }

  bool has(const std::string& name) const { return entries_.count(name) != 0; }

  double get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("ConstantsRegistry: missing entry '" + name + "'");
    return it->second.value;
  }

  Provenance provenance(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("ConstantsRegistry: missing entry '" + name + "'");
    return it->second.provenance;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace nclb
