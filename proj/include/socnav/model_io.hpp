#pragma once

#include <string>

#include "socnav/ensemble.hpp"

namespace socnav {

/// Writes the ensemble (architecture, per-member seeds and parameters,
/// training metadata) as a self-describing JSON document tagged
/// "socnav-ensemble-v1". Doubles round-trip exactly.
void save_ensemble(const Ensemble& ensemble, const std::string& path);

/// Loads and validates a model file; throws std::runtime_error on a
/// missing file, a wrong format tag, or parameter vectors that do not
/// match the declared architecture.
Ensemble load_ensemble(const std::string& path);

/// FNV-1a hash of a file's bytes, hex-encoded; used to stamp traces with
/// the model they were produced from.
std::string file_digest(const std::string& path);

}  // namespace socnav
