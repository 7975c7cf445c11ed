#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "geoctx/config.hpp"
#include "geoctx/ragctx.hpp"

namespace geoctx {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Gazetteer copy written next to a store by `ingest`, read back by `query`.
std::string gazetteer_sidecar_path(const std::string& store_path);

/// Loads a store plus its gazetteer (explicit path, else the sidecar, else empty).
Engine load_engine(const std::string& store_path, const std::optional<std::string>& gazetteer_path,
                   const EngineConfig& cfg);

/// Entry point of the `gce` tool. Primary output goes to `out`; diagnostics
/// and "error_code=NAME message" lines go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoctx
