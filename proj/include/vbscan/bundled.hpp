#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "vbscan/error.hpp"

#ifndef VBSCAN_PROGRAM_DIR
#define VBSCAN_PROGRAM_DIR "programs"
#endif

namespace vbscan {

/// Directory holding the bundled programs; VBSCAN_PROGRAM_DIR in the
/// environment overrides the build-time location.
inline std::filesystem::path program_dir() {
  if (const char* env = std::getenv("VBSCAN_PROGRAM_DIR"); env != nullptr && *env != '\0') return env;
  return VBSCAN_PROGRAM_DIR;
}

/// Accepts a path to an existing file, or a bundled name with or without
/// its extension ("ctu_defaults", "ctu.csv").
inline std::filesystem::path resolve_bundled(const std::string& name_or_path, const std::string& extension) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return name_or_path;
  fs::path p = program_dir() / name_or_path;
  if (fs::is_regular_file(p)) return p;
  p += extension;
  if (fs::is_regular_file(p)) return p;
  throw Error(ErrorCode::Config, "no such file or bundled name: " + name_or_path);
}

inline std::filesystem::path resolve_program(const std::string& name_or_path) {
  return resolve_bundled(name_or_path, ".plc");
}

}  // namespace vbscan
