#pragma once
// JSON run configuration for the command-line tool and the Python bindings.
//
// Precedence: built-in defaults < config file < command-line flags. Unknown keys
// and type mismatches are rejected with the line of the offending key.

#include <cstdint>
#include <filesystem>
#include <string>

#include "gekf/bench.hpp"

namespace gekf {

struct CliConfig {
  bench::BenchConfig bench;
  std::filesystem::path output_dir = "gekf_out";
  bool write_errors = true;

  void validate() const;
};

/// Parses JSON text over the defaults. Throws ConfigError carrying the line of the problem.
CliConfig parse_config(const std::string& text);
CliConfig load_config(const std::filesystem::path& file);

/// Canonical JSON (sorted keys, round-trip precision); to_json(parse_config(to_json(c))) == to_json(c).
std::string to_json(const CliConfig& c);

/// 64-bit FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_hash(const CliConfig& c);

/// manifest.json content: tool version, seed, config hash and the full resolved config.
std::string manifest_json(const CliConfig& c);

}  // namespace gekf
