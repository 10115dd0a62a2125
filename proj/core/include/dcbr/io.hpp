#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dcbr/simulator.hpp"
#include "dcbr/types.hpp"

namespace dcbr::io {

/// Full-precision decimal rendering (17 significant digits), round-trip
/// safe for doubles.
std::string format_double(double v);

std::uint64_t fnv1a(const void* data, std::size_t size);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string format_checksum(std::uint64_t h);

/// Sample CSV schema: header `p1,p2,t,u`, one sample per row.
void write_snapshot_csv(const Snapshot& snap,
                        const std::filesystem::path& path);
Snapshot read_snapshot_csv(const std::filesystem::path& path,
                           int time_index = -1);

/// Persists snapshots as snapshot_###.csv files plus a manifest.json
/// carrying the supplied config block and per-file checksums.
void write_snapshot_dir(const std::vector<Snapshot>& snapshots,
                        const std::filesystem::path& dir,
                        const nlohmann::json& config, const std::string& kind);

struct SnapshotDir {
  std::vector<Snapshot> snapshots;
  nlohmann::json config;
  std::string kind;
};

SnapshotDir read_snapshot_dir(const std::filesystem::path& dir);

}  // namespace dcbr::io
