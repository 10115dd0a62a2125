#include "dcbr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dcbr::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  return fnv1a(data.data(), data.size());
}

std::string format_checksum(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_snapshot_csv(const Snapshot& snap,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "p1,p2,t,u\n";
  for (const Sample& s : snap.samples)
    out << format_double(s.point.p1) << ',' << format_double(s.point.p2)
        << ',' << format_double(s.point.t) << ',' << format_double(s.u)
        << '\n';
}

Snapshot read_snapshot_csv(const std::filesystem::path& path,
                           int time_index) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("p1,p2,t,u", 0) != 0)
    throw std::runtime_error("bad snapshot CSV header in " + path.string());

  Snapshot snap;
  snap.time_index = time_index;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Sample s;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &s.point.p1, &s.point.p2,
                    &s.point.t, &s.u) != 4)
      throw std::runtime_error("bad snapshot CSV row in " + path.string());
    snap.samples.push_back(s);
  }
  if (!snap.samples.empty()) snap.time = snap.samples.front().point.t;
  return snap;
}

void write_snapshot_dir(const std::vector<Snapshot>& snapshots,
                        const std::filesystem::path& dir,
                        const nlohmann::json& config,
                        const std::string& kind) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["kind"] = kind;
  manifest["config"] = config;
  manifest["snapshots"] = nlohmann::json::array();
  char name[32];
  for (const Snapshot& snap : snapshots) {
    std::snprintf(name, sizeof(name), "snapshot_%03d.csv", snap.time_index);
    const std::filesystem::path file = dir / name;
    write_snapshot_csv(snap, file);
    manifest["snapshots"].push_back(
        {{"file", name},
         {"k", snap.time_index},
         {"t", snap.time},
         {"checksum", format_checksum(fnv1a_file(file))}});
  }
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

SnapshotDir read_snapshot_dir(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in)
    throw std::runtime_error("missing manifest.json in " + dir.string());
  nlohmann::json manifest = nlohmann::json::parse(in);

  SnapshotDir out;
  out.config = manifest.value("config", nlohmann::json::object());
  out.kind = manifest.value("kind", "");
  for (const auto& entry : manifest.at("snapshots")) {
    const std::filesystem::path file = dir / entry.at("file").get<std::string>();
    const std::string expected = entry.at("checksum").get<std::string>();
    if (format_checksum(fnv1a_file(file)) != expected)
      throw std::runtime_error("checksum mismatch for " + file.string());
    Snapshot snap = read_snapshot_csv(file, entry.at("k").get<int>());
    snap.time = entry.at("t").get<double>();
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

}  // namespace dcbr::io
