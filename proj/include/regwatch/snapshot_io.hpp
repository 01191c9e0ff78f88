#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "regwatch/field.hpp"

namespace regwatch {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Snapshot file: "RGW1", n as little-endian int32, time as little-endian
// float64, then the three velocity components as n^3 little-endian float64
// each, x-fastest. No padding, no trailing bytes.
void write_snapshot(const std::filesystem::path& path, double time, const VectorField& v);

struct LoadedSnapshot {
    double time = 0.0;
    VectorField velocity;
};

LoadedSnapshot read_snapshot(const std::filesystem::path& path);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// manifest.txt: one "<16-hex fnv1a64> <size> <name>" line per artifact,
// sorted by name so identical outputs give identical manifests.
struct ManifestEntry {
    std::string name;
    std::uint64_t size = 0;
    std::uint64_t checksum = 0;
};

void write_manifest(const std::filesystem::path& directory,
                    const std::vector<std::string>& names);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& directory);
// Recompute every listed checksum; any missing, resized, or altered file throws.
void check_manifest(const std::filesystem::path& directory);

// Exclusive writer lock on an output directory, released on destruction.
class DirectoryLock {
  public:
    explicit DirectoryLock(const std::filesystem::path& directory);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

  private:
    std::filesystem::path path_;
};

} // namespace regwatch
