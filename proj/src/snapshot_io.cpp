#include "regwatch/snapshot_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "regwatch/grid.hpp"

namespace regwatch {

namespace {

void store_u64le(std::uint64_t v, unsigned char* out) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint64_t load_u64le(const unsigned char* in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(in[i]) << (8 * i);
    return v;
}

void store_doubles_le(const double* src, std::size_t count, std::vector<unsigned char>& buf) {
    buf.resize(count * 8);
    for (std::size_t i = 0; i < count; ++i)
        store_u64le(std::bit_cast<std::uint64_t>(src[i]), buf.data() + 8 * i);
}

void load_doubles_le(const std::vector<unsigned char>& buf, double* dst, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
        dst[i] = std::bit_cast<double>(load_u64le(buf.data() + 8 * i));
}

} // namespace

void write_snapshot(const std::filesystem::path& path, double time, const VectorField& v) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");

    const int n = v.grid().n();
    out.write("RGW1", 4);
    unsigned char header[12];
    for (int i = 0; i < 4; ++i) header[i] = static_cast<unsigned char>(std::uint32_t(n) >> (8 * i));
    store_u64le(std::bit_cast<std::uint64_t>(time), header + 4);
    out.write(reinterpret_cast<const char*>(header), sizeof(header));

    std::vector<unsigned char> buf;
    for (int c = 0; c < 3; ++c) {
        const auto phys = v[c].physical();
        store_doubles_le(phys.data(), phys.size(), buf);
        out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    }
    if (!out) throw IoError("failed writing snapshot '" + path.string() + "'");
}

LoadedSnapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot '" + path.string() + "'");

    char magic[4];
    unsigned char header[12];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || std::memcmp(magic, "RGW1", 4) != 0)
        throw IoError("'" + path.string() + "' is not a snapshot file");

    std::uint32_t un = 0;
    for (int i = 0; i < 4; ++i) un |= std::uint32_t(header[i]) << (8 * i);
    const int n = static_cast<int>(un);
    if (n < 8 || n > 4096 || n % 2 != 0)
        throw IoError("'" + path.string() + "': implausible grid size " + std::to_string(n));

    LoadedSnapshot snap{std::bit_cast<double>(load_u64le(header + 4)), VectorField(SpectralGrid(n))};
    const std::size_t count = snap.velocity.grid().physical_size();
    std::vector<unsigned char> buf(count * 8);
    for (int c = 0; c < 3; ++c) {
        in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
        if (!in || std::size_t(in.gcount()) != buf.size())
            throw IoError("'" + path.string() + "' is truncated");
        load_doubles_le(buf, snap.velocity[c].physical_mut().data(), count);
    }
    in.peek();
    if (!in.eof()) throw IoError("'" + path.string() + "' has trailing bytes");
    return snap;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for checksumming");
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

void write_manifest(const std::filesystem::path& directory,
                    const std::vector<std::string>& names) {
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());

    std::ostringstream out;
    char hex[17];
    for (const std::string& name : sorted) {
        const std::filesystem::path p = directory / name;
        const std::uint64_t sum = fnv1a64_file(p);
        const std::uint64_t size = std::uint64_t(std::filesystem::file_size(p));
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(sum));
        out << hex << " " << size << " " << name << "\n";
    }
    std::ofstream f(directory / "manifest.txt", std::ios::trunc);
    if (!f) throw IoError("cannot write manifest in '" + directory.string() + "'");
    f << out.str();
    if (!f) throw IoError("failed writing manifest in '" + directory.string() + "'");
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& directory) {
    std::ifstream in(directory / "manifest.txt");
    if (!in) throw IoError("no manifest.txt in '" + directory.string() + "'");
    std::vector<ManifestEntry> entries;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string hex, name;
        std::uint64_t size = 0;
        if (!(ss >> hex >> size >> name) || hex.size() != 16)
            throw IoError("manifest line " + std::to_string(number) + " is malformed");
        ManifestEntry e;
        e.name = name;
        e.size = size;
        e.checksum = std::stoull(hex, nullptr, 16);
        entries.push_back(e);
    }
    return entries;
}

void check_manifest(const std::filesystem::path& directory) {
    for (const ManifestEntry& e : read_manifest(directory)) {
        const std::filesystem::path p = directory / e.name;
        if (!std::filesystem::exists(p))
            throw IoError("manifest names missing file '" + e.name + "'");
        if (std::uint64_t(std::filesystem::file_size(p)) != e.size)
            throw IoError("'" + e.name + "' changed size since the manifest was written");
        if (fnv1a64_file(p) != e.checksum)
            throw IoError("'" + e.name + "' fails its manifest checksum");
    }
}

DirectoryLock::DirectoryLock(const std::filesystem::path& directory)
    : path_(directory / ".regwatch.lock") {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw IoError("output directory '" + directory.string() +
                      "' is locked by another writer (remove " + path_.string() +
                      " if that writer is gone)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const ssize_t written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

} // namespace regwatch
