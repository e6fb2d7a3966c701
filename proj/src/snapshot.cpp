#include "nsch/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nsch {

namespace {

static_assert(sizeof(double) == 8);

void write_le(std::ostream& os, std::span<const double> values) {
    for (double v : values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
        os.write(bytes, 8);
    }
}

void read_le(std::istream& is, std::span<double> values) {
    for (double& v : values) {
        unsigned char bytes[8];
        if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw SnapshotError("snapshot payload truncated");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        v = std::bit_cast<double>(bits);
    }
}

void write_header(std::ostream& os, const char* kind, const std::string& name, const GridSpec& g, double t) {
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
        throw SnapshotError("snapshot name must be a non-empty token: '" + name + "'");
    char buf[256];
    std::snprintf(buf, sizeof buf, " %d %d %.17g %.17g %.17g\n", g.nx, g.ny, g.lx, g.ly, t);
    os << kind << " 1 " << name << buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw SnapshotError("cannot open " + path.string() + " for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SnapshotError("cannot open " + path.string());
    return is;
}

}  // namespace

void write_snapshot(std::ostream& os, const std::string& name, const ScalarField& f, double time) {
    write_header(os, "NSCHF", name, f.grid(), time);
    write_le(os, f.values());
}

void write_snapshot(std::ostream& os, const std::string& name, const FaceField& f, double time) {
    write_header(os, "NSCHV", name, f.grid(), time);
    write_le(os, f.xs());
    write_le(os, f.ys());
}

void write_snapshot(const std::filesystem::path& path, const std::string& name, const ScalarField& f,
                    double time) {
    auto os = open_out(path);
    write_snapshot(os, name, f, time);
}

void write_snapshot(const std::filesystem::path& path, const std::string& name, const FaceField& f,
                    double time) {
    auto os = open_out(path);
    write_snapshot(os, name, f, time);
}

SnapshotHeader read_snapshot_header(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw SnapshotError("missing snapshot header");
    std::istringstream ss(line);
    SnapshotHeader h;
    int version = 0;
    if (!(ss >> h.kind >> version >> h.name >> h.grid.nx >> h.grid.ny >> h.grid.lx >> h.grid.ly >> h.time))
        throw SnapshotError("malformed snapshot header: '" + line + "'");
    if (h.kind != "NSCHF" && h.kind != "NSCHV") throw SnapshotError("unknown snapshot kind " + h.kind);
    if (version != 1) throw SnapshotError("unsupported snapshot version " + std::to_string(version));
    try {
        h.grid.validate();
    } catch (const GridError& e) {
        throw SnapshotError(std::string("snapshot header: ") + e.what());
    }
    return h;
}

ScalarField read_scalar_snapshot(std::istream& is, SnapshotHeader* header) {
    SnapshotHeader h = read_snapshot_header(is);
    if (h.kind != "NSCHF") throw SnapshotError("expected a cell-field snapshot, found " + h.kind);
    ScalarField f(h.grid);
    read_le(is, f.values());
    if (header) *header = h;
    return f;
}

FaceField read_face_snapshot(std::istream& is, SnapshotHeader* header) {
    SnapshotHeader h = read_snapshot_header(is);
    if (h.kind != "NSCHV") throw SnapshotError("expected a face-field snapshot, found " + h.kind);
    FaceField f(h.grid);
    read_le(is, f.xs());
    read_le(is, f.ys());
    if (header) *header = h;
    return f;
}

ScalarField read_scalar_snapshot(const std::filesystem::path& path, SnapshotHeader* header) {
    auto is = open_in(path);
    return read_scalar_snapshot(is, header);
}

FaceField read_face_snapshot(const std::filesystem::path& path, SnapshotHeader* header) {
    auto is = open_in(path);
    return read_face_snapshot(is, header);
}

}  // namespace nsch
