#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "nsch/grid.hpp"

namespace nsch {

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Snapshot header: `NSCHF 1 <name> <nx> <ny> <lx> <ly> <time>` (cell fields)
/// or `NSCHV 1 ...` (face fields), then little-endian float64 payload.
struct SnapshotHeader {
    std::string kind;  // "NSCHF" or "NSCHV"
    std::string name;
    GridSpec grid;
    double time = 0.0;
};

void write_snapshot(std::ostream& os, const std::string& name, const ScalarField& f, double time);
void write_snapshot(std::ostream& os, const std::string& name, const FaceField& f, double time);
void write_snapshot(const std::filesystem::path& path, const std::string& name, const ScalarField& f,
                    double time);
void write_snapshot(const std::filesystem::path& path, const std::string& name, const FaceField& f,
                    double time);

SnapshotHeader read_snapshot_header(std::istream& is);
ScalarField read_scalar_snapshot(std::istream& is, SnapshotHeader* header = nullptr);
FaceField read_face_snapshot(std::istream& is, SnapshotHeader* header = nullptr);
ScalarField read_scalar_snapshot(const std::filesystem::path& path, SnapshotHeader* header = nullptr);
FaceField read_face_snapshot(const std::filesystem::path& path, SnapshotHeader* header = nullptr);

}  // namespace nsch
