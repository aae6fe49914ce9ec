#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "lamekit/field.hpp"
#include "lamekit/trajectory.hpp"

// Snapshot files: one UTF-8 header line of space-separated key=value pairs,
// then the raw payload as little-endian float64, axis 1 fastest, components
// concatenated. Example header:
//
//   lamekit-snapshot version=1 kind=vector dim=3 components=3 n1=16 n2=16 n3=16
//   d1=0.0625 ... o1=0 ... boundary=periodic t=0.125 dt=0.0078125 step=16
//
// (on a single line). Doubles use the shortest representation that reads back
// to the same value, so headers and payloads both round-trip bit-exactly.

namespace lamekit {

inline constexpr const char* kSnapshotMagic = "lamekit-snapshot";
inline constexpr int kSnapshotVersion = 1;

struct SnapshotHeader {
    int version = kSnapshotVersion;
    std::string kind;  // "scalar" or "vector"
    int dim = 3;
    int components = 1;
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> d{1.0, 1.0, 1.0};
    std::array<double, 3> origin{};
    Boundary boundary = Boundary::Periodic;
    double t = 0.0;
    double dt = 0.0;
    long step = 0;

    std::size_t points() const {
        std::size_t p = 1;
        for (int a = 0; a < dim; ++a) p *= static_cast<std::size_t>(n[a]);
        return p;
    }

    template <std::size_t Dim>
    Grid<Dim> grid() const {
        if (dim != static_cast<int>(Dim))
            throw IoError("snapshot holds a " + std::to_string(dim) + "D field, expected " + std::to_string(Dim) + "D");
        typename Grid<Dim>::Index nn{};
        typename Grid<Dim>::Point dd{}, oo{};
        for (std::size_t a = 0; a < Dim; ++a) nn[a] = n[a], dd[a] = d[a], oo[a] = origin[a];
        return Grid<Dim>(nn, dd, boundary, oo);
    }
};

/// Time metadata stored with a snapshot.
struct SnapshotTime {
    double t = 0.0;
    double dt = 0.0;
    long step = 0;
};

/// Shortest round-trip decimal form of a double.
inline std::string to_exact_string(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_exact_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError("cannot parse " + what + " value '" + s + "' as a number");
    return v;
}

namespace detail {
inline long parse_integer(const std::string& s, const std::string& what) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError("cannot parse " + what + " value '" + s + "' as an integer");
    return v;
}

inline std::string encode_header(const SnapshotHeader& h) {
    std::ostringstream os;
    os << kSnapshotMagic << " version=" << h.version << " kind=" << h.kind << " dim=" << h.dim
       << " components=" << h.components;
    for (int a = 0; a < h.dim; ++a) os << " n" << a + 1 << '=' << h.n[a];
    for (int a = 0; a < h.dim; ++a) os << " d" << a + 1 << '=' << to_exact_string(h.d[a]);
    for (int a = 0; a < h.dim; ++a) os << " o" << a + 1 << '=' << to_exact_string(h.origin[a]);
    os << " boundary=" << to_string(h.boundary) << " t=" << to_exact_string(h.t) << " dt=" << to_exact_string(h.dt)
       << " step=" << h.step << '\n';
    return os.str();
}

inline SnapshotHeader decode_header(const std::string& line, const std::string& source) {
    std::istringstream is(line);
    std::string magic;
    is >> magic;
    if (magic != kSnapshotMagic) throw IoError(source + ": not a snapshot file (bad magic)");
    std::map<std::string, std::string> kv;
    for (std::string tok; is >> tok;) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) throw IoError(source + ": malformed header entry '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw IoError(source + ": header is missing key '" + key + "'");
        return it->second;
    };
    SnapshotHeader h;
    h.version = static_cast<int>(parse_integer(need("version"), source + " version"));
    if (h.version != kSnapshotVersion)
        throw IoError(source + ": unsupported snapshot version " + std::to_string(h.version));
    h.kind = need("kind");
    if (h.kind != "scalar" && h.kind != "vector") throw IoError(source + ": unknown field kind '" + h.kind + "'");
    h.dim = static_cast<int>(parse_integer(need("dim"), source + " dim"));
    if (h.dim < 1 || h.dim > 3) throw IoError(source + ": dim must be 1, 2 or 3");
    h.components = static_cast<int>(parse_integer(need("components"), source + " components"));
    if (h.components < 1 || (h.kind == "scalar" && h.components != 1))
        throw IoError(source + ": invalid component count " + std::to_string(h.components));
    for (int a = 0; a < h.dim; ++a) {
        const std::string ax = std::to_string(a + 1);
        const long n = parse_integer(need("n" + ax), source + " n" + ax);
        if (n < 1 || n > (1L << 30)) throw IoError(source + ": implausible point count n" + ax);
        h.n[a] = static_cast<int>(n);
        h.d[a] = parse_exact_double(need("d" + ax), source + " d" + ax);
        h.origin[a] = parse_exact_double(need("o" + ax), source + " o" + ax);
    }
    try {
        h.boundary = boundary_from_string(need("boundary"));
    } catch (const InputError& e) {
        throw IoError(source + ": " + e.what());
    }
    h.t = parse_exact_double(need("t"), source + " t");
    h.dt = parse_exact_double(need("dt"), source + " dt");
    h.step = parse_integer(need("step"), source + " step");
    return h;
}

inline void append_le(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

inline double read_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

template <std::size_t Dim>
SnapshotHeader header_for(const Grid<Dim>& g, const std::string& kind, int components, const SnapshotTime& time) {
    SnapshotHeader h;
    h.kind = kind;
    h.dim = static_cast<int>(Dim);
    h.components = components;
    for (std::size_t a = 0; a < Dim; ++a) h.n[a] = g.n(a), h.d[a] = g.d(a), h.origin[a] = g.origin()[a];
    h.boundary = g.boundary();
    h.t = time.t;
    h.dt = time.dt;
    h.step = time.step;
    return h;
}

/// Writes to a sibling temporary file and renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.flush();
        if (!os) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " to " + path.string());
    }
}

struct RawSnapshot {
    SnapshotHeader header;
    std::vector<double> values;
};

inline RawSnapshot read_raw(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw IoError(path.string() + ": empty file");
    RawSnapshot r{decode_header(line, path.string()), {}};
    const std::size_t count = r.header.points() * static_cast<std::size_t>(r.header.components);
    std::vector<unsigned char> bytes(count * 8);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(is.gcount()) != bytes.size())
        throw IoError(path.string() + ": payload shorter than the header promises (" + std::to_string(count) +
                      " values)");
    if (is.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes after payload");
    r.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) r.values[i] = read_le(bytes.data() + 8 * i);
    return r;
}
} // namespace detail

template <std::size_t Dim>
void write_snapshot(const std::filesystem::path& path, const ScalarField<Dim>& f, const SnapshotTime& time = {}) {
    std::string bytes = detail::encode_header(detail::header_for(f.grid(), "scalar", 1, time));
    bytes.reserve(bytes.size() + 8 * f.grid().size());
    for (double v : f.values()) detail::append_le(bytes, v);
    detail::write_atomically(path, bytes);
}

template <std::size_t Dim, std::size_t Comp>
void write_snapshot(const std::filesystem::path& path, const VectorField<Dim, Comp>& v,
                    const SnapshotTime& time = {}) {
    std::string bytes =
        detail::encode_header(detail::header_for(v.grid(), "vector", static_cast<int>(Comp), time));
    bytes.reserve(bytes.size() + 8 * Comp * v.grid().size());
    for (std::size_t c = 0; c < Comp; ++c)
        for (double x : v[c].values()) detail::append_le(bytes, x);
    detail::write_atomically(path, bytes);
}

inline SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw IoError(path.string() + ": empty file");
    return detail::decode_header(line, path.string());
}

template <std::size_t Dim>
ScalarField<Dim> read_scalar_snapshot(const std::filesystem::path& path, SnapshotHeader* header = nullptr) {
    auto raw = detail::read_raw(path);
    if (raw.header.kind != "scalar") throw IoError(path.string() + ": expected a scalar snapshot");
    ScalarField<Dim> f(raw.header.template grid<Dim>(), std::move(raw.values));
    if (header) *header = raw.header;
    return f;
}

template <std::size_t Dim, std::size_t Comp = Dim>
VectorField<Dim, Comp> read_vector_snapshot(const std::filesystem::path& path, SnapshotHeader* header = nullptr) {
    auto raw = detail::read_raw(path);
    if (raw.header.kind != "vector" || raw.header.components != static_cast<int>(Comp))
        throw IoError(path.string() + ": expected a vector snapshot with " + std::to_string(Comp) + " components");
    const auto g = raw.header.template grid<Dim>();
    VectorField<Dim, Comp> v(g);
    const std::size_t N = g.size();
    for (std::size_t c = 0; c < Comp; ++c)
        for (std::size_t i = 0; i < N; ++i) v[c][i] = raw.values[c * N + i];
    if (header) *header = raw.header;
    return v;
}

/// File name of snapshot `index` in a trajectory directory: prefix_000012.snap.
inline std::string snapshot_file_name(const std::string& prefix, std::size_t index) {
    std::string num = std::to_string(index);
    if (num.size() < 6) num.insert(0, 6 - num.size(), '0');
    return prefix + "_" + num + ".snap";
}

/// Snapshot files `prefix_NNNNNN.snap` in `dir`, in index order.
inline std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir, const std::string& prefix) {
    if (!std::filesystem::is_directory(dir)) throw IoError("trajectory directory " + dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() == prefix.size() + 12 && name.rfind(prefix + "_", 0) == 0 &&
            name.substr(name.size() - 5) == ".snap" &&
            std::all_of(name.begin() + prefix.size() + 1, name.end() - 5, [](char c) { return c >= '0' && c <= '9'; }))
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

/// Writes every snapshot of a trajectory; step numbers are index * step_stride.
template <class Field>
std::vector<std::filesystem::path> write_trajectory(const std::filesystem::path& dir, const std::string& prefix,
                                                    const Trajectory<Field>& tr, long step_stride = 1) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const auto path = dir / snapshot_file_name(prefix, i);
        write_snapshot(path, tr[i], SnapshotTime{tr.time(i), tr.dt(), static_cast<long>(i) * step_stride});
        out.push_back(path);
    }
    return out;
}

namespace detail {
template <class Field, class ReadFn>
Trajectory<Field> read_trajectory_with(const std::filesystem::path& dir, const std::string& prefix, ReadFn&& read) {
    const auto files = list_snapshots(dir, prefix);
    if (files.empty()) throw IoError("no " + prefix + "_*.snap files in " + dir.string());
    SnapshotHeader h0;
    Field first = read(files[0], &h0);
    if (files.size() > 1 && !(h0.dt > 0.0)) throw IoError(files[0].string() + ": trajectory time step must be positive");
    Trajectory<Field> tr(h0.t, files.size() > 1 ? h0.dt : (h0.dt > 0.0 ? h0.dt : 1.0));
    tr.push_back(std::move(first));
    for (std::size_t i = 1; i < files.size(); ++i) {
        SnapshotHeader h;
        Field f = read(files[i], &h);
        if (h.dt != h0.dt) throw IoError(files[i].string() + ": time step differs from " + files[0].string());
        const double expect = h0.t + static_cast<double>(i) * h0.dt;
        if (std::abs(h.t - expect) > 1e-9 * (std::abs(expect) + h0.dt))
            throw IoError(files[i].string() + ": time " + to_exact_string(h.t) + " breaks the uniform spacing (expected " +
                          to_exact_string(expect) + ")");
        try {
            tr.push_back(std::move(f));
        } catch (const InputError&) {
            throw IoError(files[i].string() + ": grid differs from " + files[0].string());
        }
    }
    return tr;
}
} // namespace detail

inline VectorTrajectory read_vector_trajectory(const std::filesystem::path& dir, const std::string& prefix) {
    return detail::read_trajectory_with<VectorField3>(
        dir, prefix, [](const std::filesystem::path& p, SnapshotHeader* h) { return read_vector_snapshot<3>(p, h); });
}

inline ScalarTrajectory<3> read_scalar_trajectory(const std::filesystem::path& dir, const std::string& prefix) {
    return detail::read_trajectory_with<ScalarField3>(
        dir, prefix, [](const std::filesystem::path& p, SnapshotHeader* h) { return read_scalar_snapshot<3>(p, h); });
}

} // namespace lamekit
