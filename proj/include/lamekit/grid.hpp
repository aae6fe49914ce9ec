#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "lamekit/error.hpp"

namespace lamekit {

enum class Boundary { Periodic, Dirichlet };

inline std::string_view to_string(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "dirichlet";
}

inline Boundary boundary_from_string(std::string_view s) {
    if (s == "periodic") return Boundary::Periodic;
    if (s == "dirichlet") return Boundary::Dirichlet;
    throw InputError("unknown boundary kind '" + std::string(s) + "' (expected periodic|dirichlet)");
}

/// Uniform collocated Cartesian grid in Dim dimensions.
///
/// Point i along axis a sits at origin[a] + i*d[a]. Values are stored with
/// axis 0 varying fastest. On a periodic grid the period along axis a is
/// n[a]*d[a]; on a Dirichlet grid the first and last points of every axis
/// are boundary points and the box spans (n[a]-1)*d[a].
template <std::size_t Dim>
class Grid {
public:
    static constexpr std::size_t dim = Dim;
    using Index = std::array<int, Dim>;
    using Point = std::array<double, Dim>;

    Grid(Index n, Point d, Boundary boundary = Boundary::Periodic, Point origin = {})
        : n_(n), d_(d), origin_(origin), boundary_(boundary) {
        for (std::size_t a = 0; a < Dim; ++a) {
            if (n_[a] < 4)
                throw InputError("grid axis " + std::to_string(a + 1) + " has " +
                                 std::to_string(n_[a]) + " points; at least 4 are required");
            if (!(d_[a] > 0.0) || !std::isfinite(d_[a]))
                throw InputError("grid spacing along axis " + std::to_string(a + 1) +
                                 " must be positive and finite");
            if (!std::isfinite(origin_[a]))
                throw InputError("grid origin must be finite");
        }
    }

    const Index& n() const { return n_; }
    const Point& d() const { return d_; }
    const Point& origin() const { return origin_; }
    int n(std::size_t a) const { return n_[a]; }
    double d(std::size_t a) const { return d_[a]; }
    Boundary boundary() const { return boundary_; }
    bool periodic() const { return boundary_ == Boundary::Periodic; }

    std::size_t size() const {
        std::size_t s = 1;
        for (int v : n_) s *= static_cast<std::size_t>(v);
        return s;
    }

    std::size_t stride(std::size_t a) const {
        std::size_t s = 1;
        for (std::size_t b = 0; b < a; ++b) s *= static_cast<std::size_t>(n_[b]);
        return s;
    }

    std::size_t linear(const Index& idx) const {
        std::size_t lin = 0;
        for (std::size_t a = Dim; a-- > 0;) lin = lin * static_cast<std::size_t>(n_[a]) + idx[a];
        return lin;
    }

    Index multi(std::size_t lin) const {
        Index idx{};
        for (std::size_t a = 0; a < Dim; ++a) {
            idx[a] = static_cast<int>(lin % static_cast<std::size_t>(n_[a]));
            lin /= static_cast<std::size_t>(n_[a]);
        }
        return idx;
    }

    double coord(std::size_t a, int i) const { return origin_[a] + i * d_[a]; }

    Point point(const Index& idx) const {
        Point x{};
        for (std::size_t a = 0; a < Dim; ++a) x[a] = coord(a, idx[a]);
        return x;
    }

    /// Physical length of the domain along an axis.
    double extent(std::size_t a) const {
        return periodic() ? n_[a] * d_[a] : (n_[a] - 1) * d_[a];
    }

    double min_spacing() const {
        double m = d_[0];
        for (double v : d_) m = v < m ? v : m;
        return m;
    }

    double cell_volume() const {
        double v = 1.0;
        for (double s : d_) v *= s;
        return v;
    }

    /// True when idx is at least `margin` points away from every face.
    bool inside(const Index& idx, int margin) const {
        for (std::size_t a = 0; a < Dim; ++a)
            if (idx[a] < margin || idx[a] > n_[a] - 1 - margin) return false;
        return true;
    }

    bool on_boundary(const Index& idx) const { return !inside(idx, 1); }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n_ == b.n_ && a.d_ == b.d_ && a.origin_ == b.origin_ && a.boundary_ == b.boundary_;
    }

    std::string describe() const {
        std::string s = std::string(to_string(boundary_)) + " grid ";
        for (std::size_t a = 0; a < Dim; ++a) s += (a ? "x" : "") + std::to_string(n_[a]);
        s += " spacing (";
        for (std::size_t a = 0; a < Dim; ++a) s += (a ? ", " : "") + std::to_string(d_[a]);
        return s + ")";
    }

private:
    Index n_;
    Point d_;
    Point origin_;
    Boundary boundary_;
};

using Grid2 = Grid<2>;
using Grid3 = Grid<3>;

/// Calls fn(base, stride) for every grid line parallel to `axis`; the line's
/// points are base + i*stride for i in [0, n(axis)).
template <std::size_t Dim, class Fn>
void for_each_line(const Grid<Dim>& g, std::size_t axis, Fn&& fn) {
    const std::size_t stride = g.stride(axis);
    const std::size_t len = static_cast<std::size_t>(g.n(axis));
    const std::size_t total = g.size();
    const std::size_t block = stride * len;
    for (std::size_t outer = 0; outer < total; outer += block)
        for (std::size_t inner = 0; inner < stride; ++inner) fn(outer + inner, stride);
}

} // namespace lamekit
