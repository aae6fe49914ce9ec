#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lamekit/error.hpp"
#include "lamekit/grid.hpp"

namespace lamekit {

/// One real value per grid point, axis 0 fastest.
template <std::size_t Dim>
class ScalarField {
public:
    using GridType = Grid<Dim>;

    explicit ScalarField(const GridType& g, double fill = 0.0) : grid_(g), values_(g.size(), fill) {}

    ScalarField(const GridType& g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw InputError("scalar field has " + std::to_string(values_.size()) +
                             " values but the grid has " + std::to_string(grid_.size()) + " points");
    }

    /// Samples fn(x) at every grid point.
    template <class Fn>
    static ScalarField sample(const GridType& g, Fn&& fn) {
        ScalarField f(g);
        for (std::size_t i = 0; i < f.size(); ++i) f.values_[i] = fn(g.point(g.multi(i)));
        return f;
    }

    const GridType& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double at(const typename GridType::Index& idx) const { return values_[grid_.linear(idx)]; }
    double& at(const typename GridType::Index& idx) { return values_[grid_.linear(idx)]; }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    ScalarField& operator+=(const ScalarField& o) {
        check_same_grid(o);
        for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        check_same_grid(o);
        for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }
    /// this += s * o
    ScalarField& axpy(double s, const ScalarField& o) {
        check_same_grid(o);
        for (std::size_t i = 0; i < size(); ++i) values_[i] += s * o.values_[i];
        return *this;
    }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

    void check_same_grid(const ScalarField& o) const {
        if (!(grid_ == o.grid_)) throw InputError("fields live on different grids");
    }

private:
    GridType grid_;
    std::vector<double> values_;
};

/// Comp scalar components over a Dim-dimensional grid. Comp may exceed Dim
/// (an in-plane grid carrying a full 3-vector).
template <std::size_t Dim, std::size_t Comp = Dim>
class VectorField {
public:
    using GridType = Grid<Dim>;
    using Scalar = ScalarField<Dim>;
    static constexpr std::size_t components = Comp;

    explicit VectorField(const GridType& g) : comps_(make_components(g)) {}

    explicit VectorField(std::array<Scalar, Comp> comps) : comps_(std::move(comps)) {
        for (std::size_t c = 1; c < Comp; ++c) comps_[0].check_same_grid(comps_[c]);
    }

    template <class Fn>
    static VectorField sample(const GridType& g, Fn&& fn) {
        VectorField v(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto val = fn(g.point(g.multi(i)));
            for (std::size_t c = 0; c < Comp; ++c) v.comps_[c][i] = val[c];
        }
        return v;
    }

    const GridType& grid() const { return comps_[0].grid(); }
    std::size_t size() const { return comps_[0].size(); }
    const Scalar& operator[](std::size_t c) const { return comps_[c]; }
    Scalar& operator[](std::size_t c) { return comps_[c]; }

    bool all_finite() const {
        return std::all_of(comps_.begin(), comps_.end(), [](const Scalar& s) { return s.all_finite(); });
    }

    VectorField& operator+=(const VectorField& o) {
        for (std::size_t c = 0; c < Comp; ++c) comps_[c] += o.comps_[c];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (std::size_t c = 0; c < Comp; ++c) comps_[c] -= o.comps_[c];
        return *this;
    }
    VectorField& operator*=(double s) {
        for (auto& c : comps_) c *= s;
        return *this;
    }
    VectorField& axpy(double s, const VectorField& o) {
        for (std::size_t c = 0; c < Comp; ++c) comps_[c].axpy(s, o.comps_[c]);
        return *this;
    }

    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

private:
    static std::array<Scalar, Comp> make_components(const GridType& g) {
        return [&]<std::size_t... I>(std::index_sequence<I...>) {
            return std::array<Scalar, Comp>{((void)I, Scalar(g))...};
        }(std::make_index_sequence<Comp>{});
    }

    std::array<Scalar, Comp> comps_;
};

using ScalarField2 = ScalarField<2>;
using ScalarField3 = ScalarField<3>;
using VectorField2 = VectorField<2, 2>;
using VectorField3 = VectorField<3, 3>;
/// A 3-vector sampled on a plane (plate displacements).
using PlaneVectorField = VectorField<2, 3>;

/// Symmetric 3x3 tensor per point; only the six independent components are stored,
/// in the order 11, 22, 33, 12, 13, 23.
class SymTensorField {
public:
    explicit SymTensorField(const Grid3& g) : comps_{ScalarField3(g), ScalarField3(g), ScalarField3(g),
                                                    ScalarField3(g), ScalarField3(g), ScalarField3(g)} {}

    /// Storage slot of component (j, k), zero-based and symmetric.
    static constexpr std::size_t slot(std::size_t j, std::size_t k) {
        if (j == k) return j;
        const std::size_t lo = j < k ? j : k;
        const std::size_t hi = j < k ? k : j;
        return lo == 0 ? (hi == 1 ? 3 : 4) : 5;
    }

    const Grid3& grid() const { return comps_[0].grid(); }
    std::size_t size() const { return comps_[0].size(); }
    const ScalarField3& operator()(std::size_t j, std::size_t k) const { return comps_[slot(j, k)]; }
    ScalarField3& operator()(std::size_t j, std::size_t k) { return comps_[slot(j, k)]; }
    const ScalarField3& slot_field(std::size_t s) const { return comps_[s]; }
    ScalarField3& slot_field(std::size_t s) { return comps_[s]; }

    ScalarField3 trace() const {
        ScalarField3 t = comps_[0];
        t += comps_[1];
        t += comps_[2];
        return t;
    }

    bool all_finite() const {
        return std::all_of(comps_.begin(), comps_.end(), [](const ScalarField3& s) { return s.all_finite(); });
    }

private:
    std::array<ScalarField3, 6> comps_;
};

struct Norms {
    double max_abs = 0.0;
    double rms = 0.0;
};

namespace detail {
template <std::size_t Dim, class PointValueSq>
Norms norms_over(const Grid<Dim>& g, int margin, PointValueSq&& sq) {
    double mx = 0.0, sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (margin > 0 && !g.inside(g.multi(i), margin)) continue;
        const double s = sq(i);
        mx = std::max(mx, s);
        sum += s;
        ++count;
    }
    if (count == 0) return {};
    return {std::sqrt(mx), std::sqrt(sum / static_cast<double>(count))};
}
} // namespace detail

/// Max absolute value and root-mean-square over grid points. With margin > 0 only
/// points at least `margin` cells from every face are included. The reduction is
/// serial in linear index order.
template <std::size_t Dim>
Norms field_norms(const ScalarField<Dim>& f, int margin = 0) {
    return detail::norms_over(f.grid(), margin, [&](std::size_t i) { return f[i] * f[i]; });
}

/// Vector fields use the pointwise Euclidean magnitude.
template <std::size_t Dim, std::size_t Comp>
Norms field_norms(const VectorField<Dim, Comp>& v, int margin = 0) {
    return detail::norms_over(v.grid(), margin, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t c = 0; c < Comp; ++c) s += v[c][i] * v[c][i];
        return s;
    });
}

template <std::size_t Dim>
double mean(const ScalarField<Dim>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
    return s / static_cast<double>(f.size());
}

template <class F>
void require_finite(const F& f, const std::string& what) {
    if (!f.all_finite()) throw InputError(what + " contains non-finite values");
}

} // namespace lamekit
