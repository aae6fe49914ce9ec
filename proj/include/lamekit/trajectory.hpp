#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lamekit/field.hpp"

namespace lamekit {

/// Time-ordered snapshots on one grid with uniform spacing dt, snapshot i at t0 + i*dt.
template <class Field>
class Trajectory {
public:
    using GridType = std::decay_t<decltype(std::declval<Field>().grid())>;

    Trajectory(double t0, double dt) : t0_(t0), dt_(dt) {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("trajectory time step must be positive");
        if (!std::isfinite(t0)) throw InputError("trajectory start time must be finite");
    }

    void push_back(Field f) {
        if (!snapshots_.empty() && !(f.grid() == snapshots_.front().grid()))
            throw InputError("trajectory snapshots must share one grid");
        snapshots_.push_back(std::move(f));
    }

    std::size_t size() const { return snapshots_.size(); }
    bool empty() const { return snapshots_.empty(); }
    double t0() const { return t0_; }
    double dt() const { return dt_; }
    double time(std::size_t i) const { return t0_ + static_cast<double>(i) * dt_; }
    const GridType& grid() const { return snapshots_.front().grid(); }
    const Field& operator[](std::size_t i) const { return snapshots_[i]; }
    Field& operator[](std::size_t i) { return snapshots_[i]; }
    const Field& back() const { return snapshots_.back(); }
    auto begin() const { return snapshots_.begin(); }
    auto end() const { return snapshots_.end(); }

    void require_at_least(std::size_t n, const std::string& who) const {
        if (snapshots_.size() < n)
            throw InputError(who + " needs at least " + std::to_string(n) + " snapshots, got " +
                             std::to_string(snapshots_.size()));
    }

private:
    double t0_;
    double dt_;
    std::vector<Field> snapshots_;
};

template <std::size_t Dim>
using ScalarTrajectory = Trajectory<ScalarField<Dim>>;
using VectorTrajectory = Trajectory<VectorField3>;

/// Second time difference of snapshot i. Interior snapshots use the centered
/// three-point formula; the first and last use the one-sided second-order
/// four-point formula (three-point when only three snapshots exist).
template <class Field>
Field second_time_difference(const Trajectory<Field>& tr, std::size_t i) {
    tr.require_at_least(3, "second time difference");
    const std::size_t n = tr.size();
    const double inv = 1.0 / (tr.dt() * tr.dt());
    auto combo = [&](std::initializer_list<std::pair<std::size_t, double>> terms) {
        Field out(tr.grid());
        for (const auto& [idx, w] : terms) out.axpy(w * inv, tr[idx]);
        return out;
    };
    if (i > 0 && i + 1 < n) return combo({{i - 1, 1.0}, {i, -2.0}, {i + 1, 1.0}});
    if (n == 3) return combo({{0, 1.0}, {1, -2.0}, {2, 1.0}});
    if (i == 0) return combo({{0, 2.0}, {1, -5.0}, {2, 4.0}, {3, -1.0}});
    return combo({{n - 1, 2.0}, {n - 2, -5.0}, {n - 3, 4.0}, {n - 4, -1.0}});
}

} // namespace lamekit
