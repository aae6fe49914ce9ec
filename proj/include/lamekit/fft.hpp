#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "lamekit/error.hpp"

// Thin RAII wrappers over FFTW plans. Plans are created with FFTW_ESTIMATE so
// that the chosen algorithm, and therefore the rounding, is the same on every run.

namespace lamekit::fft {

class Plan {
public:
    Plan() = default;
    explicit Plan(fftw_plan p) : plan_(p) {
        if (!plan_) throw NumericalError("FFTW plan creation failed");
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    Plan(Plan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
    Plan& operator=(Plan&& o) noexcept {
        std::swap(plan_, o.plan_);
        return *this;
    }
    ~Plan() {
        if (plan_) fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_ = nullptr;
};

/// Real-to-complex transform pair over a Dim-dimensional array stored axis 0 fastest.
/// The half-spectrum is along axis 0: n[0]/2+1 complex entries.
template <std::size_t Dim>
class RealTransform {
public:
    explicit RealTransform(const std::array<int, Dim>& n) : n_(n) {
        std::size_t real_size = 1, spec_size = 1;
        for (std::size_t a = 0; a < Dim; ++a) {
            real_size *= static_cast<std::size_t>(n[a]);
            spec_size *= static_cast<std::size_t>(a == 0 ? n[a] / 2 + 1 : n[a]);
        }
        real_.resize(real_size);
        spec_.resize(spec_size);
        // FFTW is row-major (last dimension fastest): pass dimensions reversed.
        std::array<int, Dim> rev{};
        for (std::size_t a = 0; a < Dim; ++a) rev[a] = n[Dim - 1 - a];
        auto* cplx = reinterpret_cast<fftw_complex*>(spec_.data());
        forward_ = Plan(fftw_plan_dft_r2c(static_cast<int>(Dim), rev.data(), real_.data(), cplx, FFTW_ESTIMATE));
        backward_ = Plan(fftw_plan_dft_c2r(static_cast<int>(Dim), rev.data(), cplx, real_.data(), FFTW_ESTIMATE));
    }

    std::vector<double>& real() { return real_; }
    std::vector<std::complex<double>>& spectrum() { return spec_; }
    const std::array<int, Dim>& n() const { return n_; }

    /// Half-spectrum extent along axis 0.
    int half() const { return n_[0] / 2 + 1; }

    void forward() { forward_.execute(); }
    /// Unnormalized: the result is scaled by the total point count.
    void backward() { backward_.execute(); }

    /// Calls fn(spectral index, wavenumber indices) for every stored coefficient.
    /// Wavenumber indices are in [0, n) per axis (axis 0 in [0, n/2]).
    template <class Fn>
    void for_each_mode(Fn&& fn) const {
        std::array<int, Dim> k{};
        const std::size_t total = spec_.size();
        for (std::size_t s = 0; s < total; ++s) {
            fn(s, k);
            for (std::size_t a = 0; a < Dim; ++a) {
                const int lim = a == 0 ? n_[0] / 2 + 1 : n_[a];
                if (++k[a] < lim) break;
                k[a] = 0;
            }
        }
    }

private:
    std::array<int, Dim> n_;
    std::vector<double> real_;
    std::vector<std::complex<double>> spec_;
    Plan forward_, backward_;
};

/// Type-I discrete sine transform over a Dim-dimensional array of interior
/// points (axis 0 fastest). Applying it twice multiplies by prod 2(m_a+1).
template <std::size_t Dim>
class SineTransform {
public:
    explicit SineTransform(const std::array<int, Dim>& m) : m_(m) {
        std::size_t size = 1;
        for (int v : m) size *= static_cast<std::size_t>(v);
        data_.resize(size);
        std::array<int, Dim> rev{};
        std::array<fftw_r2r_kind, Dim> kinds{};
        for (std::size_t a = 0; a < Dim; ++a) {
            rev[a] = m[Dim - 1 - a];
            kinds[a] = FFTW_RODFT00;
        }
        plan_ = Plan(fftw_plan_r2r(static_cast<int>(Dim), rev.data(), data_.data(), data_.data(), kinds.data(),
                                   FFTW_ESTIMATE));
    }

    std::vector<double>& data() { return data_; }
    void execute() { plan_.execute(); }

    double normalization() const {
        double s = 1.0;
        for (int v : m_) s *= 2.0 * (v + 1);
        return s;
    }

private:
    std::array<int, Dim> m_;
    std::vector<double> data_;
    Plan plan_;
};

} // namespace lamekit::fft
