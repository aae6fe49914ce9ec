#pragma once

#include <array>
#include <cmath>
#include <string>

#include "lamekit/error.hpp"
#include "lamekit/operators.hpp"

namespace lamekit {

struct LameCoefficients {
    double lambda;
    double mu;
};

/// Lamé coefficients from Young's modulus and Poisson ratio.
inline LameCoefficients lame_from_engineering(double E, double sigma) {
    if (!(E > 0.0) || !std::isfinite(E)) throw DomainError("Young's modulus must be positive, got " + std::to_string(E));
    if (!(sigma > -1.0 && sigma < 0.5))
        throw DomainError("Poisson ratio must lie in (-1, 0.5), got " + std::to_string(sigma));
    return {sigma * E / ((1.0 + sigma) * (1.0 - 2.0 * sigma)), E / (2.0 * (1.0 + sigma))};
}

/// Isotropic linear-elastic material. Immutable once built; both factories
/// enforce rho > 0, mu > 0, lambda + 2 mu > 0. Negative lambda is allowed.
class Material {
public:
    static Material from_lame(double rho, double lambda, double mu) { return Material(rho, lambda, mu); }

    static Material from_engineering(double rho, double E, double sigma) {
        const auto c = lame_from_engineering(E, sigma);
        return Material(rho, c.lambda, c.mu);
    }

    double rho() const { return rho_; }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }

    /// Young's modulus and Poisson ratio recovered from (lambda, mu).
    double young() const { return mu_ * (3.0 * lambda_ + 2.0 * mu_) / (lambda_ + mu_); }
    double poisson() const { return lambda_ / (2.0 * (lambda_ + mu_)); }

private:
    Material(double rho, double lambda, double mu) : rho_(rho), lambda_(lambda), mu_(mu) {
        if (!std::isfinite(rho) || !std::isfinite(lambda) || !std::isfinite(mu))
            throw DomainError("material parameters must be finite");
        if (!(rho > 0.0)) throw DomainError("density must be positive, got " + std::to_string(rho));
        if (!(mu > 0.0)) throw DomainError("shear modulus mu must be positive, got " + std::to_string(mu));
        if (!(lambda + 2.0 * mu > 0.0))
            throw DomainError("lambda + 2 mu must be positive, got " + std::to_string(lambda + 2.0 * mu));
    }

    double rho_, lambda_, mu_;
};

struct WaveSpeeds {
    double c_p;
    double c_s;
};

inline WaveSpeeds wave_speeds(const Material& m) {
    return {std::sqrt((m.lambda() + 2.0 * m.mu()) / m.rho()), std::sqrt(m.mu() / m.rho())};
}

/// Symmetrized displacement gradient, built from the central-difference stencils.
inline SymTensorField strain(const VectorField3& u) {
    require_finite(u, "displacement");
    std::array<std::array<ScalarField3, 3>, 3> du{{
        {diff1(u[0], 0), diff1(u[0], 1), diff1(u[0], 2)},
        {diff1(u[1], 0), diff1(u[1], 1), diff1(u[1], 2)},
        {diff1(u[2], 0), diff1(u[2], 1), diff1(u[2], 2)},
    }};
    // du[k][j] = d u_k / d x_j
    SymTensorField eps(u.grid());
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = j; k < 3; ++k) {
            ScalarField3 e = du[k][j] + du[j][k];
            e *= 0.5;
            eps(j, k) = std::move(e);
        }
    return eps;
}

/// Linearized isotropic stress: S = lambda tr(eps) I + 2 mu eps.
inline SymTensorField stress(const SymTensorField& eps, const Material& m) {
    if (!eps.all_finite()) throw InputError("strain contains non-finite values");
    const ScalarField3 tr = eps.trace();
    SymTensorField s(eps.grid());
    for (std::size_t slot = 0; slot < 6; ++slot) {
        ScalarField3 c = eps.slot_field(slot);
        c *= 2.0 * m.mu();
        if (slot < 3) c.axpy(m.lambda(), tr);
        s.slot_field(slot) = std::move(c);
    }
    return s;
}

/// Traction vector S(n): component k is sum_j n_j S_jk.
inline VectorField3 traction(const SymTensorField& s, const std::array<double, 3>& n) {
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (!std::isfinite(len) || std::abs(len - 1.0) > 1e-12)
        throw InputError("traction normal must be a unit vector (|n| = " + std::to_string(len) + ")");
    VectorField3 t(s.grid());
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t j = 0; j < 3; ++j)
            if (n[j] != 0.0) t[k].axpy(n[j], s(j, k));
    return t;
}

} // namespace lamekit
