#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "udisc/errors.hpp"

namespace udisc {

using Complex = std::complex<double>;

/// A pure-state amplitude vector. Amplitudes are not required to be
/// normalized; operations that need unit vectors normalize explicitly.
struct Ket {
    Eigen::VectorXcd amplitudes;

    Ket() = default;
    explicit Ket(Eigen::VectorXcd amps) : amplitudes(std::move(amps)) {}
    Ket(std::initializer_list<Complex> amps)
        : amplitudes(Eigen::Map<const Eigen::VectorXcd>(amps.begin(),
                                                        static_cast<Eigen::Index>(amps.size()))) {}

    Eigen::Index dim() const { return amplitudes.size(); }

    double norm() const { return amplitudes.norm(); }
    double squared_norm() const { return amplitudes.squaredNorm(); }

    bool is_normalized(double tol = 1e-12) const {
        return std::abs(squared_norm() - 1.0) <= tol;
    }

    /// Unit-norm copy. Throws ZeroVector on (numerically) zero input.
    Ket normalized() const;

    /// Scales to unit norm in place and returns the original norm.
    double normalize();
};

/// ⟨a|b⟩, conjugate-linear in the first argument.
inline Complex inner(const Ket& a, const Ket& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("inner product of kets with dims " +
                                std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    return a.amplitudes.dot(b.amplitudes);
}

/// |a⟩⊗|b⟩ with row-major index convention: component (i,j) -> i*dim(b)+j.
Ket tensor(const Ket& a, const Ket& b);

/// Computational basis vector |index⟩ in a `dim`-dimensional space.
Ket basis_ket(Eigen::Index dim, Eigen::Index index);

/// Fixes the global phase so the first nonzero amplitude is real positive.
Ket phase_fixed(const Ket& v, double tol = 1e-12);

}  // namespace udisc
