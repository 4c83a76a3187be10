#include "udisc/ket.hpp"

namespace udisc {

namespace {
constexpr double kZeroNormTol = 1e-14;
}

Ket Ket::normalized() const {
    const double n = norm();
    if (n <= kZeroNormTol) throw ZeroVector("cannot normalize a zero ket");
    return Ket{amplitudes / n};
}

double Ket::normalize() {
    const double n = norm();
    if (n <= kZeroNormTol) throw ZeroVector("cannot normalize a zero ket");
    amplitudes /= n;
    return n;
}

Ket tensor(const Ket& a, const Ket& b) {
    Eigen::VectorXcd out(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        out.segment(i * b.dim(), b.dim()) = a.amplitudes(i) * b.amplitudes;
    return Ket{std::move(out)};
}

Ket basis_ket(Eigen::Index dim, Eigen::Index index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(index) = 1.0;
    return Ket{std::move(v)};
}

Ket phase_fixed(const Ket& v, double tol) {
    for (Eigen::Index i = 0; i < v.dim(); ++i) {
        const Complex c = v.amplitudes(i);
        if (std::abs(c) > tol) {
            return Ket{v.amplitudes * (std::conj(c) / std::abs(c))};
        }
    }
    return v;
}

}  // namespace udisc
