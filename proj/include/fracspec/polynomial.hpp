#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "fracspec/error.hpp"

namespace fracspec {

using cplx = std::complex<double>;

template <class T> struct is_complex : std::false_type {};
template <class T> struct is_complex<std::complex<T>> : std::true_type {};

// Roots of sum_i a[i] x^i (ascending, a.back() != 0), Newton-polished.
// Quadratics use the cancellation-free closed form.
std::vector<cplx> poly_roots(std::vector<cplx> a);

// p(x) = sum_i coeffs[i] x^i with coeffs[0] == 0 and |p'(0)| > 1.
template <class Scalar>
class PolynomialMap {
public:
    using scalar_type = Scalar;

    PolynomialMap() = default;

    explicit PolynomialMap(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) {
        while (c_.size() > 1 && c_.back() == Scalar(0)) c_.pop_back();
        if (c_.size() < 3) throw DomainError("polynomial map needs degree >= 2");
        if (c_[0] != Scalar(0)) throw DomainError("polynomial map needs p(0) = 0");
        if (std::abs(c_[1]) <= 1.0)
            throw MultiplierError("|p'(0)| must exceed 1, got " + std::to_string(std::abs(c_[1])));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    Scalar multiplier() const { return c_[1]; }
    Scalar leading() const { return c_.back(); }
    const std::vector<Scalar>& coeffs() const { return c_; }

    // K = max |p_i| over the non-leading coefficients.
    double K() const {
        double k = 0;
        for (int i = 0; i < degree(); ++i) k = std::max(k, std::abs(c_[i]));
        return k;
    }

    template <class T>
    auto operator()(T x) const {
        using R = std::common_type_t<Scalar, T>;
        R acc = R(c_.back());
        for (int i = degree() - 1; i >= 0; --i) acc = acc * R(x) + R(c_[i]);
        return acc;
    }

    template <class T>
    auto derivative(T x) const {
        using R = std::common_type_t<Scalar, T>;
        R acc = R(c_.back()) * double(degree());
        for (int i = degree() - 1; i >= 1; --i) acc = acc * R(x) + R(c_[i]) * double(i);
        return acc;
    }

    // All roots of p(x) = y with multiplicity.
    std::vector<cplx> solve(cplx y) const {
        std::vector<cplx> a(c_.begin(), c_.end());
        a[0] -= y;
        return poly_roots(std::move(a));
    }

    // Coefficients of the derivative polynomial.
    std::vector<Scalar> derivative_coeffs() const {
        std::vector<Scalar> out(degree());
        for (int i = 1; i <= degree(); ++i) out[i - 1] = c_[i] * double(i);
        return out;
    }

private:
    std::vector<Scalar> c_{Scalar(0), Scalar(2), Scalar(1)};
};

// Real roots of a real polynomial given by ascending coefficients.
std::vector<double> real_roots(const std::vector<double>& coeffs, double im_tol = 1e-9);

}  // namespace fracspec
