#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fracspec/error.hpp"
#include "fracspec/polynomial.hpp"

namespace fracspec {

// |value| = exp(log_abs), value = phase * |value|; phase is +-1 for real values.
template <class T>
struct LogValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    T phase = T(1);
};

// Entire solution of Phi(lambda z) = p(Phi(z)), Phi(0) = 0, Phi'(0) = 1.
template <class Scalar>
class PoincareFunction {
public:
    using scalar_type = Scalar;

    PoincareFunction() = default;

    // N <= 0 picks the order adaptively (|c_n| < 1e-18 twice in a row).
    static PoincareFunction solve(const PolynomialMap<Scalar>& p, int N = 0) {
        PoincareFunction f;
        f.p_ = p;
        const Scalar lam = p.multiplier();
        const int d = p.degree();
        f.rho_ = std::log(double(d)) / std::log(std::abs(lam));
        const bool adaptive = N <= 0;
        const int nmax = adaptive ? 400 : N;
        if (!adaptive && N < 2) throw DomainError("series order must be at least 2");

        // pw[k][n] = [z^n] Phi^k
        std::vector<std::vector<Scalar>> pw(d + 1, std::vector<Scalar>(nmax + 1, Scalar(0)));
        std::vector<Scalar>& c = pw[1];
        c[1] = Scalar(1);
        for (int k = 2; k <= d; ++k) pw[k][k] = Scalar(1);
        Scalar lam_n = lam;
        int small = 0;
        int last = nmax;
        for (int n = 2; n <= nmax; ++n) {
            lam_n *= lam;
            for (int k = 2; k <= d; ++k) {
                if (n == k) continue;
                Scalar acc(0);
                for (int j = 1; j <= n - 1; ++j) acc += c[j] * pw[k - 1][n - j];
                pw[k][n] = acc;
            }
            Scalar rhs(0);
            for (int k = 2; k <= d; ++k) rhs += p.coeffs()[k] * pw[k][n];
            c[n] = rhs / (lam_n - lam);
            if (adaptive) {
                small = std::abs(c[n]) < 1e-18 ? small + 1 : 0;
                if (small >= 2 && n >= 8) { last = n; break; }
            }
        }
        if (adaptive && small < 2) throw AccuracyError("series did not decay below 1e-18", std::abs(c[nmax]));
        f.c_.assign(c.begin(), c.begin() + last + 1);
        return f;
    }

    const PolynomialMap<Scalar>& map() const { return p_; }
    const std::vector<Scalar>& coeffs() const { return c_; }
    int order() const { return static_cast<int>(c_.size()) - 1; }
    double rho() const { return rho_; }
    double radius() const { return r0_; }

    template <class T>
    auto series(T z) const {
        using R = std::common_type_t<Scalar, T>;
        R acc(0);
        for (int n = order(); n >= 1; --n) acc = (acc + R(c_[n])) * R(z);
        return acc;
    }

    template <class T>
    auto series_derivative(T z) const {
        using R = std::common_type_t<Scalar, T>;
        R acc(0);
        for (int n = order(); n >= 1; --n) acc = acc * R(z) + R(c_[n]) * double(n);
        return acc;
    }

    // Number of decimation steps k+1 so that |z| / |lambda|^{k+1} <= r0 (0 if already inside).
    int steps_for(double absz) const {
        int k = 0;
        const double lam = std::abs(p_.multiplier());
        while (absz > r0_) { absz /= lam; ++k; }
        return k;
    }

    // Plain channel; throws OverflowError once the value is not finite.
    template <class T>
    auto operator()(T z) const {
        using R = std::common_type_t<Scalar, T>;
        int k = steps_for(std::abs(z));
        R zz = R(z);
        for (int i = 0; i < k; ++i) zz /= R(p_.multiplier());
        R y = series(zz);
        for (int i = 0; i < k; ++i) y = p_(y);
        if (!std::isfinite(std::abs(y)))
            throw OverflowError("Phi overflows at |z| = " + std::to_string(std::abs(z)) + "; use the log channel");
        return y;
    }

    // Phi and Phi' together (chain rule through the decimation steps).
    template <class T>
    auto value_and_derivative(T z) const {
        using R = std::common_type_t<Scalar, T>;
        int k = steps_for(std::abs(z));
        R zz = R(z);
        R scale(1);
        for (int i = 0; i < k; ++i) { zz /= R(p_.multiplier()); scale /= R(p_.multiplier()); }
        R y = series(zz);
        R dy = series_derivative(zz) * scale;
        for (int i = 0; i < k; ++i) { dy = p_.derivative(y) * dy; y = p_(y); }
        return std::pair<R, R>(y, dy);
    }

    template <class T>
    auto log_eval(T z) const {
        using R = std::common_type_t<Scalar, T>;
        int k = steps_for(std::abs(z));
        R zz = R(z);
        for (int i = 0; i < k; ++i) zz /= R(p_.multiplier());
        R y = series(zz);
        int i = 0;
        for (; i < k && std::abs(y) < 1e40; ++i) y = p_(y);
        LogValue<R> out;
        if (y == R(0)) return out;
        out.log_abs = std::log(std::abs(y));
        out.phase = y / std::abs(y);
        for (; i < k; ++i) out = log_step(out);
        return out;
    }

    // One application of p in the log channel; only meaningful for large |y|.
    template <class R>
    LogValue<R> log_step(const LogValue<R>& v) const {
        const int d = p_.degree();
        const auto& a = p_.coeffs();
        // p(y) = a_d y^d (1 + sum_{i<d} (a_i/a_d) t^{d-i}), t = 1/y
        R t = R(std::exp(-v.log_abs)) / v.phase;
        R corr(1), tp(1);
        for (int i = d - 1; i >= 1; --i) {
            tp *= t;
            corr += R(a[i] / a[d]) * tp;
        }
        LogValue<R> out;
        out.log_abs = std::log(std::abs(a[d])) + d * v.log_abs + std::log(std::abs(corr));
        R ph = R(a[d] / std::abs(a[d]));
        for (int i = 0; i < d; ++i) ph *= v.phase;
        ph *= corr / std::abs(corr);
        out.phase = ph / std::abs(ph);
        return out;
    }

    void write_csv(std::ostream& os) const {
        os << "n,c_re,c_im\n";
        os.precision(17);
        for (int n = 1; n <= order(); ++n) {
            std::complex<double> v(c_[n]);
            os << n << ',' << v.real() << ',' << v.imag() << '\n';
        }
    }

private:
    PolynomialMap<Scalar> p_;
    std::vector<Scalar> c_;
    double r0_ = 1.0;
    double rho_ = 0.0;
};

using RealPoincare = PoincareFunction<double>;
using ComplexPoincare = PoincareFunction<cplx>;

// Built-in maps.
PolynomialMap<double> sg_map();         // x(x+5)
PolynomialMap<double> chebyshev_map();  // x(x+4)

struct GrowthSample {
    double t;
    double q;  // log|Phi(r e^{i theta})| / r^rho at r = |lambda|^t
};

struct GrowthProfile {
    std::vector<GrowthSample> samples;
    double q_min = 0, q_max = 0;
    double periodicity_defect = 0;  // max |Q(t+1) - Q(t)| over samples with t+1 in range
};

GrowthProfile growth_profile(const RealPoincare& f, double theta, double t0, double t1, int per_period = 64);

struct SpiralResult {
    double L = 0;
    int iterations = 0;
    double last_difference = 0;
    // Point where the precondition |Phi(z)| > max(e, 2mK) was checked.
    int advance = 0;
    cplx z_used;
    double phi_z0 = 0;       // log|Phi| at z0 as supplied
    double threshold = 0;
    double bracket_lo = 0, bracket_hi = 0;          // sharp bracket at the accepted point
    bool bracket_holds = false;
    double loose_lo_z0 = 0, loose_hi_z0 = 0;        // +-3/4 bracket evaluated at z0
    bool loose_bracket_holds_z0 = false;
};

// Advances along z_n = lambda^n z0 to the first point meeting the precondition
// (L is the same on the whole spiral). Throws DomainError if none within max_advance.
template <class Scalar>
SpiralResult spiral_limit(const PolynomialMap<Scalar>& p, cplx z0, cplx f_z0, int max_advance = 8);

struct MultiplierEntry {
    cplx xi;
    double abs_derivative;
    std::string role;       // "max", "min" or "interior"
    double bound;           // m or m^2
    bool satisfied;
    bool equality;
};

struct JuliaReport {
    std::vector<cplx> samples;
    bool real = false;
    double max_abs_imag = 0;
    double scale = 1;
    double max_backward_residual = 0;
    std::vector<MultiplierEntry> multipliers;
    bool chebyshev_equality = false;
    double min_J = 0, max_J = 0;
};

// Quadratic a z (z - w): Julia set real iff t = a*w satisfies t >= 2 or t <= -4.
bool julia_real_quadratic(double a, double omega);

JuliaReport julia_sample_and_multipliers(const std::vector<double>& coeffs, int depth, int samples,
                                         std::uint64_t seed);

// Fraction of samples in the closed ball of radius t about 0.
double harmonic_ball_measure(const JuliaReport& r, double t);

}  // namespace fracspec
