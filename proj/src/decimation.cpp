#include "fracspec/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fracspec/selfsim.hpp"

namespace fracspec {

std::vector<rational> RationalGF::series(int M) const {
    if (den.empty() || den[0] == 0) throw SystemDefinitionError("generating function: denominator vanishes at 0");
    std::vector<rational> b(M + 1);
    for (int n = 0; n <= M; ++n) {
        rational acc = n < static_cast<int>(num.size()) ? num[n] : rational(0);
        for (int k = 1; k < static_cast<int>(den.size()) && k <= n; ++k) acc -= den[k] * b[n - k];
        b[n] = acc / den[0];
    }
    return b;
}

rational RationalGF::eval(const rational& z) const {
    auto horner = [&](const std::vector<rational>& c) {
        rational acc = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
        return acc;
    };
    rational d = horner(den);
    if (d == 0) throw PoleError("generating function: pole at the evaluation point");
    return horner(num) / d;
}

cplx RationalGF::eval(cplx z) const {
    auto horner = [&](const std::vector<rational>& c) {
        cplx acc = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + static_cast<double>(*it);
        return acc;
    };
    return horner(num) / horner(den);
}

double RationalGF::growth() const {
    if (den.size() < 2) return 0.0;
    std::vector<cplx> a;
    for (auto& c : den) a.push_back(static_cast<double>(c));
    double g = 0;
    for (cplx r : poly_roots(a)) g = std::max(g, 1.0 / std::abs(r));
    return g;
}

RationalGF make_gf(std::vector<long long> num, std::vector<long long> den) {
    RationalGF r;
    for (auto v : num) r.num.emplace_back(v);
    for (auto v : den) r.den.emplace_back(v);
    return r;
}

std::vector<std::int64_t> multiplicity_coeffs(const RationalGF& R, int M) {
    std::vector<std::int64_t> out;
    for (auto& b : R.series(M)) {
        if (denominator(b) != 1) throw SystemDefinitionError("multiplicity generating function has a non-integral coefficient");
        if (b < 0) throw SystemDefinitionError("multiplicity generating function has a negative coefficient");
        if (b > std::numeric_limits<std::int64_t>::max()) throw CapacityError("multiplicity exceeds 64 bits");
        out.push_back(static_cast<std::int64_t>(numerator(b)));
    }
    return out;
}

double SpectralSystem::spectral_dim() const {
    double r = 0;
    for (auto& g : R) r = std::max(r, g.growth());
    return 2.0 * std::max(std::log(std::max(r, 1e-300)), std::log(double(p.degree()))) / std::log(lambda());
}

void SpectralSystem::validate() const {
    if (A.empty()) throw SystemDefinitionError("spectral system: empty exceptional set");
    if (A.size() != R.size()) throw SystemDefinitionError("spectral system: one generating function per w");
    if (!(lambda() > 1)) throw SystemDefinitionError("spectral system: lambda must be real and > 1");
    for (double w : A)
        if (!(w < 0)) throw SystemDefinitionError("spectral system: exceptional values must be negative");
    auto rep = julia_sample_and_multipliers(p.coeffs(), 48, 64, 1);
    if (!rep.real || rep.max_J > 1e-9 * rep.scale)
        throw SystemDefinitionError("spectral system: Julia set of p is not real and nonpositive");
}

SpectralSystem sg_spectral_system(Boundary bc) {
    SpectralSystem s;
    s.name = "sg";
    s.p = sg_map();
    s.phi = RealPoincare::solve(s.p);
    s.bc = bc;
    const std::vector<long long> den = {1, -4, 3};  // (1 - z)(1 - 3z)
    if (bc == Boundary::dirichlet) {
        s.A = {-2, -3, -5};
        s.R = {make_gf({0, 1}, {1}), make_gf({0, 0, 0, 3}, den), make_gf({0, 2, -5}, den)};
    } else {
        s.A = {-3, -5};
        s.R = {make_gf({0, 2, -5}, den), make_gf({0, 1}, den)};
        s.zero_modes = 1;
    }
    s.growth = GrowthConstants{1.0, 1.08, 10.0};
    return s;
}

std::vector<double> real_preimages(const PolynomialMap<double>& p, double y) {
    std::vector<double> out;
    for (cplx r : p.solve(y))
        if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r))) out.push_back(r.real());
    std::sort(out.begin(), out.end(), std::greater<>());
    std::vector<double> uniq;
    for (double x : out)
        if (uniq.empty() || std::abs(uniq.back() - x) > 1e-9 * std::max(1.0, std::abs(x))) uniq.push_back(x);
    return uniq;
}

namespace {

double polish(const RealPoincare& phi, double target, double mu) {
    auto [v, dv] = phi.value_and_derivative(-mu);
    double g = v - target;
    for (int it = 0; it < 8 && g != 0.0 && dv != 0.0; ++it) {
        double cand = mu + g / dv;
        auto [v2, dv2] = phi.value_and_derivative(-cand);
        double g2 = v2 - target;
        if (!(std::abs(g2) < std::abs(g))) break;
        mu = cand;
        g = g2;
        dv = dv2;
    }
    return mu;
}

}  // namespace

double attracting_limit(const RealPoincare& phi, double y) {
    const auto& p = phi.map();
    const double lam = p.multiplier();
    double x = y;
    int n = 0;
    while (std::abs(x) > 1e-3) {
        auto pre = real_preimages(p, x);
        if (pre.empty()) throw BranchError("no real preimage of " + std::to_string(x));
        double nx = pre[0];
        if (!(std::abs(nx) < std::abs(x)) && n > 0)
            throw BranchError("attracting branch does not approach 0 from " + std::to_string(y));
        x = nx;
        if (++n > 400) throw BranchError("attracting branch did not converge from " + std::to_string(y));
    }
    // Invert the series near 0.
    double z = x;
    for (int it = 0; it < 60; ++it) {
        double step = (phi.series(z) - x) / phi.series_derivative(z);
        z -= step;
        if (std::abs(step) <= 1e-17 * std::abs(z)) break;
    }
    double mu = -std::pow(lam, n) * z;
    return polish(phi, y, mu);
}

double preimage_eigenvalue(const RealPoincare& phi, double w, const std::vector<int>& word) {
    double y = w;
    for (int j : word) {
        auto pre = real_preimages(phi.map(), y);
        if (j < 0 || j >= static_cast<int>(pre.size()))
            throw BranchError("branch letter " + std::to_string(j) + " leaves the real preimages of " + std::to_string(y));
        y = pre[j];
    }
    double mu = std::pow(phi.map().multiplier(), double(word.size())) * attracting_limit(phi, y);
    return polish(phi, w, mu);
}

std::int64_t EigenvalueList::total() const {
    std::int64_t t = 0;
    for (auto& r : records) t += r.multiplicity;
    return t;
}

std::vector<double> EigenvalueList::expanded(std::size_t max_count) const {
    std::vector<double> out;
    for (auto& r : records)
        for (std::int64_t k = 0; k < r.multiplicity && out.size() < max_count; ++k) out.push_back(r.mu);
    return out;
}

namespace {

void sort_and_merge(EigenvalueList& l) {
    std::sort(l.records.begin(), l.records.end(), [](const EigenRecord& a, const EigenRecord& b) {
        return a.mu < b.mu;
    });
    std::vector<EigenRecord> merged;
    for (auto& r : l.records) {
        if (!merged.empty() && std::abs(r.mu - merged.back().mu) <= 1e-10 * r.mu) {
            std::ostringstream os;
            os.precision(17);
            os << "eigenvalue collision at " << r.mu << " (w=" << r.w << ", m=" << r.m << ") merged";
            l.warnings.push_back(os.str());
            merged.back().multiplicity += r.multiplicity;
        } else {
            merged.push_back(r);
        }
    }
    l.records = std::move(merged);
}

}  // namespace

EigenvalueList enumerate_partial(const RealPoincare& phi, double w, double X, std::size_t node_budget) {
    if (!(X > 0)) throw DomainError("enumerate: cutoff must be positive");
    const auto& p = phi.map();
    const double lam = p.multiplier();
    auto crit = real_roots(p.derivative_coeffs());
    if (crit.empty()) throw SystemDefinitionError("enumerate: p has no real critical point");
    const double mu_star = attracting_limit(phi, crit.back());
    if (!(mu_star > 0)) throw SystemDefinitionError("enumerate: critical scale is not positive");

    struct Node {
        double y;
        int n;
        bool self;
        std::vector<int> word;
    };
    EigenvalueList out;
    out.cutoff = X;
    std::vector<Node> stack{{w, 0, true, {}}};
    std::size_t visited = 0;
    while (!stack.empty()) {
        Node nd = std::move(stack.back());
        stack.pop_back();
        if (++visited > node_budget)
            throw CapacityError("enumerate: node budget " + std::to_string(node_budget) + " exhausted below X = " +
                                std::to_string(X));
        const double scale = std::pow(lam, nd.n);
        if (nd.self) {
            double v = scale * attracting_limit(phi, nd.y);
            if (v >= X) continue;
            double mu = polish(phi, w, v);
            out.records.push_back({mu, 1, 0, w, nd.word});
        } else if (lam * scale * mu_star >= X) {
            continue;
        }
        auto pre = real_preimages(p, nd.y);
        for (std::size_t j = 0; j < pre.size(); ++j) {
            Node c{pre[j], nd.n + 1, j > 0, nd.word};
            c.word.push_back(static_cast<int>(j));
            stack.push_back(std::move(c));
        }
    }
    sort_and_merge(out);
    return out;
}

EigenvalueList enumerate_spectrum(const SpectralSystem& sys, double X, std::size_t node_budget) {
    EigenvalueList out;
    out.cutoff = X;
    const double lam = sys.lambda();
    for (std::size_t i = 0; i < sys.A.size(); ++i) {
        auto part = enumerate_partial(sys.phi, sys.A[i], X, node_budget);
        for (auto& s : part.warnings) out.warnings.push_back(s);
        if (part.records.empty()) continue;
        int M = 0;
        while (std::pow(lam, M + 1) * part.records.front().mu < X) ++M;
        auto beta = multiplicity_coeffs(sys.R[i], M);
        for (auto& r : part.records)
            for (int m = 0; m <= M; ++m) {
                double v = std::pow(lam, m) * r.mu;
                if (v >= X) break;
                if (beta[m] == 0) continue;
                out.records.push_back({v, beta[m], m, r.w, r.word});
            }
    }
    sort_and_merge(out);
    return out;
}

CountingFunction::CountingFunction(const SpectralSystem& sys, double xmax)
    : xmax_(xmax), lambda_(sys.lambda()), zero_modes_(sys.zero_modes) {
    for (std::size_t i = 0; i < sys.A.size(); ++i) {
        auto part = enumerate_partial(sys.phi, sys.A[i], xmax);
        std::vector<double> mu;
        for (auto& r : part.records) mu.push_back(r.mu);
        int M = 0;
        if (!mu.empty())
            while (std::pow(lambda_, M + 1) * mu.front() <= xmax) ++M;
        mus_.push_back(std::move(mu));
        beta_.push_back(multiplicity_coeffs(sys.R[i], M));
    }
}

std::int64_t CountingFunction::partial(std::size_t i, double x) const {
    const auto& mu = mus_.at(i);
    return std::upper_bound(mu.begin(), mu.end(), x) - mu.begin();
}

std::int64_t CountingFunction::operator()(double x) const {
    if (x > xmax_ * (1 + 1e-12)) throw DomainError("counting function queried beyond its cutoff");
    if (x < 0) return 0;
    std::int64_t n = zero_modes_;
    for (std::size_t i = 0; i < mus_.size(); ++i) {
        double s = 1;
        for (std::size_t m = 0; m < beta_[i].size(); ++m, s *= lambda_) {
            if (beta_[i][m] == 0) continue;
            n += beta_[i][m] * partial(i, x / s);
        }
    }
    return n;
}

std::int64_t counting_function(const SpectralSystem& sys, double x) {
    if (!(x > 0)) return x == 0 ? sys.zero_modes : 0;
    return CountingFunction(sys, x)(x);
}

namespace {

// Continued-fraction rational test with denominator bound qmax; returns q or 0.
long long rational_denominator(double r, double tol, long long qmax, double* near_err) {
    double x = r;
    long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    *near_err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(x);
        if (a > 1e15) break;
        long long ai = static_cast<long long>(a);
        long long h = ai * h1 + h2, k = ai * k1 + k2;
        if (k > qmax) break;
        double err = std::abs(r - double(h) / double(k));
        *near_err = std::min(*near_err, err);
        if (err <= tol) return k;
        h2 = h1; h1 = h; k2 = k1; k1 = k;
        double frac = x - a;
        if (frac == 0) return k;
        x = 1.0 / frac;
    }
    return 0;
}

}  // namespace

RenewalDim renewal_spectral_dim(const std::vector<double>& gamma) {
    if (gamma.empty()) throw DomainError("renewal: empty gamma list");
    for (double g : gamma)
        if (!(g > 0 && g < 1)) throw DomainError("renewal: gamma " + std::to_string(g) + " outside (0,1)");
    RenewalDim out;
    out.d_S = hausdorff_dim(gamma);
    out.lattice = true;
    const double a1 = -2 * std::log(gamma[0]);
    for (std::size_t i = 1; i < gamma.size(); ++i) {
        double r = -2 * std::log(gamma[i]) / a1;
        double tol = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(r));
        double near = 0;
        if (rational_denominator(r, tol, 1000000, &near) == 0) {
            out.lattice = false;
            if (near < 1e-9)
                out.warning = "shift ratio within " + std::to_string(near) + " of a rational; classified non-lattice";
        }
    }
    return out;
}

RenewalResult renewal_iterate(const std::vector<double>& gamma, const std::function<double(double)>& u, double t0,
                              double t1, double h) {
    if (!(h > 0) || !(t1 > t0)) throw ConfigError("renewal: need t1 > t0 and h > 0");
    auto dim = renewal_spectral_dim(gamma);
    RenewalResult res;
    res.d_S = dim.d_S;
    res.lattice = dim.lattice;
    const std::size_t J = gamma.size();
    std::vector<double> alpha(J), pj(J);
    for (std::size_t j = 0; j < J; ++j) {
        alpha[j] = -2 * std::log(gamma[j]);
        pj[j] = std::pow(gamma[j], dim.d_S);
        if (alpha[j] < h) throw ConfigError("renewal: grid step exceeds a shift");
    }
    const std::size_t K = static_cast<std::size_t>(std::floor((t1 - t0) / h + 1e-9)) + 1;
    res.t.resize(K);
    res.f.assign(K, 0.0);
    auto at = [&](double idx) {
        if (idx < 0) return 0.0;
        double fl = std::floor(idx);
        double fr = idx - fl;
        std::size_t i = static_cast<std::size_t>(fl);
        if (fr < 1e-9) return res.f[i];
        if (fr > 1 - 1e-9) return res.f[i + 1];
        return (1 - fr) * res.f[i] + fr * res.f[i + 1];
    };
    for (std::size_t k = 0; k < K; ++k) {
        res.t[k] = t0 + double(k) * h;
        double v = u(res.t[k]);
        for (std::size_t j = 0; j < J; ++j) v += pj[j] * at(double(k) - alpha[j] / h);
        if (!std::isfinite(v) || std::abs(v) > 1e12)
            throw ConfigError("renewal: iteration diverges at t = " + std::to_string(res.t[k]));
        res.f[k] = v;
    }
    if (dim.lattice) {
        // Span of the shift group.
        const double a1 = alpha[0];
        long long Q = 1;
        std::vector<long long> pnum(J), qden(J);
        for (std::size_t j = 0; j < J; ++j) {
            double r = alpha[j] / a1;
            double near = 0;
            long long q = rational_denominator(r, 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, r),
                                               1000000, &near);
            qden[j] = q;
            pnum[j] = std::llround(r * double(q));
            Q = std::lcm(Q, q);
        }
        long long g = 0;
        for (std::size_t j = 0; j < J; ++j) g = std::gcd(g, pnum[j] * (Q / qden[j]));
        res.period = a1 * double(g) / double(Q);
        const double start = res.t.back() - res.period;
        for (std::size_t k = 0; k < K; ++k)
            if (res.t[k] > start + 1e-12) {
                res.profile_t.push_back(res.t[k]);
                res.profile.push_back(res.f[k]);
                double prev_idx = double(k) - res.period / h;
                if (prev_idx >= 0) res.period_defect = std::max(res.period_defect, std::abs(res.f[k] - at(prev_idx)));
            }
    } else {
        double window = *std::max_element(alpha.begin(), alpha.end());
        double acc = 0;
        int cnt = 0;
        for (std::size_t k = 0; k < K; ++k)
            if (res.t[k] >= res.t.back() - window) { acc += res.f[k]; ++cnt; }
        res.limit = cnt ? acc / cnt : 0.0;
    }
    return res;
}

void write_eigenvalues_csv(std::ostream& os, const EigenvalueList& l) {
    os << "mu,multiplicity,m,w,word\n";
    os.precision(17);
    for (auto& r : l.records) {
        os << r.mu << ',' << r.multiplicity << ',' << r.m << ',' << r.w << ',';
        if (r.word.empty()) os << '-';
        for (std::size_t i = 0; i < r.word.size(); ++i) os << (i ? "." : "") << r.word[i];
        os << '\n';
    }
}

}  // namespace fracspec
