#include "fracspec/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "fracspec/error.hpp"

namespace fracspec {

namespace {

// Runs body(i) for i in [0, n) split into contiguous blocks.
template<class F>
void parallel_for(std::int64_t n, int threads, F body) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::int64_t>(n, 256))));
    if (threads == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([=, &body] {
            for (std::int64_t i = n * t / threads; i < n * (t + 1) / threads; ++i) body(i);
        });
    for (auto& th : pool) th.join();
}

std::pair<long long, long long> lattice_coords(const Point& x, int level) {
    const double s = std::ldexp(1.0, level);
    long long V = std::llround(x.y() * s * 2 / std::sqrt(3.0));
    long long U = std::llround(x.x() * s - 0.5 * double(V));
    return {U, V};
}

}  // namespace

AtomEstimate HittingStats::atom(std::int64_t t) const {
    double c = t >= 0 && t < static_cast<std::int64_t>(histogram.size()) ? double(histogram[t]) : 0.0;
    double p = c / double(samples);
    return {t, p, std::sqrt(p * (1 - p) / double(samples))};
}

std::vector<int> coarse_vertices(const LatticeGraph& g) {
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
        if (g.level == 0) {
            out.push_back(v);
            continue;
        }
        auto [U, V] = lattice_coords(g.vertices[v], g.level);
        if (U % 2 == 0 && V % 2 == 0) out.push_back(v);
    }
    return out;
}

HittingStats simulate_hitting_times(const WalkConfig& cfg) {
    if (cfg.samples < 1) throw DomainError("walk: samples must be >= 1");
    if (cfg.step_budget < 1) throw DomainError("walk: step budget must be >= 1");
    auto g = build_graph(cfg.level);
    const int n = static_cast<int>(g.vertices.size());
    std::vector<char> coarse(n, 0);
    for (int v : coarse_vertices(g)) coarse[v] = 1;
    if (cfg.start < 0 || cfg.start >= n || !coarse[cfg.start])
        throw DomainError("walk: start vertex must be a coarse vertex of G_level");

    std::vector<std::int64_t> T(cfg.samples, -1);
    parallel_for(cfg.samples, cfg.threads, [&](std::int64_t i) {
        auto rng = stream_engine(cfg.seed, static_cast<std::uint64_t>(i));
        int v = cfg.start;
        for (std::int64_t step = 1; step <= cfg.step_budget; ++step) {
            const auto& nb = g.adjacency[v];
            std::uniform_int_distribution<int> pick(0, static_cast<int>(nb.size()) - 1);
            v = nb[pick(rng)];
            if (coarse[v] && v != cfg.start) {
                T[i] = step;
                return;
            }
        }
    });

    HittingStats s;
    double sum = 0;
    std::int64_t done = 0;
    for (auto t : T)
        if (t > 0) {
            ++done;
            sum += double(t);
        }
    if (done < cfg.samples)
        throw BudgetError("walk: step budget exhausted on " + std::to_string(cfg.samples - done) + " samples", done,
                          done ? sum / double(done) : 0.0);
    s.samples = cfg.samples;
    for (auto t : T) s.max_t = std::max(s.max_t, t);
    s.histogram.assign(s.max_t + 1, 0);
    for (auto t : T) ++s.histogram[t];
    s.mean = sum / double(s.samples);
    double ss = 0;
    for (auto t : T) ss += (double(t) - s.mean) * (double(t) - s.mean);
    s.variance = s.samples > 1 ? ss / double(s.samples - 1) : 0.0;
    s.stderr_mean = std::sqrt(s.variance / double(s.samples));
    return s;
}

double Pgf::operator()(double z) const {
    auto h = [z](const std::vector<double>& c) {
        double r = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * z + *it;
        return r;
    };
    return h(num) / h(den);
}

double Pgf::derivative(double z) const {
    auto h = [z](const std::vector<double>& c, bool d) {
        double r = 0;
        for (int i = static_cast<int>(c.size()) - 1; i >= (d ? 1 : 0); --i) r = r * z + (d ? i * c[i] : c[i]);
        return r;
    };
    double N = h(num, false), D = h(den, false);
    return (h(num, true) * D - N * h(den, true)) / (D * D);
}

std::vector<double> Pgf::series(int M) const {
    if (den.empty() || den[0] == 0) throw DomainError("pgf: den(0) must be nonzero");
    std::vector<double> a(M + 1, 0.0);
    for (int k = 0; k <= M; ++k) {
        double v = k < static_cast<int>(num.size()) ? num[k] : 0.0;
        for (int j = 1; j <= k && j < static_cast<int>(den.size()); ++j) v -= den[j] * a[k - j];
        a[k] = v / den[0];
    }
    return a;
}

Pgf sg_offspring_pgf() { return Pgf{{0, 0, 1}, {4, -3}}; }

BranchingStats branching_simulate(const Pgf& q, int generations, std::int64_t samples, std::uint64_t seed,
                                  int threads) {
    if (samples < 1) throw DomainError("branching: samples must be >= 1");
    if (generations < 0) throw DomainError("branching: generations must be >= 0");
    if (std::abs(q(1.0) - 1) > 1e-12) throw DomainError("branching: q(1) != 1");
    const double m = q.mean();
    if (!(m > 1)) throw DomainError("branching: offspring mean q'(1) <= 1, process is not supercritical");

    // Offspring law truncated at cumulative mass 1 - 1e-12, remainder on the last atom.
    std::vector<double> pk;
    double cum = 0;
    for (int M = 64; pk.empty(); M *= 2) {
        auto c = q.series(M);
        cum = 0;
        for (int k = 0; k <= M; ++k) {
            if (c[k] < -1e-15) throw DomainError("branching: q has a negative series coefficient");
            cum += std::max(c[k], 0.0);
            if (cum >= 1 - 1e-12) {
                pk.assign(c.begin(), c.begin() + k + 1);
                break;
            }
        }
        if (M > (1 << 20)) throw NumericError("branching: offspring law does not reach mass 1 - 1e-12");
    }
    for (auto& x : pk) x = std::max(x, 0.0);
    pk.back() += 1 - cum;
    std::vector<double> cdf(pk.size());
    std::partial_sum(pk.begin(), pk.end(), cdf.begin());
    cdf.back() = 1.0;

    BranchingStats out;
    out.generations = generations;
    out.samples = samples;
    out.offspring_mean = m;
    out.Z.assign(samples, std::vector<std::int64_t>(generations + 1, 0));
    parallel_for(samples, threads, [&](std::int64_t i) {
        auto rng = stream_engine(seed, static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::int64_t z = 1;
        out.Z[i][0] = 1;
        for (int g = 1; g <= generations; ++g) {
            std::int64_t next = 0;
            if (z <= 64) {
                for (std::int64_t j = 0; j < z; ++j) {
                    double u = U(rng);
                    next += std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
                }
            } else {
                // Multinomial counts over the atoms via sequential binomials.
                std::int64_t left = z;
                double mass = 1.0;
                for (std::size_t k = 0; k < pk.size() && left > 0; ++k) {
                    std::int64_t c = left;
                    if (k + 1 < pk.size()) {
                        double pr = std::min(1.0, pk[k] / mass);
                        c = pr > 0 ? std::binomial_distribution<std::int64_t>(left, pr)(rng) : 0;
                    }
                    next += c * static_cast<std::int64_t>(k);
                    left -= c;
                    mass -= pk[k];
                    if (mass <= 0) mass = 0;
                }
            }
            z = next;
            out.Z[i][g] = z;
        }
    });

    out.mean_Z.assign(generations + 1, 0);
    out.mean_W.assign(generations + 1, 0);
    out.stderr_W.assign(generations + 1, 0);
    for (int g = 0; g <= generations; ++g) {
        const double scale = std::pow(m, g);
        double s = 0, s2 = 0;
        for (std::int64_t i = 0; i < samples; ++i) {
            double w = double(out.Z[i][g]) / scale;
            s += w;
            s2 += w * w;
        }
        double mean = s / double(samples);
        out.mean_W[g] = mean;
        out.mean_Z[g] = mean * scale;
        double var = samples > 1 ? (s2 - double(samples) * mean * mean) / double(samples - 1) : 0.0;
        out.stderr_W[g] = std::sqrt(std::max(var, 0.0) / double(samples));
    }
    return out;
}

ReturnProbabilities return_probabilities(int level, int max_steps) {
    if (level < 0 || level > max_return_level)
        throw CapacityError("return_probabilities: level must be in [0, " + std::to_string(max_return_level) + "]");
    if (max_steps < 0 || max_steps > 10000000) throw CapacityError("return_probabilities: max_steps out of range");
    auto g = build_graph(level);
    const int n = static_cast<int>(g.vertices.size());
    ReturnProbabilities r;
    r.level = level;
    r.vertex = g.boundary.front();
    r.d_S = 2 * std::log(3.0) / std::log(5.0);
    std::vector<double> cur(n, 0.0), nxt(n);
    cur[r.vertex] = 1;
    r.p.push_back(1);
    r.scaled.push_back(0);
    for (int k = 1; k <= max_steps; ++k) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int v = 0; v < n; ++v) {
            if (cur[v] == 0) continue;
            double share = cur[v] / g.degree(v);
            for (int u : g.adjacency[v]) nxt[u] += share;
        }
        std::swap(cur, nxt);
        double mass = 0;
        for (double x : cur) mass += x;
        r.max_mass_defect = std::max(r.max_mass_defect, std::abs(mass - 1));
        r.p.push_back(cur[r.vertex]);
        r.scaled.push_back(std::pow(double(k), r.d_S / 2) * cur[r.vertex]);
    }
    return r;
}

FluctuationBand fluctuation_band(const ReturnProbabilities& r, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi >= static_cast<int>(r.scaled.size()) || n_lo > n_hi)
        throw DomainError("fluctuation_band: window outside the computed range");
    FluctuationBand b{r.scaled[n_lo], r.scaled[n_lo]};
    for (int k = n_lo; k <= n_hi; ++k) {
        b.lo = std::min(b.lo, r.scaled[k]);
        b.hi = std::max(b.hi, r.scaled[k]);
    }
    return b;
}

ConjugationReport pgf_conjugation_check(const Pgf& psi) {
    ConjugationReport rep;
    rep.psi_at_1 = psi(1.0);
    rep.lambda = psi.derivative(1.0);
    // 1/psi(1/z) = A(z) / B(z) with A, B the reversed den, num padded to a common degree.
    const std::size_t D = std::max(psi.num.size(), psi.den.size()) - 1;
    std::vector<double> A(D + 1, 0.0), B(D + 1, 0.0);
    for (std::size_t i = 0; i < psi.den.size(); ++i) A[D - i] = psi.den[i];
    for (std::size_t i = 0; i < psi.num.size(); ++i) B[D - i] = psi.num[i];
    while (B.size() > 1 && B.back() == 0) B.pop_back();
    while (A.size() > 1 && A.back() == 0) A.pop_back();
    if (A.size() < B.size()) {
        rep.remainder = 1;
        return rep;
    }
    std::vector<double> Q(A.size() - B.size() + 1, 0.0), R = A;
    for (int k = static_cast<int>(Q.size()) - 1; k >= 0; --k) {
        Q[k] = R[k + B.size() - 1] / B.back();
        for (std::size_t j = 0; j < B.size(); ++j) R[k + j] -= Q[k] * B[j];
    }
    double scale = 0;
    for (double a : A) scale = std::max(scale, std::abs(a));
    for (std::size_t j = 0; j + 1 < B.size(); ++j) rep.remainder = std::max(rep.remainder, std::abs(R[j]));
    rep.remainder /= std::max(scale, 1e-300);
    rep.polynomial = rep.remainder < 1e-12;
    if (!rep.polynomial) return rep;
    rep.P = Q;
    const int d = static_cast<int>(Q.size()) - 1;
    if (d < 2 || (Q.back() < 0 && (d - 1) % 2 == 0)) return rep;
    // h(x) = alpha (P(1 + x/alpha) - 1), alpha^{d-1} = leading coefficient.
    const double alpha = std::copysign(std::pow(std::abs(Q.back()), 1.0 / (d - 1)), Q.back());
    std::vector<double> shifted(d + 1, 0.0);
    for (int k = 0; k <= d; ++k) {
        double binom = 1;
        for (int j = 0; j <= k; ++j) {
            shifted[j] += Q[k] * binom;
            binom = binom * (k - j) / (j + 1);
        }
    }
    shifted[0] -= 1;
    rep.conjugate.resize(d + 1);
    for (int k = 0; k <= d; ++k) rep.conjugate[k] = alpha * shifted[k] * std::pow(alpha, -k);
    return rep;
}

void write_histogram_csv(std::ostream& os, const HittingStats& s) {
    os << "t,count,probability\n";
    os.precision(17);
    for (std::size_t t = 0; t < s.histogram.size(); ++t)
        if (s.histogram[t]) os << t << ',' << s.histogram[t] << ',' << double(s.histogram[t]) / double(s.samples) << '\n';
}

void write_returns_csv(std::ostream& os, const ReturnProbabilities& r) {
    os << "n,p,scaled\n";
    os.precision(17);
    for (std::size_t n = 0; n < r.p.size(); ++n) os << n << ',' << r.p[n] << ',' << r.scaled[n] << '\n';
}

}  // namespace fracspec
