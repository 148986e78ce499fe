#include "fracspec/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <boost/math/tools/roots.hpp>

namespace fracspec {

std::vector<double> IfsSystem::ratios() const {
    std::vector<double> r;
    for (auto& m : maps) r.push_back(m.alpha);
    return r;
}

void IfsSystem::validate() const {
    if (maps.empty()) throw DomainError("IFS needs at least one map");
    for (auto& m : maps)
        if (!(m.alpha > 0 && m.alpha < 1)) throw DomainError("contraction ratio outside (0,1)");
}

IfsSystem sg_system() {
    IfsSystem s;
    for (const Point& b : sg_boundary()) s.maps.push_back({b, 0.5});
    return s;
}

std::vector<Point> sg_boundary() {
    return {Point(0, 0), Point(1, 0), Point(0.5, std::sqrt(3.0) / 2)};
}

double hausdorff_dim(const std::vector<double>& ratios) {
    if (ratios.empty()) throw DomainError("hausdorff_dim: empty ratio list");
    for (double a : ratios)
        if (!(a > 0 && a < 1)) throw DomainError("hausdorff_dim: ratio " + std::to_string(a) + " outside (0,1)");
    auto f = [&](double s) {
        double acc = -1;
        for (double a : ratios) acc += std::pow(a, s);
        return acc;
    };
    if (ratios.size() == 1) return 0.0;
    double hi = 1;
    while (f(hi) > 0) hi *= 2;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    double s = 0.5 * (r.first + r.second);
    if (std::abs(f(s)) >= 1e-12) throw NumericError("hausdorff_dim: residual above 1e-12");
    return s;
}

Point address_to_point(const IfsSystem& sys, const std::vector<int>& word, const Point& x0) {
    Point x = x0;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        if (*it < 1 || *it > sys.size()) throw DomainError("address letter out of range");
        x = sys.maps[*it - 1](x);
    }
    return x;
}

Point address_to_point(const IfsSystem& sys, const Address& addr) {
    sys.validate();
    Point x0 = sys.maps[0].b;
    if (addr.repeat) {
        if (*addr.repeat < 1 || *addr.repeat > sys.size()) throw DomainError("address letter out of range");
        x0 = sys.maps[*addr.repeat - 1].b;
    }
    return address_to_point(sys, addr.prefix, x0);
}

double cylinder_measure(const IfsSystem& sys, const std::vector<int>& prefix) {
    const double rho = hausdorff_dim(sys.ratios());
    double m = 1;
    for (int l : prefix) {
        if (l < 1 || l > sys.size()) throw DomainError("address letter out of range");
        m *= std::pow(sys.maps[l - 1].alpha, rho);
    }
    return m;
}

double diameter(const std::vector<Point>& pts) {
    double d = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

std::vector<Point> dedup_points(const std::vector<Point>& pts, double tol) {
    // Grid buckets of width tol; neighbours are checked so nothing straddles a cell edge.
    std::map<std::pair<long long, long long>, std::vector<int>> grid;
    std::vector<Point> out;
    for (const Point& p : pts) {
        long long gx = std::llround(std::floor(p.x() / tol)), gy = std::llround(std::floor(p.y() / tol));
        bool dup = false;
        for (long long dx = -1; dx <= 1 && !dup; ++dx)
            for (long long dy = -1; dy <= 1 && !dup; ++dy) {
                auto it = grid.find({gx + dx, gy + dy});
                if (it == grid.end()) continue;
                for (int k : it->second)
                    if ((out[k] - p).norm() <= tol) { dup = true; break; }
            }
        if (!dup) {
            grid[{gx, gy}].push_back(static_cast<int>(out.size()));
            out.push_back(p);
        }
    }
    return out;
}

std::vector<Point> generate_Vn(const IfsSystem& sys, const std::vector<Point>& v0, int n) {
    sys.validate();
    if (v0.empty()) throw DomainError("generate_Vn: empty V0");
    if (n < 0) throw DomainError("generate_Vn: negative level");
    const double tol = 1e-12 * std::max(diameter(v0), 1e-300);
    std::vector<Point> v = dedup_points(v0, tol);
    for (int k = 0; k < n; ++k) {
        std::vector<Point> image;
        for (auto& m : sys.maps)
            for (const Point& p : v) image.push_back(m(p));
        std::vector<Point> u = dedup_points(image, tol);
        // List V_n first when it is contained in the image (always for p.c.f. sets).
        std::vector<Point> both = v;
        both.insert(both.end(), u.begin(), u.end());
        both = dedup_points(both, tol);
        v = both.size() == u.size() ? both : u;
    }
    return v;
}

void write_points_csv(std::ostream& os, const std::vector<Point>& pts) {
    os << "x,y\n";
    os.precision(17);
    for (auto& p : pts) os << p.x() << ',' << p.y() << '\n';
}

}  // namespace fracspec
