#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "fracspec/error.hpp"

namespace fracspec {

using Point = Eigen::Vector2d;

// F(x) = b + alpha * R (x - b); b is the fixed point.
struct Similitude {
    Point b;
    double alpha;
    Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();

    Point operator()(const Point& x) const { return b + alpha * (rotation * (x - b)); }
};

struct IfsSystem {
    std::vector<Similitude> maps;

    int size() const { return static_cast<int>(maps.size()); }
    std::vector<double> ratios() const;
    void validate() const;
};

// Letters are 1-based. An optional repeated letter encodes the infinite tail.
struct Address {
    std::vector<int> prefix;
    std::optional<int> repeat;
};

IfsSystem sg_system();
std::vector<Point> sg_boundary();

double hausdorff_dim(const std::vector<double>& ratios);

// Exact for eventually constant words; finite words start from x0 (default b_1).
Point address_to_point(const IfsSystem& sys, const Address& addr);
Point address_to_point(const IfsSystem& sys, const std::vector<int>& word, const Point& x0);

double cylinder_measure(const IfsSystem& sys, const std::vector<int>& prefix);

double diameter(const std::vector<Point>& pts);

std::vector<Point> generate_Vn(const IfsSystem& sys, const std::vector<Point>& v0, int n);

// Dedup with an absolute tolerance, keeping first occurrences.
std::vector<Point> dedup_points(const std::vector<Point>& pts, double tol);

void write_points_csv(std::ostream& os, const std::vector<Point>& pts);

}  // namespace fracspec
