#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace robinquad {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Supported sizes: 3, 4, 8, 16, 32, 64. Anything else throws ContractError.
const GaussRule& gauss_rule(int points);

double integrate_interval(const std::function<double(double)>& f, double a, double b, int points);

// Integral over the triangle (p0, p1, p2) using a collapsed tensor rule.
double integrate_triangle(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& p0,
                          const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, int points);

// Line integral along the segment [a, b].
double integrate_segment(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b, int points);

}  // namespace robinquad
