#pragma once

#include <cstddef>
#include <vector>

namespace wsf {

// Shape-preserving piecewise cubic (Fritsch-Carlson). Monotone data gives a
// monotone interpolant.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double q) const;
    std::vector<double> eval(const std::vector<double>& q) const;
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;  // m_: endpoint slopes per node
};

// Natural cubic spline.
class CubicSpline {
public:
    CubicSpline(std::vector<double> x, std::vector<double> y);
    // Uniform-grid convenience: x = x0 + i*dx.
    CubicSpline(double x0, double dx, std::vector<double> y);
    double operator()(double q) const;
    std::vector<double> eval(const std::vector<double>& q) const;
    double x_front() const;
    double x_back() const;

private:
    bool uniform_ = false;
    double x0_ = 0.0, dx_ = 1.0;
    std::vector<double> x_, y_, c2_;  // c2_: second derivatives per node
    std::size_t locate(double q) const;
};

}  // namespace wsf
