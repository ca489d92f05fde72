#include "wsf/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsf {

namespace {

void check_grid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("interp: need >= 2 matching nodes");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw std::invalid_argument("interp: abscissae must be strictly increasing");
}

std::size_t bracket(const std::vector<double>& x, double q) {
    // interval index i with x[i] <= q <= x[i+1], clamped to the span
    auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i == 0) return 0;
    if (i >= x.size()) return x.size() - 2;
    return i - 1;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    check_grid(x_, y_);
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            // Brodlie weighted harmonic mean, keeps the interpolant monotone
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // clamp endpoint slopes (Fritsch-Carlson condition)
    if (m_[0] * d[0] <= 0.0) m_[0] = 0.0;
    else if (std::abs(m_[0]) > 3.0 * std::abs(d[0])) m_[0] = 3.0 * d[0];
    if (m_[n - 1] * d[n - 2] <= 0.0) m_[n - 1] = 0.0;
    else if (std::abs(m_[n - 1]) > 3.0 * std::abs(d[n - 2])) m_[n - 1] = 3.0 * d[n - 2];
}

double MonotoneCubic::operator()(double q) const {
    const std::size_t i = bracket(x_, q);
    const double h = x_[i + 1] - x_[i];
    const double t = (q - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

std::vector<double> MonotoneCubic::eval(const std::vector<double>& q) const {
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = (*this)(q[i]);
    return out;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    check_grid(x_, y_);
    const std::size_t n = x_.size();
    c2_.assign(n, 0.0);
    if (n == 2) return;
    // tridiagonal solve for natural spline second derivatives
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    diag[0] = diag[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double hr = x_[i + 1] - x_[i];
        sub[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        sup[i] = hr / 6.0;
        rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    c2_[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        c2_[i] = (rhs[i] - sup[i] * c2_[i + 1]) / diag[i];
}

CubicSpline::CubicSpline(double x0, double dx, std::vector<double> y) {
    if (y.size() < 2 || !(dx > 0.0))
        throw std::invalid_argument("CubicSpline: need >= 2 nodes and dx > 0");
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0 + dx * static_cast<double>(i);
    *this = CubicSpline(std::move(x), std::move(y));
    uniform_ = true;
    x0_ = x0;
    dx_ = dx;
    x_.clear();  // locate() uses arithmetic on uniform grids
}

std::size_t CubicSpline::locate(double q) const {
    if (uniform_) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y_.size());
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor((q - x0_) / dx_));
        if (i < 0) i = 0;
        if (i > n - 2) i = n - 2;
        return static_cast<std::size_t>(i);
    }
    return bracket(x_, q);
}

double CubicSpline::x_front() const { return uniform_ ? x0_ : x_.front(); }
double CubicSpline::x_back() const {
    return uniform_ ? x0_ + dx_ * static_cast<double>(y_.size() - 1) : x_.back();
}

double CubicSpline::operator()(double q) const {
    const std::size_t i = locate(q);
    const double xl = uniform_ ? x0_ + dx_ * static_cast<double>(i) : x_[i];
    const double h = uniform_ ? dx_ : x_[i + 1] - x_[i];
    const double a = (xl + h - q) / h;
    const double b = (q - xl) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * c2_[i] + (b * b * b - b) * c2_[i + 1]) * (h * h) / 6.0;
}

std::vector<double> CubicSpline::eval(const std::vector<double>& q) const {
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = (*this)(q[i]);
    return out;
}

}  // namespace wsf
