#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sea {

/// Natural cubic spline (zero second derivative at both ends) through
/// strictly increasing knots. Between knots i and i+1, with h = t - t_i:
///   y(t) = a_i + b_i h + c_i h^2 + d_i h^3
class NaturalCubicSpline {
public:
    struct Value {
        double y, dy, d2y;
    };

    NaturalCubicSpline(std::span<const double> t, std::span<const double> y) : t_(t.begin(), t.end()) {
        const std::size_t n = t.size();
        if (n != y.size()) throw std::invalid_argument("spline: knot and value counts differ");
        if (n < 2) throw std::invalid_argument("spline: need at least two knots");
        for (std::size_t i = 1; i < n; ++i)
            if (!(t[i] > t[i - 1])) throw std::invalid_argument("spline: knots must be strictly increasing");

        a_.assign(y.begin(), y.end());
        b_.assign(n, 0.0);
        c_.assign(n, 0.0);
        d_.assign(n, 0.0);

        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = t[i + 1] - t[i];

        // Tridiagonal system for the interior second-derivative coefficients
        // c_1..c_{n-2}; c_0 = c_{n-1} = 0. Thomas algorithm.
        if (n > 2) {
            const std::size_t m = n - 2;
            std::vector<double> diag(m), upper(m), rhs(m);
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t i = k + 1;
                diag[k] = 2.0 * (h[i - 1] + h[i]);
                upper[k] = h[i];
                rhs[k] = 3.0 * ((a_[i + 1] - a_[i]) / h[i] - (a_[i] - a_[i - 1]) / h[i - 1]);
            }
            for (std::size_t k = 1; k < m; ++k) {
                const double w = h[k] / diag[k - 1];  // sub-diagonal entry of row k is h[k]
                diag[k] -= w * upper[k - 1];
                rhs[k] -= w * rhs[k - 1];
            }
            c_[m] = rhs[m - 1] / diag[m - 1];
            for (std::size_t k = m - 1; k-- > 0;) c_[k + 1] = (rhs[k] - upper[k] * c_[k + 2]) / diag[k];
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            b_[i] = (a_[i + 1] - a_[i]) / h[i] - h[i] * (2.0 * c_[i] + c_[i + 1]) / 3.0;
            d_[i] = (c_[i + 1] - c_[i]) / (3.0 * h[i]);
        }
    }

    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }
    std::size_t size() const { return t_.size(); }

    /// Inside [t_min, t_max] only; callers handle the outside.
    Value operator()(double t) const {
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        if (i >= t_.size() - 1) i = t_.size() - 2;
        const double h = t - t_[i];
        return {a_[i] + h * (b_[i] + h * (c_[i] + h * d_[i])), b_[i] + h * (2.0 * c_[i] + 3.0 * h * d_[i]),
                2.0 * c_[i] + 6.0 * h * d_[i]};
    }

    const std::vector<double>& knots() const { return t_; }
    const std::vector<double>& coeff_a() const { return a_; }
    const std::vector<double>& coeff_b() const { return b_; }
    const std::vector<double>& coeff_c() const { return c_; }
    const std::vector<double>& coeff_d() const { return d_; }

private:
    std::vector<double> t_, a_, b_, c_, d_;
};

}  // namespace sea
