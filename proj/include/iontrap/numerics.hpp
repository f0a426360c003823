#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

// Small numerical helpers shared by the physics modules: a fixed-step RK4
// driver, sinc, the regularized incomplete gamma function (for chi-square
// p-values), and a Nelder-Mead simplex minimiser.

namespace iontrap::numerics {

/// One classical Runge-Kutta step of y' = f(t, y). State must support
/// addition and scaling (Eigen vectors, std::complex, doubles, ...).
template <typename State, typename Deriv>
State rk4_step(const Deriv& f, double t, const State& y, double h)
{
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double sinc(double x)
{
    if (std::abs(x) < 1e-8) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

namespace detail {

inline double gamma_series(double a, double x)
{
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_cf(double a, double x)
{
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x)
{
    if (a <= 0.0 || x < 0.0)
        throw std::invalid_argument("gamma_p: needs a > 0, x >= 0");
    if (x == 0.0)
        return 0.0;
    if (x < a + 1.0)
        return detail::gamma_series(a, x);
    return 1.0 - detail::gamma_cf(a, x);
}

/// Survival function of the chi-square distribution with dof degrees of
/// freedom, i.e. the p-value of a chi-square test statistic.
inline double chi_square_p_value(double statistic, int dof)
{
    if (dof <= 0)
        throw std::invalid_argument("chi_square_p_value: dof must be positive");
    return 1.0 - gamma_p(0.5 * dof, 0.5 * statistic);
}

/// Derivative-free Nelder-Mead minimisation. Returns the best vertex after
/// the simplex diameter or function spread drops below tol.
inline Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& start, double scale = 1.0,
                                   double tol = 1e-12, int max_iter = 20000)
{
    const int n = static_cast<int>(start.size());
    std::vector<Eigen::VectorXd> verts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i)
        verts[i + 1](i) += scale;
    for (int i = 0; i <= n; ++i)
        vals[i] = f(verts[i]);

    auto order = [&] {
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (vals[j] < vals[i]) {
                    std::swap(vals[i], vals[j]);
                    std::swap(verts[i], verts[j]);
                }
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        double diam = 0.0;
        for (int i = 1; i <= n; ++i)
            diam = std::max(diam, (verts[i] - verts[0]).norm());
        if (diam < tol && std::abs(vals[n] - vals[0]) < tol)
            break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
            centroid += verts[i];
        centroid /= n;

        const Eigen::VectorXd refl = centroid + (centroid - verts[n]);
        const double frefl = f(refl);
        if (frefl < vals[0]) {
            const Eigen::VectorXd exp_v = centroid + 2.0 * (centroid - verts[n]);
            const double fexp = f(exp_v);
            if (fexp < frefl) {
                verts[n] = exp_v;
                vals[n] = fexp;
            } else {
                verts[n] = refl;
                vals[n] = frefl;
            }
        } else if (frefl < vals[n - 1]) {
            verts[n] = refl;
            vals[n] = frefl;
        } else {
            const Eigen::VectorXd contr = centroid + 0.5 * (verts[n] - centroid);
            const double fcontr = f(contr);
            if (fcontr < vals[n]) {
                verts[n] = contr;
                vals[n] = fcontr;
            } else {
                for (int i = 1; i <= n; ++i) {
                    verts[i] = verts[0] + 0.5 * (verts[i] - verts[0]);
                    vals[i] = f(verts[i]);
                }
            }
        }
    }
    order();
    return verts[0];
}

} // namespace iontrap::numerics
