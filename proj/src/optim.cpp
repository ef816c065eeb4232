#include "optbench/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace optbench {

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

std::vector<double> numeric_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                     double step) {
    const std::size_t n = x.size();
    std::vector<double> g(n);
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = step * std::max(1.0, std::fabs(x[i]));
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = f(xp);
        xp[i] = xi - h;
        const double fm = f(xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<std::vector<double>> numeric_hessian(const ObjectiveFn& f,
                                                 const std::vector<double>& x,
                                                 double step) {
    const std::size_t n = x.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = step * std::max(1.0, std::fabs(x[i]));
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    const double f0 = f(x);
    std::vector<double> xp = x;
    // Diagonal.
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        xp[i] = xi + h[i];
        const double fp = f(xp);
        xp[i] = xi - h[i];
        const double fm = f(xp);
        xp[i] = xi;
        H[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    // Off-diagonal, four-point formula.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double xi = x[i], xj = x[j];
            xp[i] = xi + h[i]; xp[j] = xj + h[j];
            const double fpp = f(xp);
            xp[j] = xj - h[j];
            const double fpm = f(xp);
            xp[i] = xi - h[i]; xp[j] = xj + h[j];
            const double fmp = f(xp);
            xp[j] = xj - h[j];
            const double fmm = f(xp);
            xp[i] = xi; xp[j] = xj;
            H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return H;
}

LbfgsResult lbfgs_minimize(const ObjectiveFn& f, std::vector<double> x,
                           const LbfgsOptions& opts) {
    const std::size_t n = x.size();
    LbfgsResult res;
    double fx = f(x);
    std::vector<double> g = numeric_gradient(f, x, opts.fd_step);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        res.grad_norm = inf_norm(g);
        if (res.grad_norm < opts.grad_tolerance) {
            res.converged = true;
            break;
        }

        // Two-loop recursion for the search direction.
        std::vector<double> q = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            alpha[k] = rho_hist[k] * dot(s_hist[k], q);
            for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y_hist[k][i];
        }
        double gamma = 1.0;
        if (!s_hist.empty()) {
            const double yy = dot(y_hist.back(), y_hist.back());
            if (yy > 0) gamma = dot(s_hist.back(), y_hist.back()) / yy;
        }
        for (double& qi : q) qi *= gamma;
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * dot(y_hist[k], q);
            for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * s_hist[k][i];
        }
        std::vector<double> dir(n);
        for (std::size_t i = 0; i < n; ++i) dir[i] = -q[i];

        double dg = dot(dir, g);
        if (!(dg < 0)) { // not a descent direction: fall back to steepest descent
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            dg = -dot(g, g);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            if (dg == 0) {
                res.converged = true;
                break;
            }
        }

        // Backtracking Armijo line search with quadratic interpolation.
        const double c1 = 1e-4;
        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        std::vector<double> x_new(n);
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= fx + c1 * step * dg) {
                ok = true;
                break;
            }
            double next = 0.5 * step;
            if (std::isfinite(f_new)) {
                // Minimizer of the quadratic through (0,fx,dg) and (step,f_new).
                const double denom = 2.0 * (f_new - fx - dg * step);
                if (denom > 0) {
                    const double q_step = -dg * step * step / denom;
                    if (q_step > 0.05 * step && q_step < 0.95 * step) next = q_step;
                }
            }
            step = next;
        }
        if (!ok) break; // line search failed; report best-so-far

        std::vector<double> g_new = numeric_gradient(f, x_new, opts.fd_step);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * dot(y, y)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double f_change = std::fabs(fx - f_new) / std::max(1.0, std::fabs(fx));
        x = std::move(x_new);
        fx = f_new;
        g = std::move(g_new);
        if (f_change < opts.f_rel_tolerance) {
            res.grad_norm = inf_norm(g);
            res.converged = true;
            break;
        }
    }
    res.x = std::move(x);
    res.f = fx;
    res.grad_norm = inf_norm(g);
    return res;
}

} // namespace optbench
