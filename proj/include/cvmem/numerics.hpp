// Thin RAII wrappers over GSL: fixed-order Gauss-Legendre rules and the
// nmsimplex2 minimizer.

#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace cvmem::numerics {

namespace detail {
inline void quiet_gsl() {
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}
}  // namespace detail

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    detail::quiet_gsl();
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)), &gsl_integration_glfixed_table_free);
    if (!table) throw std::runtime_error("gauss_legendre: table allocation failed");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        gsl_integration_glfixed_point(a, b, k, &rule.nodes[k], &rule.weights[k], table.get());
    }
    return rule;
}

/// Rule for averaging over the uniform distribution on [-half_width, half_width]
/// (weights sum to one). A zero half-width collapses to a single node.
inline QuadratureRule uniform_average_rule(int n, double half_width) {
    if (half_width == 0.0) return {{0.0}, {1.0}};
    QuadratureRule rule = gauss_legendre(n, -half_width, half_width);
    for (double& w : rule.weights) w /= 2.0 * half_width;
    return rule;
}

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead (GSL nmsimplex2) on `f` from `x0` with initial step sizes
/// `step`. Stops when the simplex size drops below `size_tol` or after
/// `max_evals` function evaluations; the best point seen is returned.
inline MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                  const std::vector<double>& x0, const std::vector<double>& step, int max_evals,
                                  double size_tol = 1e-7) {
    detail::quiet_gsl();
    const std::size_t n = x0.size();
    if (n == 0 || step.size() != n) throw std::invalid_argument("nelder_mead: bad dimensions");

    struct Ctx {
        const std::function<double(const std::vector<double>&)>* f;
        std::vector<double> buf;
        int evals = 0;
        double best = 0.0;
        std::vector<double> best_x;
    } ctx{&f, std::vector<double>(n), 0, 0.0, {}};

    gsl_multimin_function fn;
    fn.n = n;
    fn.params = &ctx;
    fn.f = [](const gsl_vector* v, void* p) -> double {
        auto* c = static_cast<Ctx*>(p);
        for (std::size_t i = 0; i < c->buf.size(); ++i) c->buf[i] = gsl_vector_get(v, i);
        const double y = (*c->f)(c->buf);
        if (c->evals == 0 || y < c->best) {
            c->best = y;
            c->best_x = c->buf;
        }
        ++c->evals;
        return y;
    };

    using VecPtr = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;
    VecPtr x(gsl_vector_alloc(n), &gsl_vector_free);
    VecPtr ss(gsl_vector_alloc(n), &gsl_vector_free);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x.get(), i, x0[i]);
        gsl_vector_set(ss.get(), i, step[i]);
    }
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
    if (!s) throw std::runtime_error("nelder_mead: allocation failed");
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());

    MinimizeResult out;
    while (ctx.evals < max_evals) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tol) == GSL_SUCCESS) {
            out.converged = true;
            break;
        }
    }
    out.x = ctx.best_x;
    out.value = ctx.best;
    out.evaluations = ctx.evals;
    return out;
}

}  // namespace cvmem::numerics
