#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ppsr/image.hpp"

namespace ppsr {

/// Outcome of one conjugate-gradient solve.
struct CgResult {
    int iterations = 0;
    double final_residual = 0.0;     // ||b - A x|| from the recursion
    double relative_residual = 0.0;  // final_residual / ||b||
    bool converged = false;
    std::vector<double> residual_norms;  // ||r_k||, entry 0 is the warm-start residual
};

// Conjugate gradient for symmetric positive definite apply_a, warm-started at
// x. Optionally Jacobi-preconditioned with the elementwise inverse of `diag`.
// Stops when ||b - A x|| <= tol * ||b|| or after max_iters iterations.
template <typename LinOp>
CgResult conjugate_gradient(const LinOp& apply_a, const Image& b, Image& x,
                            int max_iters, double tol, const Image* diag = nullptr) {
    if (max_iters <= 0) throw std::invalid_argument("conjugate_gradient: max_iters must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("conjugate_gradient: tol must be > 0");

    CgResult res;
    const double b_norm = norm2(b);
    const double stop = tol * b_norm;

    Image r = b - apply_a(x);
    auto precondition = [&](const Image& v) {
        if (!diag) return v;
        Image z = v;
        for (std::size_t i = 0; i < z.pixels(); ++i) z.data()[i] /= diag->data()[i];
        return z;
    };

    Image z = precondition(r);
    Image p = z;
    double rz = dot(r, z);
    double r_norm = norm2(r);
    res.residual_norms.push_back(r_norm);

    if (!std::isfinite(r_norm))
        throw std::runtime_error("conjugate_gradient: non-finite residual");

    int k = 0;
    while (r_norm > stop && k < max_iters) {
        const Image ap = apply_a(p);
        const double pap = dot(p, ap);
        if (!std::isfinite(pap))
            throw std::runtime_error("conjugate_gradient: non-finite curvature");
        if (pap <= 0.0) break;  // loss of positive definiteness, keep current x
        const double alpha = rz / pap;
        axpy(x, alpha, p);
        axpy(r, -alpha, ap);
        z = precondition(r);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < p.pixels(); ++i)
            p.data()[i] = z.data()[i] + beta * p.data()[i];
        r_norm = norm2(r);
        if (!std::isfinite(r_norm))
            throw std::runtime_error("conjugate_gradient: non-finite residual");
        res.residual_norms.push_back(r_norm);
        ++k;
    }

    res.iterations = k;
    res.final_residual = r_norm;
    res.relative_residual = b_norm > 0.0 ? r_norm / b_norm : (r_norm > 0.0 ? INFINITY : 0.0);
    res.converged = r_norm <= stop;
    return res;
}

}  // namespace ppsr
