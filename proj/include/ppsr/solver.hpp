#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppsr/bicubic.hpp"
#include "ppsr/cg.hpp"
#include "ppsr/denoiser.hpp"
#include "ppsr/image.hpp"
#include "ppsr/operators.hpp"

namespace ppsr {

// Half-quadratic splitting reconstruction. The data term couples intensity,
// gradient and Laplacian discrepancies on the low-resolution grid; the prior
// enters through a denoiser applied in the z-update, with the penalty
// parameter gamma growing each outer iteration.

struct SolverConfig {
    double lambda1 = 1.0, lambda2 = 1.0, lambda3 = 1.0;
    double gamma0 = 1.0;
    double gamma_growth = 1.3;
    double lambda_reg = 4.0;
    int outer_iters = 12;
    int cg_max_iters = 100;
    double cg_tol = 1e-6;
    bool use_jacobi = false;

    FidelityWeights weights() const { return FidelityWeights{lambda1, lambda2, lambda3}; }

    void validate() const {
        weights().validate();
        if (!(gamma0 > 0.0)) throw std::invalid_argument("solver: gamma0 must be > 0");
        if (!(gamma_growth >= 1.0)) throw std::invalid_argument("solver: gamma_growth must be >= 1");
        if (!(lambda_reg > 0.0)) throw std::invalid_argument("solver: lambda_reg must be > 0");
        if (outer_iters <= 0) throw std::invalid_argument("solver: outer_iters must be positive");
        if (cg_max_iters <= 0) throw std::invalid_argument("solver: cg_max_iters must be positive");
        if (!(cg_tol > 0.0)) throw std::invalid_argument("solver: cg_tol must be > 0");
    }

    // Intensity-only data term.
    static SolverConfig pro_v1() {
        SolverConfig c;
        c.lambda1 = 1.0;
        c.lambda2 = 0.0;
        c.lambda3 = 0.0;
        return c;
    }
    // Joint intensity + gradient + Laplacian data term.
    static SolverConfig pro_v2() {
        SolverConfig c;
        c.lambda1 = 1.0;
        c.lambda2 = 1.0;
        c.lambda3 = 1.0;
        return c;
    }
};

inline void apply_profile(SolverConfig& cfg, const std::string& profile) {
    if (profile == "v1") {
        cfg.lambda1 = 1.0;
        cfg.lambda2 = 0.0;
        cfg.lambda3 = 0.0;
    } else if (profile == "v2") {
        cfg.lambda1 = 1.0;
        cfg.lambda2 = 1.0;
        cfg.lambda3 = 1.0;
    } else {
        throw std::invalid_argument("unknown profile: " + profile + " (expected v1 or v2)");
    }
}

struct SolveIterationRecord {
    int iteration = 0;
    double fidelity = 0.0;   // weighted data-fit value at the current x
    double data_term = 0.0;  // ||y - Wx||^2
    double coupling = 0.0;   // ||z - x||^2 after the z-update
    int cg_iters = 0;
    double cg_residual = 0.0;
};

struct SolveTrace {
    std::vector<SolveIterationRecord> records;
    std::vector<CgResult> cg;  // full per-solve residual histories, same order
};

inline std::string trace_to_csv(const SolveTrace& trace) {
    std::string out = "iteration,fidelity,data_term,coupling,cg_iters,cg_residual\n";
    char line[256];
    for (const SolveIterationRecord& r : trace.records) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%d,%.17g\n", r.iteration,
                      r.fidelity, r.data_term, r.coupling, r.cg_iters, r.cg_residual);
        out += line;
    }
    return out;
}

// Weighted data-fit value: lambda1*||y-Wx||^2 + lambda2*||grad(y-Wx)||^2 +
// lambda3*||lap(y-Wx)||^2, with the derivatives taken on the low-res grid.
inline double fidelity(const Image& x, const Image& y, const OperatorSpec& spec,
                       const FidelityWeights& wts) {
    spec.validate();
    wts.validate();
    const Image d = y - apply_W(x, spec);
    double f = 0.0;
    if (wts.lambda1 > 0.0) f += wts.lambda1 * sq_norm(d);
    if (wts.lambda2 > 0.0) {
        const GradientField g = gradient(d);
        f += wts.lambda2 * (sq_norm(g.dx) + sq_norm(g.dy));
    }
    if (wts.lambda3 > 0.0) f += wts.lambda3 * sq_norm(laplacian(d));
    return f;
}

// One x-update: conjugate gradient on the normal equations
//   (W^T M W + gamma I) x = W^T M y + gamma z,   M = lambda1 I + lambda2 G^T G
//                                                    + lambda3 L^T L,
// warm-started at x_init.
inline std::pair<Image, CgResult> solve_x(const Image& z, const Image& y,
                                          const OperatorSpec& spec, const SolverConfig& cfg,
                                          double gamma, const Image& x_init) {
    if (!(gamma > 0.0)) throw std::invalid_argument("solve_x: gamma must be > 0");
    const FidelityWeights wts = cfg.weights();
    Image b = apply_Wt(apply_lr_metric(y, wts), spec);
    axpy(b, gamma, z);

    Image x = x_init;
    const auto apply_a = [&](const Image& v) { return apply_normal_operator(v, spec, wts, gamma); };
    if (cfg.use_jacobi) {
        const Image diag = normal_operator_diagonal(spec, wts, gamma);
        CgResult stats = conjugate_gradient(apply_a, b, x, cfg.cg_max_iters, cfg.cg_tol, &diag);
        return {std::move(x), std::move(stats)};
    }
    CgResult stats = conjugate_gradient(apply_a, b, x, cfg.cg_max_iters, cfg.cg_tol);
    return {std::move(x), std::move(stats)};
}

// One z-update: denoise at the plug-and-play noise level for the quadratic
// coupling gamma*||z - x||^2.
inline Image solve_z(const Image& x, const SolverConfig& cfg, double gamma,
                     const DenoiserHandle& denoiser) {
    if (!(gamma > 0.0)) throw std::invalid_argument("solve_z: gamma must be > 0");
    const double sigma_eff = std::sqrt(cfg.lambda_reg / (2.0 * gamma));
    return denoise(x, sigma_eff, denoiser);
}

struct ReconstructResult {
    Image x;
    SolveTrace trace;
};

inline ReconstructResult reconstruct(const Image& y, const OperatorSpec& spec,
                                     const SolverConfig& cfg, const DenoiserHandle& denoiser) {
    cfg.validate();
    spec.validate();
    if (y.height() != spec.lr_height() || y.width() != spec.lr_width())
        throw std::invalid_argument("reconstruct: observation does not match operator dimensions");

    Image x = bicubic_upsample(y, spec.factor);
    Image z = x;
    double gamma = cfg.gamma0;
    ReconstructResult result;
    for (int k = 0; k < cfg.outer_iters; ++k) {
        auto [x_next, stats] = solve_x(z, y, spec, cfg, gamma, x);
        x = std::move(x_next);
        z = solve_z(x, cfg, gamma, denoiser);

        SolveIterationRecord rec;
        rec.iteration = k;
        rec.fidelity = fidelity(x, y, spec, cfg.weights());
        rec.data_term = sq_norm(y - apply_W(x, spec));
        rec.coupling = sq_norm(z - x);
        rec.cg_iters = stats.iterations;
        rec.cg_residual = stats.final_residual;
        result.trace.records.push_back(rec);
        result.trace.cg.push_back(std::move(stats));

        gamma *= cfg.gamma_growth;
    }
    result.x = std::move(x);
    return result;
}

}  // namespace ppsr
