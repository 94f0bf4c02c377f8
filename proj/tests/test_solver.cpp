// Half-quadratic splitting solver: x-step exactness against dense oracles,
// z-step mapping, trace bookkeeping, and end-to-end reconstruction behavior.
#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ppsr/ppsr.hpp"

using namespace ppsr;

namespace {

Image random_image(int h, int w, std::uint64_t seed, double mean = 0.0, double scale = 1.0) {
    Image img(h, w);
    NormalSampler rng(seed);
    for (double& v : img.data()) v = mean + scale * rng.normal();
    return img;
}

Eigen::VectorXd flatten(const Image& img) {
    Eigen::VectorXd v(img.pixels());
    for (std::size_t i = 0; i < img.pixels(); ++i) v[long(i)] = img.data()[i];
    return v;
}

Image standard_crop() {
    return load_image(std::string(PPSR_DATA_PATH) + "/discs64.pgm");
}

// The degradation used by the reconstruction tests: 3x3 Gaussian blur
// (sigma 1), factor-2 decimation, noise sigma 1.
DegradationSpec standard_degradation(std::uint64_t seed) {
    DegradationSpec d;
    d.kernel_type = KernelType::gaussian;
    d.kernel_size = 3;
    d.kernel_sigma = 1.0;
    d.factor = 2;
    d.noise_sigma = 1.0;
    d.seed = seed;
    return d;
}

}  // namespace

TEST(SolverConfig, ValidationAndProfiles) {
    SolverConfig cfg;
    EXPECT_NO_THROW(cfg.validate());

    SolverConfig bad = cfg;
    bad.gamma0 = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.gamma_growth = 0.9;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.lambda1 = -1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.outer_iters = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);

    const SolverConfig v1 = SolverConfig::pro_v1();
    EXPECT_EQ(v1.lambda1, 1.0);
    EXPECT_EQ(v1.lambda2, 0.0);
    EXPECT_EQ(v1.lambda3, 0.0);
    const SolverConfig v2 = SolverConfig::pro_v2();
    EXPECT_EQ(v2.lambda1, 1.0);
    EXPECT_EQ(v2.lambda2, 1.0);
    EXPECT_EQ(v2.lambda3, 1.0);

    SolverConfig p;
    p.lambda2 = 0.25;
    apply_profile(p, "v1");
    EXPECT_EQ(p.lambda2, 0.0);
    apply_profile(p, "v2");
    EXPECT_EQ(p.lambda2, 1.0);
    EXPECT_THROW(apply_profile(p, "v3"), std::invalid_argument);
}

TEST(SolveX, ClosedFormIdentityProblem) {
    // Identity kernel, factor 1, intensity-only weights, gamma = 1:
    // (I + I) x = y + z, so x = (y + z) / 2.
    OperatorSpec spec;
    spec.factor = 1;
    spec.hr_height = 8;
    spec.hr_width = 8;
    spec.kernel = identity_kernel();

    SolverConfig cfg = SolverConfig::pro_v1();
    cfg.cg_tol = 1e-12;
    const Image y = random_image(8, 8, 21, 100.0, 20.0);
    const Image z = random_image(8, 8, 22, 100.0, 20.0);
    const Image x0(8, 8, 0.0);
    const auto [x, stats] = solve_x(z, y, spec, cfg, 1.0, x0);
    EXPECT_TRUE(stats.converged);
    for (std::size_t i = 0; i < x.pixels(); ++i)
        EXPECT_NEAR(x.data()[i], 0.5 * (y.data()[i] + z.data()[i]), 1e-9);
}

TEST(SolveX, MatchesDenseSolveAcrossFactorsAndKernels) {
    // 8x8 high-resolution unknowns, every (factor, kernel) combination.
    const std::vector<Kernel> kernels = {identity_kernel(),
                                         make_kernel(KernelType::gaussian, 3, 1.0),
                                         make_kernel(KernelType::average, 3, 1.0)};
    NormalSampler rng(23);
    for (int s : {1, 2}) {
        for (const Kernel& k : kernels) {
            OperatorSpec spec;
            spec.factor = s;
            spec.hr_height = 8;
            spec.hr_width = 8;
            spec.kernel = k;

            SolverConfig cfg;  // joint weights
            cfg.cg_max_iters = 500;
            cfg.cg_tol = 1e-12;
            const double gamma = 0.7;

            const Image y = random_image(spec.lr_height(), spec.lr_width(), rng.next_u64(), 100.0,
                                         25.0);
            const Image z = random_image(8, 8, rng.next_u64(), 100.0, 25.0);

            // Dense oracle: materialize A and b.
            const FidelityWeights wts = cfg.weights();
            Eigen::MatrixXd a_mat(64, 64);
            for (int col = 0; col < 64; ++col) {
                Image e(8, 8, 0.0);
                e.data()[std::size_t(col)] = 1.0;
                const Image out = apply_normal_operator(e, spec, wts, gamma);
                for (int r = 0; r < 64; ++r) a_mat(r, col) = out.data()[std::size_t(r)];
            }
            Image b_img = apply_Wt(apply_lr_metric(y, wts), spec);
            axpy(b_img, gamma, z);
            const Eigen::VectorXd x_dense = a_mat.ldlt().solve(flatten(b_img));

            const auto [x, stats] = solve_x(z, y, spec, cfg, gamma, Image(8, 8, 0.0));
            EXPECT_TRUE(stats.converged);
            EXPECT_LE((flatten(x) - x_dense).norm() / x_dense.norm(), 1e-6)
                << "factor " << s << " kernel size " << k.size;
        }
    }
}

TEST(SolveX, WarmStartIsBitDeterministic) {
    const Image hr = standard_crop();
    const DegradationSpec d = standard_degradation(7);
    const Image y = degrade(hr, d);
    const OperatorSpec spec = operator_spec_for(d, hr.height(), hr.width());
    const SolverConfig cfg;
    const Image z = bicubic_upsample(y, d.factor);

    const auto [x1, s1] = solve_x(z, y, spec, cfg, cfg.gamma0, z);
    const auto [x2, s2] = solve_x(z, y, spec, cfg, cfg.gamma0, z);
    ASSERT_EQ(x1.pixels(), x2.pixels());
    for (std::size_t i = 0; i < x1.pixels(); ++i) EXPECT_EQ(x1.data()[i], x2.data()[i]);
    EXPECT_EQ(s1.iterations, s2.iterations);
    EXPECT_EQ(s1.final_residual, s2.final_residual);
    EXPECT_EQ(s1.residual_norms, s2.residual_norms);
}

TEST(SolveX, JacobiVariantAgreesWithPlain) {
    const Image hr = standard_crop();
    const DegradationSpec d = standard_degradation(8);
    const Image y = degrade(hr, d);
    const OperatorSpec spec = operator_spec_for(d, hr.height(), hr.width());
    SolverConfig plain;
    plain.cg_tol = 1e-10;
    plain.cg_max_iters = 500;
    SolverConfig jacobi = plain;
    jacobi.use_jacobi = true;
    const Image z = bicubic_upsample(y, d.factor);

    const auto [xp, sp] = solve_x(z, y, spec, plain, 1.0, z);
    const auto [xj, sj] = solve_x(z, y, spec, jacobi, 1.0, z);
    EXPECT_TRUE(sp.converged);
    EXPECT_TRUE(sj.converged);
    EXPECT_LE(norm2(xp - xj) / norm2(xp), 1e-7);
}

TEST(SolveZ, AppliesPlugAndPlayNoiseLevel) {
    const Image x = random_image(16, 16, 31, 128.0, 12.0);
    SolverConfig cfg;
    cfg.lambda_reg = 2.0;
    const double gamma = 0.25;
    const double sigma_eff = std::sqrt(cfg.lambda_reg / (2.0 * gamma));

    const DenoiserHandle g = gaussian_denoiser();
    const Image via_solver = solve_z(x, cfg, gamma, g);
    const Image direct = denoise(x, sigma_eff, g);
    for (std::size_t i = 0; i < x.pixels(); ++i)
        EXPECT_EQ(via_solver.data()[i], direct.data()[i]);

    // Identity denoiser: the z-step is a no-op at any gamma.
    const Image id = solve_z(x, cfg, gamma, identity_denoiser());
    for (std::size_t i = 0; i < x.pixels(); ++i) EXPECT_EQ(id.data()[i], x.data()[i]);
}

TEST(SolveZ, SigmaEffHalvesEnergyWithGammaDoubling) {
    // sigma_eff = sqrt(lambda_reg / (2 gamma)): doubling gamma divides it by
    // sqrt(2). Verified through the Gaussian denoiser's kernel width, which
    // is monotone in sigma_eff.
    const Image x = random_image(24, 24, 33, 128.0, 15.0);
    SolverConfig cfg;
    cfg.lambda_reg = 8.0;
    const Image z1 = solve_z(x, cfg, 1.0, gaussian_denoiser());
    const Image z2 = solve_z(x, cfg, 2.0, gaussian_denoiser());
    // Larger gamma -> smaller sigma_eff -> weaker smoothing -> z closer to x.
    EXPECT_LT(norm2(z2 - x), norm2(z1 - x));
}

TEST(Fidelity, MatchesManualComputation) {
    const Image hr = random_image(8, 8, 41, 120.0, 18.0);
    OperatorSpec spec;
    spec.factor = 2;
    spec.hr_height = 8;
    spec.hr_width = 8;
    spec.kernel = make_kernel(KernelType::gaussian, 3, 1.0);
    const Image y = random_image(4, 4, 42, 120.0, 18.0);

    const FidelityWeights wts{0.5, 2.0, 3.0};
    const Image d = y - apply_W(hr, spec);
    const GradientField g = gradient(d);
    const double expected =
        0.5 * sq_norm(d) + 2.0 * (sq_norm(g.dx) + sq_norm(g.dy)) + 3.0 * sq_norm(laplacian(d));
    EXPECT_NEAR(fidelity(hr, y, spec, wts), expected, 1e-9);

    // Intensity-only weights reduce to the plain squared error.
    EXPECT_NEAR(fidelity(hr, y, spec, FidelityWeights{1.0, 0.0, 0.0}), sq_norm(d), 1e-9);
}

TEST(Reconstruct, TraceHasOneRecordPerOuterIteration) {
    const Image hr = standard_crop();
    const DegradationSpec d = standard_degradation(51);
    const Image y = degrade(hr, d);
    const OperatorSpec spec = operator_spec_for(d, hr.height(), hr.width());
    SolverConfig cfg;
    cfg.outer_iters = 5;
    const ReconstructResult r = reconstruct(y, spec, cfg, tv_denoiser());
    ASSERT_EQ(r.trace.records.size(), 5u);
    ASSERT_EQ(r.trace.cg.size(), 5u);
    for (int k = 0; k < 5; ++k) {
        EXPECT_EQ(r.trace.records[std::size_t(k)].iteration, k);
        EXPECT_EQ(r.trace.records[std::size_t(k)].cg_iters,
                  r.trace.cg[std::size_t(k)].iterations);
        EXPECT_GE(r.trace.records[std::size_t(k)].coupling, 0.0);
        EXPECT_GE(r.trace.records[std::size_t(k)].fidelity, 0.0);
    }
    EXPECT_EQ(r.x.height(), hr.height());
    EXPECT_EQ(r.x.width(), hr.width());
    EXPECT_TRUE(r.x.all_finite());
}

TEST(Reconstruct, NoiseFreeIdentityProblemDoesNotDegrade) {
    // Identity degradation without noise: the observation already equals the
    // truth, and the solver must not move away from it.
    const Image x_true = random_image(16, 16, 61, 128.0, 20.0);
    DegradationSpec d;
    d.factor = 1;
    d.kernel_size = 1;
    d.noise_sigma = 0.0;
    const Image y = degrade(x_true, d);
    const OperatorSpec spec = operator_spec_for(d, 16, 16);
    const ReconstructResult r = reconstruct(y, spec, SolverConfig{}, identity_denoiser());
    EXPECT_GE(psnr(x_true, r.x), psnr(x_true, y));  // both may be infinite
    EXPECT_LE(norm2(r.x - x_true) / norm2(x_true), 1e-6);
}

TEST(Reconstruct, DeterministicEndToEnd) {
    const Image hr = standard_crop();
    const DegradationSpec d = standard_degradation(71);
    const Image y = degrade(hr, d);
    const OperatorSpec spec = operator_spec_for(d, hr.height(), hr.width());
    SolverConfig cfg;
    cfg.outer_iters = 4;
    const ReconstructResult r1 = reconstruct(y, spec, cfg, tv_denoiser());
    const ReconstructResult r2 = reconstruct(y, spec, cfg, tv_denoiser());
    for (std::size_t i = 0; i < r1.x.pixels(); ++i) EXPECT_EQ(r1.x.data()[i], r2.x.data()[i]);
    ASSERT_EQ(r1.trace.records.size(), r2.trace.records.size());
    for (std::size_t k = 0; k < r1.trace.records.size(); ++k) {
        EXPECT_EQ(r1.trace.records[k].fidelity, r2.trace.records[k].fidelity);
        EXPECT_EQ(r1.trace.records[k].cg_residual, r2.trace.records[k].cg_residual);
    }
}

TEST(Reconstruct, ImprovesOverBicubicOnStandardProblem) {
    const Image hr = standard_crop();
    const DegradationSpec d = standard_degradation(fnv1a64(std::string("discs64.pgm|crit3")));
    const Image y = degrade(hr, d);
    const OperatorSpec spec = operator_spec_for(d, hr.height(), hr.width());
    const ReconstructResult r = reconstruct(y, spec, SolverConfig{}, tv_denoiser());
    EXPECT_GT(psnr(hr, r.x), psnr(hr, bicubic_upsample(y, d.factor)));
}

TEST(Reconstruct, CouplingAndFidelityDecayOnStandardProblem) {
    // Default configuration on the standard problem: the recorded coupling
    // ||z - x||^2 and the data-fit value both end at or below their first
    // recorded values as gamma grows.
    const Image hr = standard_crop();
    const DegradationSpec d = standard_degradation(fnv1a64(std::string("discs64.pgm|crit3")));
    const Image y = degrade(hr, d);
    const OperatorSpec spec = operator_spec_for(d, hr.height(), hr.width());
    const ReconstructResult r = reconstruct(y, spec, SolverConfig{}, tv_denoiser());
    const auto& rec = r.trace.records;
    ASSERT_GE(rec.size(), 2u);
    EXPECT_LE(rec.back().coupling, rec.front().coupling);
    EXPECT_LE(rec.back().fidelity, rec.front().fidelity);
}

TEST(Reconstruct, RecordedCgResidualsAreMonotone) {
    const Image hr = standard_crop();
    const DegradationSpec d = standard_degradation(fnv1a64(std::string("discs64.pgm|crit3")));
    const Image y = degrade(hr, d);
    const OperatorSpec spec = operator_spec_for(d, hr.height(), hr.width());
    for (const SolverConfig& cfg : {SolverConfig::pro_v1(), SolverConfig::pro_v2()}) {
        const ReconstructResult r = reconstruct(y, spec, cfg, tv_denoiser());
        for (const CgResult& cg : r.trace.cg)
            for (std::size_t i = 1; i < cg.residual_norms.size(); ++i)
                EXPECT_LE(cg.residual_norms[i], cg.residual_norms[i - 1] + 1e-12);
    }
}

TEST(Reconstruct, ValidatesObservationDimensions) {
    OperatorSpec spec;
    spec.factor = 2;
    spec.hr_height = 8;
    spec.hr_width = 8;
    spec.kernel = identity_kernel();
    const Image wrong(3, 4, 0.0);
    EXPECT_THROW(reconstruct(wrong, spec, SolverConfig{}, identity_denoiser()),
                 std::invalid_argument);
}

TEST(Trace, CsvRoundTripsExactly) {
    SolveTrace trace;
    SolveIterationRecord r0;
    r0.iteration = 0;
    r0.fidelity = 12345.678901234567;
    r0.data_term = 1.0 / 3.0;
    r0.coupling = 2.0e-17;
    r0.cg_iters = 42;
    r0.cg_residual = 9.87654321e-7;
    trace.records.push_back(r0);

    const std::string csv = trace_to_csv(trace);
    std::istringstream in(csv);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "iteration,fidelity,data_term,coupling,cg_iters,cg_residual");
    ASSERT_TRUE(bool(std::getline(in, line)));

    // %.17g fields parse back to bit-identical doubles.
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    ASSERT_EQ(fields.size(), 6u);
    EXPECT_EQ(std::stoi(fields[0]), 0);
    EXPECT_EQ(std::stod(fields[1]), r0.fidelity);
    EXPECT_EQ(std::stod(fields[2]), r0.data_term);
    EXPECT_EQ(std::stod(fields[3]), r0.coupling);
    EXPECT_EQ(std::stoi(fields[4]), 42);
    EXPECT_EQ(std::stod(fields[5]), r0.cg_residual);
}

TEST(Bicubic, FactorOneIsIdentity) {
    const Image a = random_image(9, 7, 81, 100.0, 30.0);
    const Image up = bicubic_upsample(a, 1);
    ASSERT_TRUE(up.same_size(a));
    for (std::size_t i = 0; i < a.pixels(); ++i) EXPECT_EQ(up.data()[i], a.data()[i]);
}

TEST(Bicubic, ReproducesConstantAndPreservesSize) {
    const Image c(6, 5, 42.0);
    const Image up = bicubic_upsample(c, 3);
    EXPECT_EQ(up.height(), 18);
    EXPECT_EQ(up.width(), 15);
    for (double v : up.data()) EXPECT_NEAR(v, 42.0, 1e-12);
}

TEST(Bicubic, PhaseZeroCopiesSourcePixels) {
    // The upsampling grid is phase-aligned: output pixel (s i, s j) equals
    // source pixel (i, j) exactly, matching the decimation phase.
    const Image a = random_image(5, 6, 83, 100.0, 30.0);
    const Image up = bicubic_upsample(a, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 6; ++j) EXPECT_EQ(up(3 * i, 3 * j), a(i, j));
}

TEST(Bicubic, InterpolatesSmoothRampExactly) {
    // Catmull-Rom has linear precision: away from the circular seam it
    // reproduces a linear ramp exactly.
    Image ramp(4, 16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 16; ++j) ramp(i, j) = double(j);
    const Image up = bicubic_upsample(ramp, 2);
    for (int j = 8; j < 20; ++j) EXPECT_NEAR(up(4, j), j / 2.0, 1e-9);
}
