// Blur-kernel construction and the seeded degradation simulator.
#include <gtest/gtest.h>

#include <cmath>

#include "ppsr/degradation.hpp"
#include "ppsr/image.hpp"
#include "ppsr/operators.hpp"
#include "ppsr/rng.hpp"
#include "ppsr/util.hpp"

using namespace ppsr;

namespace {

Image random_image(int h, int w, std::uint64_t seed) {
    Image img(h, w);
    NormalSampler rng(seed);
    for (double& v : img.data()) v = 128.0 + 30.0 * rng.normal();
    return img;
}

}  // namespace

TEST(Kernels, AverageIsUniform) {
    for (int size : {1, 3, 5}) {
        const Kernel k = make_kernel(KernelType::average, size, 1.0);
        EXPECT_EQ(k.size, size);
        for (double t : k.taps) EXPECT_DOUBLE_EQ(t, 1.0 / (size * size));
    }
}

TEST(Kernels, GaussianIsNormalizedSymmetricAndPeaked) {
    const Kernel k = make_kernel(KernelType::gaussian, 5, 1.3);
    double sum = 0.0;
    for (double t : k.taps) sum += t;
    EXPECT_NEAR(sum, 1.0, 1e-12);

    // 8-fold symmetry and center peak.
    for (int u = 0; u < 5; ++u)
        for (int v = 0; v < 5; ++v) {
            EXPECT_DOUBLE_EQ(k.at(u, v), k.at(4 - u, v));
            EXPECT_DOUBLE_EQ(k.at(u, v), k.at(u, 4 - v));
            EXPECT_DOUBLE_EQ(k.at(u, v), k.at(v, u));
            EXPECT_LE(k.at(u, v), k.at(2, 2));
        }

    // Known ratio: tap one step from center is exp(-1/(2 sigma^2)) of center.
    const Kernel g = make_kernel(KernelType::gaussian, 3, 1.0);
    EXPECT_NEAR(g.at(1, 0) / g.at(1, 1), std::exp(-0.5), 1e-12);
    EXPECT_NEAR(g.at(0, 0) / g.at(1, 1), std::exp(-1.0), 1e-12);
}

TEST(Kernels, WideGaussianApproachesAverage) {
    const Kernel g = make_kernel(KernelType::gaussian, 3, 1000.0);
    for (double t : g.taps) EXPECT_NEAR(t, 1.0 / 9.0, 1e-5);
}

TEST(Kernels, ConstructionValidation) {
    EXPECT_THROW(make_kernel(KernelType::gaussian, 2, 1.0), std::invalid_argument);
    EXPECT_THROW(make_kernel(KernelType::gaussian, -3, 1.0), std::invalid_argument);
    EXPECT_THROW(make_kernel(KernelType::gaussian, 3, 0.0), std::invalid_argument);
    EXPECT_THROW(make_kernel(KernelType::gaussian, 3, -1.0), std::invalid_argument);
    EXPECT_NO_THROW(make_kernel(KernelType::average, 3, 0.0));  // sigma unused
}

TEST(Kernels, TypeNames) {
    EXPECT_EQ(to_string(KernelType::gaussian), "gaussian");
    EXPECT_EQ(to_string(KernelType::average), "average");
    EXPECT_EQ(kernel_type_from_string("gaussian"), KernelType::gaussian);
    EXPECT_EQ(kernel_type_from_string("average"), KernelType::average);
    EXPECT_THROW(kernel_type_from_string("box"), std::invalid_argument);
}

TEST(Degradation, SpecValidation) {
    DegradationSpec spec;
    EXPECT_NO_THROW(spec.validate());
    spec.factor = 0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = DegradationSpec{};
    spec.kernel_size = 4;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = DegradationSpec{};
    spec.noise_sigma = -1.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Degradation, CropToMultiple) {
    const Image a = random_image(7, 10, 1);
    const Image c = crop_to_multiple(a, 4);
    EXPECT_EQ(c.height(), 4);
    EXPECT_EQ(c.width(), 8);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j) EXPECT_EQ(c(i, j), a(i, j));

    // Already a multiple: unchanged.
    const Image b = crop_to_multiple(a, 1);
    EXPECT_TRUE(b.same_size(a));
    EXPECT_THROW(crop_to_multiple(Image(3, 3), 4), std::invalid_argument);
}

TEST(Degradation, NoiseFreeMatchesOperatorExactly) {
    const Image x = random_image(12, 16, 2);
    DegradationSpec spec;
    spec.kernel_type = KernelType::gaussian;
    spec.kernel_size = 3;
    spec.kernel_sigma = 1.0;
    spec.factor = 2;
    spec.noise_sigma = 0.0;
    const Image y = degrade(x, spec);
    const Image expected = apply_W(x, operator_spec_for(spec, 12, 16));
    ASSERT_TRUE(y.same_size(expected));
    for (std::size_t i = 0; i < y.pixels(); ++i) EXPECT_EQ(y.data()[i], expected.data()[i]);
}

TEST(Degradation, CropsNonMultipleInputs) {
    const Image x = random_image(13, 15, 3);
    DegradationSpec spec;
    spec.factor = 2;
    spec.noise_sigma = 0.0;
    const Image y = degrade(x, spec);
    EXPECT_EQ(y.height(), 6);
    EXPECT_EQ(y.width(), 7);
}

TEST(Degradation, SeededNoiseIsDeterministic) {
    const Image x = random_image(8, 8, 4);
    DegradationSpec spec;
    spec.factor = 2;
    spec.noise_sigma = 3.0;
    spec.seed = 12345;
    const Image y1 = degrade(x, spec);
    const Image y2 = degrade(x, spec);
    for (std::size_t i = 0; i < y1.pixels(); ++i) EXPECT_EQ(y1.data()[i], y2.data()[i]);

    spec.seed = 12346;
    const Image y3 = degrade(x, spec);
    bool differs = false;
    for (std::size_t i = 0; i < y1.pixels(); ++i) differs |= y1.data()[i] != y3.data()[i];
    EXPECT_TRUE(differs);
}

TEST(Degradation, NoiseMatchesRequestedMoments) {
    // Large constant image: y - W x is exactly the injected noise field.
    const Image x(256, 256, 100.0);
    DegradationSpec spec;
    spec.factor = 1;
    spec.kernel_size = 1;
    spec.noise_sigma = 5.0;
    spec.seed = 99;
    const Image y = degrade(x, spec);
    double sum = 0.0, sum2 = 0.0;
    for (double v : y.data()) {
        const double n = v - 100.0;
        sum += n;
        sum2 += n * n;
    }
    const double n_px = double(y.pixels());
    const double mean = sum / n_px;
    const double sd = std::sqrt(sum2 / n_px - mean * mean);
    EXPECT_NEAR(mean, 0.0, 0.1);
    EXPECT_NEAR(sd, 5.0, 0.1);
}

TEST(Degradation, OperatorSpecForMatchesDims) {
    DegradationSpec spec;
    spec.factor = 2;
    spec.kernel_type = KernelType::average;
    const OperatorSpec op = operator_spec_for(spec, 10, 14);
    EXPECT_EQ(op.hr_height, 10);
    EXPECT_EQ(op.hr_width, 14);
    EXPECT_EQ(op.lr_height(), 5);
    EXPECT_EQ(op.lr_width(), 7);
    EXPECT_EQ(op.kernel.size, spec.kernel_size);
    EXPECT_THROW(operator_spec_for(spec, 9, 14), std::invalid_argument);
}
