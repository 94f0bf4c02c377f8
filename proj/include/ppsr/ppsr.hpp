#pragma once

// Umbrella header for the whole library.

#include "ppsr/bicubic.hpp"
#include "ppsr/cg.hpp"
#include "ppsr/cnn.hpp"
#include "ppsr/cnn_train.hpp"
#include "ppsr/config.hpp"
#include "ppsr/degradation.hpp"
#include "ppsr/denoiser.hpp"
#include "ppsr/image.hpp"
#include "ppsr/metrics.hpp"
#include "ppsr/operators.hpp"
#include "ppsr/rng.hpp"
#include "ppsr/solver.hpp"
#include "ppsr/util.hpp"
