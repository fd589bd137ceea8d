#pragma once

// Umbrella header for the LoDD boundary-detection library.

#include "cluster.hpp"
#include "core.hpp"
#include "datagen.hpp"
#include "detect.hpp"
#include "eval.hpp"
#include "io.hpp"
#include "metric.hpp"
#include "neighbors.hpp"
#include "parallel.hpp"
#include "pca.hpp"
#include "random.hpp"
#include "ratio.hpp"
