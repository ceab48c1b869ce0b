#pragma once

// Umbrella header for the spectral-feature fake image detector.

#include "sfk/classify/kmeans.hpp"
#include "sfk/classify/logistic.hpp"
#include "sfk/classify/metrics.hpp"
#include "sfk/classify/model.hpp"
#include "sfk/classify/sample.hpp"
#include "sfk/classify/svm.hpp"
#include "sfk/dataset.hpp"
#include "sfk/error.hpp"
#include "sfk/experiments/protocols.hpp"
#include "sfk/experiments/synth.hpp"
#include "sfk/fft.hpp"
#include "sfk/image.hpp"
#include "sfk/image_io.hpp"
#include "sfk/spectrum.hpp"
#include "sfk/text.hpp"
