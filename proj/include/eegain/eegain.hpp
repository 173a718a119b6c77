#pragma once

#include "eegain/dataset.hpp"
#include "eegain/dsp/iir.hpp"
#include "eegain/dsp/resample.hpp"
#include "eegain/dsp/spectrum.hpp"
#include "eegain/error.hpp"
#include "eegain/labeling.hpp"
#include "eegain/metrics.hpp"
#include "eegain/models/bandpower.hpp"
#include "eegain/models/classifier.hpp"
#include "eegain/models/mlp.hpp"
#include "eegain/rng.hpp"
#include "eegain/runner/config.hpp"
#include "eegain/runner/report.hpp"
#include "eegain/runner/runner.hpp"
#include "eegain/signal.hpp"
#include "eegain/splitting.hpp"
#include "eegain/transform.hpp"
