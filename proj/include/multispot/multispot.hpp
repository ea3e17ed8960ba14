#pragma once

#include "multispot/config.hpp"
#include "multispot/covariance.hpp"
#include "multispot/detectors.hpp"
#include "multispot/error.hpp"
#include "multispot/estimators.hpp"
#include "multispot/experiment.hpp"
#include "multispot/io.hpp"
#include "multispot/linalg.hpp"
#include "multispot/metrics.hpp"
#include "multispot/model.hpp"
#include "multispot/mos.hpp"
#include "multispot/parallel.hpp"
#include "multispot/rng.hpp"
#include "multispot/types.hpp"
