#pragma once

#include "bhi/aggregate.hpp"
#include "bhi/calibration.hpp"
#include "bhi/dates.hpp"
#include "bhi/discrimination.hpp"
#include "bhi/error.hpp"
#include "bhi/impact.hpp"
#include "bhi/ingest.hpp"
#include "bhi/pipeline.hpp"
#include "bhi/plotdata.hpp"
#include "bhi/report.hpp"
#include "bhi/rng.hpp"
#include "bhi/robustness.hpp"
#include "bhi/saturation.hpp"
#include "bhi/series.hpp"
#include "bhi/stats.hpp"
#include "bhi/types.hpp"
#include "bhi/version.hpp"
