#pragma once

#include "stancekit/cohorts.hpp"
#include "stancekit/config.hpp"
#include "stancekit/embedding.hpp"
#include "stancekit/error.hpp"
#include "stancekit/events.hpp"
#include "stancekit/filter.hpp"
#include "stancekit/ibeta.hpp"
#include "stancekit/metrics.hpp"
#include "stancekit/panel.hpp"
#include "stancekit/pipeline.hpp"
#include "stancekit/quarter.hpp"
#include "stancekit/rank.hpp"
#include "stancekit/scenario.hpp"
#include "stancekit/sgns.hpp"
#include "stancekit/stance.hpp"
#include "stancekit/svg.hpp"
#include "stancekit/text.hpp"
#include "stancekit/timeseries.hpp"
