#pragma once

#include "t3/decode.hpp"
#include "t3/error.hpp"
#include "t3/features.hpp"
#include "t3/ingest.hpp"
#include "t3/kg.hpp"
#include "t3/metrics.hpp"
#include "t3/narrate.hpp"
#include "t3/pipeline.hpp"
#include "t3/regime.hpp"
#include "t3/segment.hpp"
#include "t3/synthetic.hpp"
#include "t3/verbalize.hpp"
