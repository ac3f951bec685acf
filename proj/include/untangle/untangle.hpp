#pragma once

#include "untangle/clusterer.hpp"
#include "untangle/code_facts.hpp"
#include "untangle/dataset.hpp"
#include "untangle/error.hpp"
#include "untangle/evaluator.hpp"
#include "untangle/event_model.hpp"
#include "untangle/hungarian.hpp"
#include "untangle/metrics.hpp"
#include "untangle/model.hpp"
#include "untangle/random.hpp"
#include "untangle/session_io.hpp"
#include "untangle/synth.hpp"
#include "untangle/unified_diff.hpp"
#include "untangle/validation.hpp"
#include "untangle/voters.hpp"
