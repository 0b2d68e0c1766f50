#pragma once

#include "resv/demand_trace.hpp"
#include "resv/error.hpp"
#include "resv/experiment.hpp"
#include "resv/harness.hpp"
#include "resv/ledger.hpp"
#include "resv/oracle.hpp"
#include "resv/policies.hpp"
#include "resv/pricing.hpp"
#include "resv/random.hpp"
#include "resv/report_json.hpp"
#include "resv/sampler.hpp"
#include "resv/traces.hpp"
