#pragma once

#include "mecsched/error.hpp"
#include "mecsched/model.hpp"
#include "mecsched/scenario_json.hpp"
#include "mecsched/instance.hpp"
#include "mecsched/simplex.hpp"
#include "mecsched/lp_builder.hpp"
#include "mecsched/schedule.hpp"
#include "mecsched/offline.hpp"
#include "mecsched/online.hpp"
#include "mecsched/workload.hpp"
#include "mecsched/oracle.hpp"
#include "mecsched/report.hpp"
