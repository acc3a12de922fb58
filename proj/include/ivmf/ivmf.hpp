#pragma once

#include "ivmf/error.hpp"
#include "ivmf/core_model.hpp"
#include "ivmf/trust_expr.hpp"
#include "ivmf/scoring.hpp"
#include "ivmf/stats.hpp"
#include "ivmf/dataset_io.hpp"
#include "ivmf/report.hpp"
#include "ivmf/reproduction.hpp"
