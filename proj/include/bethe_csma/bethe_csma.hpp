#pragma once

#include "bas.hpp"
#include "baselines.hpp"
#include "bethe.hpp"
#include "bethe_error.hpp"
#include "bum.hpp"
#include "concavity.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "sampling.hpp"
#include "schedules.hpp"
#include "sim.hpp"
#include "utility.hpp"
#include "verify.hpp"
