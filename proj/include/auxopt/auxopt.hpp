#pragma once

#include "auxopt/core/eigen_interop.hpp"
#include "auxopt/core/oracle.hpp"
#include "auxopt/core/random.hpp"
#include "auxopt/core/vector.hpp"
#include "auxopt/decentralized/helpers.hpp"
#include "auxopt/decentralized/weak_convexity.hpp"
#include "auxopt/harness/check.hpp"
#include "auxopt/harness/config.hpp"
#include "auxopt/harness/csv.hpp"
#include "auxopt/harness/experiment.hpp"
#include "auxopt/harness/problem.hpp"
#include "auxopt/harness/sweep.hpp"
#include "auxopt/optimizers/config.hpp"
#include "auxopt/optimizers/cycles.hpp"
#include "auxopt/optimizers/run.hpp"
#include "auxopt/optimizers/state.hpp"
#include "auxopt/problems/libsvm.hpp"
#include "auxopt/problems/logistic.hpp"
#include "auxopt/problems/quadratic.hpp"
#include "auxopt/problems/tasks.hpp"
#include "auxopt/problems/toy.hpp"
#include "auxopt/theory/diagnostics.hpp"
#include "auxopt/theory/estimators.hpp"
#include "auxopt/theory/params.hpp"
