#pragma once

// Umbrella header for the whole toolkit.

#include "spsafs/classifier.hpp"
#include "spsafs/config.hpp"
#include "spsafs/dataset.hpp"
#include "spsafs/decision_tree.hpp"
#include "spsafs/experiment.hpp"
#include "spsafs/genetic.hpp"
#include "spsafs/linear_svm.hpp"
#include "spsafs/mask.hpp"
#include "spsafs/measurement.hpp"
#include "spsafs/nearest_neighbor.hpp"
#include "spsafs/objective.hpp"
#include "spsafs/random.hpp"
#include "spsafs/result.hpp"
#include "spsafs/sequential.hpp"
#include "spsafs/spsa.hpp"
#include "spsafs/stats.hpp"
