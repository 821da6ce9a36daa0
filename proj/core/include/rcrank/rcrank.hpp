#pragma once

#include "rcrank/boosting.hpp"
#include "rcrank/dataset.hpp"
#include "rcrank/ensemble.hpp"
#include "rcrank/error.hpp"
#include "rcrank/experiment.hpp"
#include "rcrank/lambda.hpp"
#include "rcrank/metrics.hpp"
#include "rcrank/model_io.hpp"
#include "rcrank/oblivious_tree.hpp"
#include "rcrank/regression_tree.hpp"
#include "rcrank/significance.hpp"
#include "rcrank/split.hpp"
