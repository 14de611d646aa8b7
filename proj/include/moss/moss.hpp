#pragma once

#include "moss/error.hpp"
#include "moss/estimators.hpp"
#include "moss/exact_oracle.hpp"
#include "moss/generators.hpp"
#include "moss/graph.hpp"
#include "moss/harness.hpp"
#include "moss/method.hpp"
#include "moss/motif_catalog.hpp"
#include "moss/order.hpp"
#include "moss/random.hpp"
#include "moss/report_io.hpp"
#include "moss/samplers.hpp"
#include "moss/small_graph.hpp"
#include "moss/tape.hpp"
#include "moss/version.hpp"
#include "moss/vertex_sim.hpp"
#include "moss/weight_index.hpp"
