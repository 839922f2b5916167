#pragma once

#include "tiestrength/error.hpp"
#include "tiestrength/graph.hpp"
#include "tiestrength/parallel.hpp"
#include "tiestrength/measures.hpp"
#include "tiestrength/order.hpp"
#include "tiestrength/stats.hpp"
#include "tiestrength/ingest.hpp"
#include "tiestrength/axioms.hpp"
