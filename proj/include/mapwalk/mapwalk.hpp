#pragma once

#include "mapwalk/errors.hpp"
#include "mapwalk/rational.hpp"
#include "mapwalk/transformation.hpp"
#include "mapwalk/semigroup.hpp"
#include "mapwalk/rees.hpp"
#include "mapwalk/measure.hpp"
#include "mapwalk/linalg.hpp"
#include "mapwalk/limits.hpp"
#include "mapwalk/cliques.hpp"
#include "mapwalk/analysis.hpp"
#include "mapwalk/stats.hpp"
#include "mapwalk/simulate.hpp"
#include "mapwalk/report.hpp"
