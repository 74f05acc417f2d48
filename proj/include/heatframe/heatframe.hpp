#pragma once

#include "heatframe/bounds.hpp"
#include "heatframe/calculus.hpp"
#include "heatframe/config.hpp"
#include "heatframe/dyadic.hpp"
#include "heatframe/frame.hpp"
#include "heatframe/grid.hpp"
#include "heatframe/hardy.hpp"
#include "heatframe/io.hpp"
#include "heatframe/norms.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/quadrature.hpp"
#include "heatframe/report.hpp"
#include "heatframe/rng.hpp"
#include "heatframe/suites.hpp"
#include "heatframe/symbols.hpp"
