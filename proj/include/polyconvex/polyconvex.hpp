#pragma once

#include "polyconvex/error.hpp"
#include "polyconvex/random.hpp"
#include "polyconvex/complex_geometry.hpp"
#include "polyconvex/planar_compacts.hpp"
#include "polyconvex/ball_certifier.hpp"
#include "polyconvex/hull_oracle.hpp"
#include "polyconvex/polynomial.hpp"
#include "polyconvex/variety_lab.hpp"
#include "polyconvex/json_io.hpp"
#include "polyconvex/svg.hpp"
#include "polyconvex/config.hpp"
#include "polyconvex/cli.hpp"
