#pragma once

#include "errors.hpp"
#include "rational.hpp"
#include "matrix.hpp"
#include "lp.hpp"
#include "polytope.hpp"
#include "shapes.hpp"
#include "matching.hpp"
#include "yannakakis.hpp"
#include "bounds.hpp"
#include "matching_cover.hpp"
#include "sepmeasure.hpp"
