#pragma once

#include "fdforge/charpoly.hpp"
#include "fdforge/dimensions.hpp"
#include "fdforge/errors.hpp"
#include "fdforge/formula.hpp"
#include "fdforge/nelder_mead.hpp"
#include "fdforge/rational.hpp"
#include "fdforge/search.hpp"
#include "fdforge/taylor_system.hpp"
#include "fdforge/tpoly.hpp"
#include "fdforge/validation.hpp"
