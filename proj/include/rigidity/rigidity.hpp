#pragma once

#include "rigidity/errors.hpp"
#include "rigidity/linalg.hpp"
#include "rigidity/domains.hpp"
#include "rigidity/curvature.hpp"
#include "rigidity/exterior.hpp"
#include "rigidity/nakano.hpp"
#include "rigidity/quadrature.hpp"
#include "rigidity/growth.hpp"
#include "rigidity/l2lab.hpp"
#include "rigidity/acceptance.hpp"
