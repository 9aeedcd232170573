#pragma once

#include "gkaccel/errors.hpp"
#include "gkaccel/linalg.hpp"
#include "gkaccel/geometry.hpp"
#include "gkaccel/analysis.hpp"
#include "gkaccel/operators.hpp"
#include "gkaccel/acceleration.hpp"
#include "gkaccel/random.hpp"
#include "gkaccel/problem_io.hpp"
#include "gkaccel/experiments.hpp"
