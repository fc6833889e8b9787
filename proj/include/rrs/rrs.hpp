#pragma once

#include "rrs/analysis.hpp"
#include "rrs/errors.hpp"
#include "rrs/harness.hpp"
#include "rrs/image.hpp"
#include "rrs/matrix.hpp"
#include "rrs/matrix_market.hpp"
#include "rrs/problem_io.hpp"
#include "rrs/problems.hpp"
#include "rrs/rng.hpp"
#include "rrs/sampling.hpp"
#include "rrs/solver.hpp"
#include "rrs/svg.hpp"
#include "rrs/text.hpp"
#include "rrs/vec.hpp"
