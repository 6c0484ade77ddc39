#pragma once

#include "slmt/error.hpp"
#include "slmt/quadrature.hpp"
#include "slmt/problem.hpp"
#include "slmt/ode.hpp"
#include "slmt/shooting.hpp"
#include "slmt/picard.hpp"
#include "slmt/characteristic.hpp"
#include "slmt/asymptotics.hpp"
#include "slmt/hilbert.hpp"
#include "slmt/eigensolve.hpp"
#include "slmt/expansion.hpp"
#include "slmt/problem_io.hpp"
