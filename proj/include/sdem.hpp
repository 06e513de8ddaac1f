#pragma once
// Umbrella header.

#include "sdem/benchmarks.hpp"
#include "sdem/closed_form.hpp"
#include "sdem/closure.hpp"
#include "sdem/expm.hpp"
#include "sdem/generator.hpp"
#include "sdem/graph.hpp"
#include "sdem/model.hpp"
#include "sdem/monomial.hpp"
#include "sdem/montecarlo.hpp"
#include "sdem/odesolve.hpp"
#include "sdem/parser.hpp"
#include "sdem/polynomial.hpp"
#include "sdem/prosolve.hpp"
#include "sdem/rational.hpp"
#include "sdem/upoly.hpp"
