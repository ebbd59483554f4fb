#pragma once

#include "fakelens/best_polynomials.hpp"
#include "fakelens/errors.hpp"
#include "fakelens/expression.hpp"
#include "fakelens/int_polynomial.hpp"
#include "fakelens/lattice.hpp"
#include "fakelens/oracle.hpp"
#include "fakelens/ring.hpp"
#include "fakelens/sampling.hpp"
#include "fakelens/structure_set.hpp"
#include "fakelens/tables.hpp"
#include "fakelens/valuation.hpp"
#include "fakelens/verify.hpp"
