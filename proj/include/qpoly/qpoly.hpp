#pragma once

#include "qpoly/charbuild.hpp"
#include "qpoly/distributed.hpp"
#include "qpoly/error.hpp"
#include "qpoly/matrix.hpp"
#include "qpoly/parallel.hpp"
#include "qpoly/polynomial.hpp"
#include "qpoly/quasipoly.hpp"
#include "qpoly/rational.hpp"
#include "qpoly/rootfinder.hpp"
