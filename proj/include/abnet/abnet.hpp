#pragma once

#include "abnet/numeric.hpp"
#include "abnet/network.hpp"
#include "abnet/execution.hpp"
#include "abnet/monoid.hpp"
#include "abnet/linalg.hpp"
#include "abnet/simplex.hpp"
#include "abnet/algebra.hpp"
#include "abnet/halting.hpp"
#include "abnet/builders.hpp"
#include "abnet/json_io.hpp"
