#pragma once

#include "aga/error.hpp"
#include "aga/presentation.hpp"
#include "aga/numerics.hpp"
#include "aga/almostrep.hpp"
#include "aga/invariants.hpp"
#include "aga/objective.hpp"
#include "aga/homotopy.hpp"
#include "aga/samplers.hpp"
#include "aga/io.hpp"
