#pragma once

#include "nlsstar/errors.hpp"
#include "nlsstar/roots.hpp"
#include "nlsstar/quadrature.hpp"
#include "nlsstar/soliton_line.hpp"
#include "nlsstar/stationary_states.hpp"
#include "nlsstar/existence_map.hpp"
#include "nlsstar/discrete_field.hpp"
#include "nlsstar/discrete_oracle.hpp"
#include "nlsstar/reduced_energy.hpp"
