#pragma once

#include "robe/core_model.hpp"
#include "robe/curves.hpp"
#include "robe/errors.hpp"
#include "robe/integrator.hpp"
#include "robe/monodromy.hpp"
#include "robe/parallel.hpp"
#include "robe/spectral_index.hpp"
#include "robe/symplectic.hpp"
#include "robe/types.hpp"
