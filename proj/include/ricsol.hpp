#pragma once
// Umbrella header for the ricsol library.

#include "ricsol/tensor_core.hpp"
#include "ricsol/fixtures.hpp"
#include "ricsol/warped_geometry.hpp"
#include "ricsol/integrator.hpp"
#include "ricsol/interpolation.hpp"
#include "ricsol/soliton_ode.hpp"
#include "ricsol/profile_io.hpp"
#include "ricsol/quotient.hpp"
#include "ricsol/cli.hpp"
