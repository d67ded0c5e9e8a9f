#pragma once

// Umbrella header for the numeric core. io.hpp and suites.hpp pull in
// nlohmann_json and are included separately.

#include "derivatives.hpp"
#include "error.hpp"
#include "fft.hpp"
#include "fourier.hpp"
#include "grid.hpp"
#include "gsnorm.hpp"
#include "moyal.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "symplectic.hpp"
#include "twisted.hpp"
