#pragma once

#include "cavfb/errors.hpp"
#include "cavfb/fock.hpp"
#include "cavfb/continuous.hpp"
#include "cavfb/wigner.hpp"
#include "cavfb/qubit.hpp"
#include "cavfb/strobo.hpp"
#include "cavfb/adiabatic.hpp"

namespace cavfb {

#ifdef CAVFB_VERSION
inline constexpr const char* kVersion = CAVFB_VERSION;
#else
inline constexpr const char* kVersion = "0.1.0";
#endif

}  // namespace cavfb
