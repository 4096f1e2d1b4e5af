#pragma once

#include "fastosc/asymptotics.hpp"
#include "fastosc/averaging.hpp"
#include "fastosc/bound_state.hpp"
#include "fastosc/corrector.hpp"
#include "fastosc/gauge.hpp"
#include "fastosc/profile.hpp"
#include "fastosc/quadrature.hpp"
#include "fastosc/two_scale.hpp"
