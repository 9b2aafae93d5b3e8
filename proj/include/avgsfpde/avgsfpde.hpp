#pragma once

#include "avgsfpde/errors.hpp"
#include "avgsfpde/philox.hpp"
#include "avgsfpde/measure.hpp"
#include "avgsfpde/spectral.hpp"
#include "avgsfpde/maps.hpp"
#include "avgsfpde/oscillator.hpp"
#include "avgsfpde/history.hpp"
#include "avgsfpde/coefficients.hpp"
#include "avgsfpde/integrator.hpp"
#include "avgsfpde/checks.hpp"
#include "avgsfpde/presets.hpp"
#include "avgsfpde/stats.hpp"
#include "avgsfpde/experiments.hpp"
#include "avgsfpde/report_io.hpp"
