#pragma once

// Umbrella header: pulls in the whole library.

#include "nlelast/checks.hpp"
#include "nlelast/config.hpp"
#include "nlelast/core.hpp"
#include "nlelast/diagnostics.hpp"
#include "nlelast/fft.hpp"
#include "nlelast/field.hpp"
#include "nlelast/geometry.hpp"
#include "nlelast/io.hpp"
#include "nlelast/kernels.hpp"
#include "nlelast/linalg.hpp"
#include "nlelast/operator.hpp"
#include "nlelast/quadrature.hpp"
#include "nlelast/runner.hpp"
#include "nlelast/solver.hpp"
#include "nlelast/sphere_rule.hpp"
#include "nlelast/symbol.hpp"
#include "nlelast/threads.hpp"
