#pragma once

// Umbrella header: the full toolkit surface.

#include "tphase/autocorrelation.hpp"
#include "tphase/clifford.hpp"
#include "tphase/core.hpp"
#include "tphase/differential.hpp"
#include "tphase/effective_gauge.hpp"
#include "tphase/errors.hpp"
#include "tphase/evolve.hpp"
#include "tphase/expression.hpp"
#include "tphase/field_tensor.hpp"
#include "tphase/fields.hpp"
#include "tphase/hamiltonian.hpp"
#include "tphase/matrix.hpp"
#include "tphase/path.hpp"
#include "tphase/phase.hpp"
#include "tphase/precession.hpp"
#include "tphase/quadrature.hpp"
#include "tphase/report.hpp"
#include "tphase/rng.hpp"
#include "tphase/runner.hpp"
#include "tphase/scenario.hpp"
#include "tphase/spinor.hpp"
#include "tphase/spinor_grid.hpp"
#include "tphase/version.hpp"
