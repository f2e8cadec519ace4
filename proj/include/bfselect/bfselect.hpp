#pragma once

// Basis-function-expansion regression with adaptive basis selection:
// posterior fitting in moment and information form, subdomain-aware
// selection scores with computable loss bounds, reduced-rank GP models,
// exact-GP references, evaluation metrics, and the benchmark experiments.
//
// The command-line front end lives in bfselect/cli.hpp and is not included
// here, keeping this umbrella free of the argument-parsing dependency.

#include "bfselect/basis.hpp"
#include "bfselect/box_domain.hpp"
#include "bfselect/experiments.hpp"
#include "bfselect/gp.hpp"
#include "bfselect/hgp.hpp"
#include "bfselect/linalg.hpp"
#include "bfselect/metrics.hpp"
#include "bfselect/posterior.hpp"
#include "bfselect/predictive.hpp"
#include "bfselect/quadrature.hpp"
#include "bfselect/rng.hpp"
#include "bfselect/selection.hpp"
