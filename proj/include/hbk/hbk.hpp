#pragma once

// Everything in one include.
#include "hbk/error.hpp"
#include "hbk/log.hpp"
#include "hbk/parallel.hpp"
#include "hbk/spin_matrix.hpp"
#include "hbk/lattice.hpp"
#include "hbk/field.hpp"
#include "hbk/kernels.hpp"
#include "hbk/spectral.hpp"
#include "hbk/collision.hpp"
#include "hbk/evolution.hpp"
#include "hbk/diagnostics.hpp"
#include "hbk/dispersion_validation.hpp"
#include "hbk/selftest.hpp"
#include "hbk/config.hpp"
