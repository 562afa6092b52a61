#pragma once

// Everything: fields, quadratic and hermitian forms, cones, sums of squares,
// spectra and session documents.
#include "hermsig/rational.hpp"
#include "hermsig/polynomial.hpp"
#include "hermsig/number_field.hpp"
#include "hermsig/four_squares.hpp"
#include "hermsig/matrix.hpp"
#include "hermsig/quadforms.hpp"
#include "hermsig/algebra.hpp"
#include "hermsig/hermitian.hpp"
#include "hermsig/random.hpp"
#include "hermsig/cones.hpp"
#include "hermsig/sos.hpp"
#include "hermsig/spectra.hpp"
#include "hermsig/session.hpp"
