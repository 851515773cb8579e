#pragma once

// Umbrella header: lattice RBF interpolation, the method-of-lines schemes built on it, and the study harness.

#include "rbfmol/basis.hpp"
#include "rbfmol/bessel.hpp"
#include "rbfmol/cardinal.hpp"
#include "rbfmol/constants.hpp"
#include "rbfmol/evolve.hpp"
#include "rbfmol/fft.hpp"
#include "rbfmol/fit.hpp"
#include "rbfmol/io.hpp"
#include "rbfmol/multiplier.hpp"
#include "rbfmol/parallel.hpp"
#include "rbfmol/plot.hpp"
#include "rbfmol/quadrature.hpp"
#include "rbfmol/spectral.hpp"
#include "rbfmol/study.hpp"
#include "rbfmol/symbols.hpp"
#include "rbfmol/vec.hpp"
