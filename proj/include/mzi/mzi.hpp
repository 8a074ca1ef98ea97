#pragma once

#include "mzi/amplitudes.hpp"
#include "mzi/analysis.hpp"
#include "mzi/density.hpp"
#include "mzi/error.hpp"
#include "mzi/peak.hpp"
#include "mzi/quadrature.hpp"
#include "mzi/wavepacket.hpp"
