#pragma once

#include "cvmem/benchmark.hpp"
#include "cvmem/epr.hpp"
#include "cvmem/fidelity.hpp"
#include "cvmem/fock.hpp"
#include "cvmem/gaussian.hpp"
#include "cvmem/memory.hpp"
#include "cvmem/numerics.hpp"
