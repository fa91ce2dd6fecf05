#pragma once

// Umbrella header for the NV spin-coherence toolkit.

#include "nvc/coherence.hpp"
#include "nvc/constants.hpp"
#include "nvc/electrostatics.hpp"
#include "nvc/fields.hpp"
#include "nvc/fitting.hpp"
#include "nvc/hamiltonian.hpp"
#include "nvc/io.hpp"
#include "nvc/levmar.hpp"
#include "nvc/mc.hpp"
#include "nvc/ou_process.hpp"
#include "nvc/presets.hpp"
#include "nvc/spin_matrices.hpp"
#include "nvc/units.hpp"
