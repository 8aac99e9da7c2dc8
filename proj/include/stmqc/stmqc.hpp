#pragma once

// desk-scale simulator and frequency-budget planner for chains of
// electron-nuclear spin pairs under a graded magnetic field

#include "stmqc/basis.hpp"
#include "stmqc/chain.hpp"
#include "stmqc/config_io.hpp"
#include "stmqc/constants.hpp"
#include "stmqc/evolve.hpp"
#include "stmqc/fft.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/hamiltonian.hpp"
#include "stmqc/planner.hpp"
#include "stmqc/protocols.hpp"
#include "stmqc/pulse.hpp"
#include "stmqc/readout.hpp"
#include "stmqc/rng.hpp"
#include "stmqc/serialize.hpp"
#include "stmqc/species.hpp"
#include "stmqc/state.hpp"
