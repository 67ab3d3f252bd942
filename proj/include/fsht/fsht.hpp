#pragma once
// Umbrella header: exact analysis of finite-memory binary hypothesis
// testers — machine model, Markov-chain error decomposition, reference
// machine families, analytic bounds, exhaustive search, and Monte Carlo
// validation.

#include "bounds.hpp"
#include "builders.hpp"
#include "chain.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "search.hpp"
#include "serialize.hpp"
#include "sim.hpp"
