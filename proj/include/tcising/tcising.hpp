// SPDX-License-Identifier: Apache-2.0

/// @file tcising.hpp
/// @brief Umbrella header.

#pragma once

#include "tcising/basis.hpp"
#include "tcising/dynamics.hpp"
#include "tcising/error.hpp"
#include "tcising/krylov.hpp"
#include "tcising/lindblad.hpp"
#include "tcising/measures.hpp"
#include "tcising/model.hpp"
#include "tcising/sparse.hpp"
#include "tcising/states.hpp"
#include "tcising/theory.hpp"
#include "tcising/trajectories.hpp"
