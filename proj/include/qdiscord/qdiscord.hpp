#pragma once

#include "qdiscord/errors.hpp"
#include "qdiscord/linalg.hpp"
#include "qdiscord/state_family.hpp"
#include "qdiscord/measurement.hpp"
#include "qdiscord/nelder_mead.hpp"
#include "qdiscord/discord.hpp"
#include "qdiscord/dynamics.hpp"
#include "qdiscord/surface.hpp"
