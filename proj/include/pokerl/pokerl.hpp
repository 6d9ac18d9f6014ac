#pragma once

#include "pokerl/assets.hpp"
#include "pokerl/base64.hpp"
#include "pokerl/curriculum.hpp"
#include "pokerl/env.hpp"
#include "pokerl/error.hpp"
#include "pokerl/metrics.hpp"
#include "pokerl/observation.hpp"
#include "pokerl/policies.hpp"
#include "pokerl/ppm.hpp"
#include "pokerl/protocol.hpp"
#include "pokerl/qlearning.hpp"
#include "pokerl/rng.hpp"
#include "pokerl/rollout.hpp"
#include "pokerl/server.hpp"
#include "pokerl/shaping.hpp"
#include "pokerl/text.hpp"
#include "pokerl/tilemap.hpp"
#include "pokerl/types.hpp"
#include "pokerl/world.hpp"
