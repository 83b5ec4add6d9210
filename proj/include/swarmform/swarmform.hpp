#pragma once

#include "swarmform/error.hpp"
#include "swarmform/macro_transform.hpp"
#include "swarmform/moebius_transform.hpp"
#include "swarmform/pattern_model.hpp"
#include "swarmform/physics_sim.hpp"
#include "swarmform/transform_classifier.hpp"
