#pragma once

#include "anonsense/anonymity.hpp"
#include "anonsense/charfn.hpp"
#include "anonsense/estimator.hpp"
#include "anonsense/experiment.hpp"
#include "anonsense/fields.hpp"
#include "anonsense/protocol_sim.hpp"
#include "anonsense/rng.hpp"
#include "anonsense/statevec.hpp"
#include "anonsense/validation.hpp"
