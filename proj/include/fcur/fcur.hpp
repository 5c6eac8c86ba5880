#pragma once

#include "fcur/baselines.hpp"
#include "fcur/discretize.hpp"
#include "fcur/errors.hpp"
#include "fcur/experiments.hpp"
#include "fcur/fcurrent.hpp"
#include "fcur/flow.hpp"
#include "fcur/io.hpp"
#include "fcur/kernel.hpp"
#include "fcur/linalg.hpp"
#include "fcur/matching_pursuit.hpp"
#include "fcur/metric.hpp"
#include "fcur/parallel.hpp"
#include "fcur/registration.hpp"
#include "fcur/shape.hpp"
#include "fcur/synth.hpp"
#include "fcur/vec.hpp"
